"""Bag-level data model and accuracy metrics.

Instances live in a shared table; bags reference them by row index and
carry a single aggregate label: the sum of instance labels (LLP mode) or
their OR (MIL mode).  A bag is *satisfied* by a classifier when the
classifier's induced instance labels reproduce the aggregate label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

LLP = "llp"
MIL = "mil"

WEIGHT_SUM_TOL = 1e-9


class DataError(ValueError):
    """Malformed instances, bags or collections."""


class ParameterError(ValueError):
    """Out-of-range algorithm parameter."""


def _as_float_matrix(coords) -> np.ndarray:
    arr = np.asarray(coords, dtype=np.float64)
    if arr.ndim != 2:
        raise DataError("instance coordinates must be a 2-d array, got ndim=%d" % arr.ndim)
    if not np.all(np.isfinite(arr)):
        raise DataError("instance coordinates must be finite")
    return arr


class InstanceTable:
    """Shared store of feature-vectors, optionally with ground-truth labels.

    Labels are kept for synthetic/test data and absent (None) at
    bag-training time.
    """

    def __init__(self, coords, labels: Optional[Sequence[int]] = None):
        self.coords = _as_float_matrix(coords)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (self.coords.shape[0],):
                raise DataError("labels length must match instance count")
            if not np.isin(labels, (0, 1)).all():
                raise DataError("instance labels must be 0/1")
        self.labels = labels

    def __len__(self):
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


# ---------------------------------------------------------------------------
# classifiers

class Classifier:
    """A {0,1}-valued predictor over feature-vectors."""

    kind = "abstract"

    def predict(self, coords: np.ndarray) -> np.ndarray:
        """Predict labels for raw coordinate rows."""
        raise NotImplementedError

    def labels_for(self, table: InstanceTable, ids) -> np.ndarray:
        """Predict labels for instance ids resolved against a table."""
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= len(table)):
            raise DataError("instance id out of range")
        return self.predict(table.coords[ids])


class LinearSigmoidClassifier(Classifier):
    """g(x) = sigmoid(<w, x> + b), binarized at a decision threshold.

    Scores >= threshold map to 1.
    """

    kind = "linear-sigmoid"

    def __init__(self, w, b: float = 0.0, threshold: float = 0.5):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = float(b)
        self.threshold = float(threshold)

    def score(self, coords: np.ndarray) -> np.ndarray:
        z = coords @ self.w + self.b
        return 1.0 / (1.0 + np.exp(-z))

    def predict(self, coords: np.ndarray) -> np.ndarray:
        return (self.score(coords) >= self.threshold).astype(np.int64)


class HalfspaceClassifier(Classifier):
    """pos(<r, x> + c): 1 when the affine form is strictly positive."""

    def __init__(self, r, c: float = 0.0):
        self.r = np.asarray(r, dtype=np.float64)
        self.c = float(c)

    @property
    def kind(self):
        return "homogeneous-halfspace" if self.c == 0.0 else "affine-halfspace"

    def predict(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.float64)
        if self.r.size == 0:
            # constant classifier: pos(c) regardless of the input point
            val = 1 if self.c > 0 else 0
            return np.full(coords.shape[0], val, dtype=np.int64)
        return (coords @ self.r + self.c > 0.0).astype(np.int64)


def constant_classifier(value: int) -> HalfspaceClassifier:
    """All-zeros or all-ones classifier, expressed as pos(-1) / pos(+1)."""
    if value not in (0, 1):
        raise ParameterError("constant classifier value must be 0 or 1")
    return HalfspaceClassifier(r=np.zeros(0), c=-1.0 if value == 0 else 1.0)


class ExplicitLabeling(Classifier):
    """Direct id -> {0,1} map; covers only the ids it was built from."""

    kind = "explicit-labeling"

    def __init__(self, labels: dict[int, int]):
        self.labels = {int(k): int(v) for k, v in labels.items()}
        if not all(v in (0, 1) for v in self.labels.values()):
            raise DataError("explicit labels must be 0/1")

    def predict(self, coords: np.ndarray) -> np.ndarray:
        raise DataError("explicit labeling has no coordinate rule; use labels_for")

    def labels_for(self, table: InstanceTable, ids) -> np.ndarray:
        try:
            return np.array([self.labels[int(i)] for i in np.asarray(ids).ravel()],
                            dtype=np.int64)
        except KeyError as exc:
            raise DataError("explicit labeling does not cover id %s" % exc) from exc


# ---------------------------------------------------------------------------
# bags and collections

@dataclass(frozen=True)
class Bag:
    """A multiset of instance ids with one aggregate label.

    LLP: 0 <= agg_label <= len(members).  MIL: agg_label in {0, 1}.
    Empty member lists are permitted only with agg_label 0 (they arise as
    union bags where every slot dropped, and are satisfied by every
    classifier).
    """

    members: tuple[int, ...]
    agg_label: int
    mode: str

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(int(i) for i in self.members))
        object.__setattr__(self, "agg_label", int(self.agg_label))
        if self.mode not in (LLP, MIL):
            raise DataError("mode must be %r or %r" % (LLP, MIL))
        if any(i < 0 for i in self.members):
            raise DataError("negative instance id")
        if self.mode == LLP:
            if not (0 <= self.agg_label <= len(self.members)):
                raise DataError("LLP aggregate label out of range")
        else:
            if self.agg_label not in (0, 1):
                raise DataError("MIL aggregate label must be 0/1")
            if not self.members and self.agg_label != 0:
                raise DataError("empty MIL bag must have aggregate label 0")

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class BagCollection:
    """Weighted or unweighted sequence of bags over a shared instance table."""

    bags: tuple[Bag, ...]
    table: InstanceTable
    mode: str
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(self.bags))
        if not self.bags:
            raise DataError("collection must contain at least one bag")
        for bag in self.bags:
            if bag.mode != self.mode:
                raise DataError("all bags must share the collection mode")
            if bag.members and max(bag.members) >= len(self.table):
                raise DataError("bag references instance id outside the table")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (len(self.bags),):
                raise DataError("weights length must match bag count")
            if (w < 0).any():
                raise DataError("weights must be non-negative")
            if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise DataError("weights must sum to 1 within %g" % WEIGHT_SUM_TOL)
            object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.bags)

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def effective_weights(self) -> np.ndarray:
        if self.weights is not None:
            return self.weights
        m = len(self.bags)
        return np.full(m, 1.0 / m)

    @property
    def max_bag_size(self) -> int:
        return max(len(b) for b in self.bags)

    def distinct_instance_ids(self) -> np.ndarray:
        ids = sorted({i for b in self.bags for i in b.members})
        return np.array(ids, dtype=np.int64)

    # flat member view, cached: used by the vectorized accuracy path
    def _flat(self):
        cached = self.__dict__.get("_flat_cache")
        if cached is None:
            sizes = np.array([len(b) for b in self.bags], dtype=np.int64)
            flat = np.concatenate([np.asarray(b.members, dtype=np.int64)
                                   for b in self.bags]) if sizes.sum() else np.zeros(0, np.int64)
            seg = np.repeat(np.arange(len(self.bags)), sizes)
            sigmas = np.array([b.agg_label for b in self.bags], dtype=np.int64)
            cached = (flat, seg, sizes, sigmas)
            self.__dict__["_flat_cache"] = cached
        return cached


# ---------------------------------------------------------------------------
# metrics

def residual(h: Classifier, bag: Bag, table: InstanceTable) -> int:
    """h(B) - sigma: the integer gap between induced sum and aggregate label.

    Zero iff the (LLP) bag is satisfied.
    """
    if bag.mode != LLP:
        raise ParameterError("residual is defined for LLP bags only")
    if not bag.members:
        return -bag.agg_label
    preds = h.labels_for(table, bag.members)
    return int(preds.sum()) - bag.agg_label


def is_satisfied(h: Classifier, bag: Bag, table: InstanceTable) -> bool:
    if bag.mode == LLP:
        return residual(h, bag, table) == 0
    preds = h.labels_for(table, bag.members) if bag.members else np.zeros(0, np.int64)
    return int(preds.any()) == bag.agg_label


def satisfaction_vector(h: Classifier, coll: BagCollection) -> np.ndarray:
    """Boolean per-bag satisfaction, computed in one vectorized pass."""
    flat, seg, sizes, sigmas = coll._flat()
    preds = h.labels_for(coll.table, flat) if flat.size else np.zeros(0, np.int64)
    m = len(coll)
    sums = np.bincount(seg, weights=preds, minlength=m).astype(np.int64)
    if coll.mode == LLP:
        return sums == sigmas
    return (sums > 0).astype(np.int64) == sigmas


def accuracy(h: Classifier, coll: BagCollection) -> float:
    """Weighted fraction of bags satisfied (uniform 1/m when unweighted)."""
    sat = satisfaction_vector(h, coll)
    return float(coll.effective_weights() @ sat)


def random_classifier_satisfaction_prob(bag: Bag) -> float:
    """Satisfaction probability under iid fair-coin instance labels."""
    q = len(bag)
    if bag.mode == LLP:
        if not (0 <= bag.agg_label <= q):
            return 0.0
        return math.comb(q, bag.agg_label) / 2.0 ** q
    if bag.agg_label == 0:
        return 2.0 ** -q
    return 1.0 - 2.0 ** -q


# ---------------------------------------------------------------------------
# trivial accuracy: value of the 3-column zero-sum game

def _reference_columns(coll: BagCollection) -> np.ndarray:
    """Per-bag satisfaction values of (random, all-0, all-1), shape (3, m)."""
    v_rand = np.array([random_classifier_satisfaction_prob(b) for b in coll.bags])
    zero = constant_classifier(0)
    one = constant_classifier(1)
    v0 = satisfaction_vector(zero, coll).astype(np.float64)
    v1 = satisfaction_vector(one, coll).astype(np.float64)
    return np.vstack([v_rand, v0, v1])


def _golden_max(f, lo, hi, tol):
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def trivial_accuracy(coll: BagCollection, tol: float = 1e-6) -> float:
    """Minimax baseline over bag weightings vs {random, all-0, all-1}.

    Computed through the dual: maximize, over mixtures p of the three
    reference classifiers, the minimum per-bag expected satisfaction.
    The objective is piecewise-linear concave on the 2-simplex, so nested
    golden-section search converges.
    """
    V = _reference_columns(coll)  # (3, m)

    def value(p_rand, p_zero):
        p = np.array([p_rand, p_zero, 1.0 - p_rand - p_zero])
        return float((p @ V).min())

    def outer(p_rand):
        if p_rand >= 1.0:
            return value(1.0, 0.0)
        _, best = _golden_max(lambda b: value(p_rand, b), 0.0, 1.0 - p_rand, tol)
        return best

    _, v = _golden_max(outer, 0.0, 1.0, tol)
    # the corners are candidate optima the interior search may undershoot
    corners = [value(1, 0), value(0, 1), value(0, 0)]
    return max(v, *corners)


# ---------------------------------------------------------------------------
# weighted -> unweighted conversion

def _snap_int(x: float, eps: float = 1e-9) -> float:
    r = round(x)
    return float(r) if abs(x - r) <= eps else x


def weighted_to_unweighted(coll: BagCollection, T: int) -> BagCollection:
    """Replicate each bag ceil(w_i * (T-1)) times after normalizing weights
    to sum to m.

    Output size is in [(T-1)m, Tm] and any classifier's accuracy moves by
    at most 1/(T-1).
    """
    if T < 2:
        raise ParameterError("T must be >= 2")
    if not coll.is_weighted:
        raise ParameterError("input collection must be weighted")
    m = len(coll)
    w = coll.weights * m  # normalize to sum m
    out = []
    for bag, wi in zip(coll.bags, w):
        n_i = math.ceil(_snap_int(wi * (T - 1)))
        out.extend([bag] * n_i)
    return BagCollection(bags=tuple(out), table=coll.table, mode=coll.mode)
