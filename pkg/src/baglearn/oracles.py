"""Concrete weak-learner oracles.

The learning guarantee treats the oracle as an assumption; these
implementations report whether the requested accuracy contract was
actually met rather than pretending it always holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BagCollection,
    Classifier,
    DataError,
    ExplicitLabeling,
    HalfspaceClassifier,
    LinearSigmoidClassifier,
    ParameterError,
    LLP,
    MIL,
    accuracy,
    constant_classifier,
)

BRUTE_FORCE_MAX_INSTANCES = 24


class TrainingError(RuntimeError):
    """Training diverged (non-finite loss)."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    batch_size: int = 512
    epochs: int = 160
    seed: int = 0
    weight_init: str = "uniform-small"  # iid U[-0.01, 0.01], bias 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ParameterError("learning_rate must be positive")
        if self.batch_size < 1 or self.epochs < 1:
            raise ParameterError("batch_size and epochs must be >= 1")


@dataclass
class OracleResult:
    classifier: Classifier
    achieved_accuracy: float
    met_contract: Optional[bool]  # None when no target accuracy was given


def bag_mse_loss_grad(w: np.ndarray, b: float, coords: np.ndarray,
                      seg: np.ndarray, sigmas: np.ndarray):
    """Mean over bags of (sigma - sum_x sigmoid(<w,x>+b))^2 and its gradient.

    coords holds one row per bag member, seg maps members to bag index.
    """
    n_bags = sigmas.size
    z = coords @ w + b
    g = 1.0 / (1.0 + np.exp(-z))
    pred = np.bincount(seg, weights=g, minlength=n_bags)
    resid = sigmas - pred
    loss = float((resid ** 2).mean())
    coeff = (-2.0 / n_bags) * resid[seg] * g * (1.0 - g)
    grad_w = coords.T @ coeff
    grad_b = float(coeff.sum())
    return loss, grad_w, grad_b


def _ragged_gather(offsets, sizes, order):
    """Flat-member index array for bags taken in the given order."""
    sizes_o = sizes[order]
    total = int(sizes_o.sum())
    if total == 0:
        return np.zeros(0, np.int64), sizes_o
    ends = np.cumsum(sizes_o)
    pos = np.arange(total)
    which = np.searchsorted(ends, pos, side="right")
    within = pos - (ends - sizes_o)[which]
    return offsets[order][which] + within, sizes_o


def train_linear_sigmoid(coll: BagCollection, cfg: TrainConfig,
                         alpha: Optional[float] = None) -> OracleResult:
    """Mini-batch SGD on the bag-level squared loss between aggregate label
    and summed sigmoid prediction.

    Unweighted collections shuffle bags and batch without replacement per
    epoch; weighted collections sample bags with probability proportional
    to weight, with replacement.
    """
    if coll.mode != LLP:
        raise ParameterError("linear-sigmoid training is defined for LLP collections")
    rng = np.random.default_rng(cfg.seed)
    d = coll.table.dim
    w = rng.uniform(-0.01, 0.01, size=d)
    b = 0.0

    flat, _, sizes, sigmas = coll._flat()
    m = len(coll)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    X = coll.table.coords
    weights = coll.weights
    batches_per_epoch = math.ceil(m / cfg.batch_size)

    for epoch in range(cfg.epochs):
        if weights is None:
            order = rng.permutation(m)
        else:
            order = rng.choice(m, size=batches_per_epoch * cfg.batch_size, p=weights)
        gather, sizes_o = _ragged_gather(offsets, sizes, order)
        member_idx = flat[gather]
        bag_ends = np.cumsum(sizes_o)
        for bi in range(batches_per_epoch):
            lo_bag = bi * cfg.batch_size
            hi_bag = min((bi + 1) * cfg.batch_size, order.size)
            lo = 0 if lo_bag == 0 else int(bag_ends[lo_bag - 1])
            hi = int(bag_ends[hi_bag - 1])
            seg = np.repeat(np.arange(hi_bag - lo_bag), sizes_o[lo_bag:hi_bag])
            loss, gw, gb = bag_mse_loss_grad(
                w, b, X[member_idx[lo:hi]], seg, sigmas[order[lo_bag:hi_bag]].astype(np.float64))
            if not np.isfinite(loss):
                raise TrainingError(
                    "non-finite loss at epoch %d batch %d (lr=%g)" % (epoch, bi, cfg.learning_rate))
            w -= cfg.learning_rate * gw
            b -= cfg.learning_rate * gb

    clf = LinearSigmoidClassifier(w=w, b=b, threshold=0.5)
    acc = accuracy(clf, coll)
    return OracleResult(classifier=clf, achieved_accuracy=acc,
                        met_contract=None if alpha is None else acc >= alpha)


# ---------------------------------------------------------------------------
# exact oracle for tiny instances

def brute_force_best_labeling(coll: BagCollection,
                              alpha: Optional[float] = None) -> OracleResult:
    """Exhaustively score all labelings of the referenced instances and
    return a maximizer with the exact optimal weighted accuracy.

    Ties break toward the lexicographically-smallest labeling bitmask.
    """
    ids = coll.distinct_instance_ids()
    n = ids.size
    if n > BRUTE_FORCE_MAX_INSTANCES:
        raise ParameterError("brute force limited to %d distinct instances, got %d"
                             % (BRUTE_FORCE_MAX_INSTANCES, n))
    pos_of = {int(v): p for p, v in enumerate(ids)}
    w = coll.effective_weights()
    total = 1 << n
    best_acc = -1.0
    best_mask = 0
    chunk = min(total, 1 << 16)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        acc = np.zeros(masks.size)
        for bag, wj in zip(coll.bags, w):
            if not bag.members:
                sat = np.full(masks.size, bag.agg_label == 0)
            else:
                s = np.zeros(masks.size, dtype=np.int64)
                any_one = np.zeros(masks.size, dtype=bool)
                for mid in bag.members:
                    bit = ((masks >> np.uint64(pos_of[mid])) & np.uint64(1)).astype(np.int64)
                    s += bit
                    any_one |= bit.astype(bool)
                if bag.mode == LLP:
                    sat = s == bag.agg_label
                else:
                    sat = any_one == bool(bag.agg_label)
            acc += wj * sat
        k = int(acc.argmax())  # first max: lexicographically-smallest mask
        if acc[k] > best_acc + 1e-15:
            best_acc = float(acc[k])
            best_mask = start + k
    labels = {int(ids[p]): (best_mask >> p) & 1 for p in range(n)}
    clf = ExplicitLabeling(labels)
    return OracleResult(classifier=clf, achieved_accuracy=best_acc,
                        met_contract=None if alpha is None else best_acc >= alpha)


# ---------------------------------------------------------------------------
# halfspace classifiers

def random_homogeneous_halfspace(d: int, rng: np.random.Generator) -> HalfspaceClassifier:
    """pos(<r, x>) for r uniform on the unit sphere."""
    if d < 2:
        raise ParameterError("dimension must be >= 2")
    while True:
        r = rng.standard_normal(d)
        norm = np.linalg.norm(r)
        if norm > 1e-12:
            return HalfspaceClassifier(r=r / norm, c=0.0)


def best_halfspace_2d(coll: BagCollection, n_dirs: int,
                      alpha: Optional[float] = None) -> OracleResult:
    """Best of n_dirs evenly spaced homogeneous halfspaces plus the two
    constant classifiers, by weighted accuracy."""
    if coll.table.dim != 2:
        raise ParameterError("best_halfspace_2d requires 2-d instances")
    if n_dirs < 1:
        raise ParameterError("n_dirs must be >= 1")
    angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    candidates = [HalfspaceClassifier(r=np.array([np.cos(a), np.sin(a)]), c=0.0)
                  for a in angles]
    candidates.append(constant_classifier(0))
    candidates.append(constant_classifier(1))
    best = None
    best_acc = -1.0
    for clf in candidates:
        acc = accuracy(clf, coll)
        if acc > best_acc:
            best, best_acc = clf, acc
    return OracleResult(classifier=best, achieved_accuracy=best_acc,
                        met_contract=None if alpha is None else best_acc >= alpha)


# ---------------------------------------------------------------------------
# oracle factories for the weak-to-strong algorithms

def sgd_oracle(cfg: TrainConfig):
    """Oracle callable backed by the linear-sigmoid trainer."""
    def oracle(coll: BagCollection, alpha: Optional[float] = None) -> OracleResult:
        return train_linear_sigmoid(coll, cfg, alpha=alpha)
    return oracle


def brute_force_oracle():
    def oracle(coll: BagCollection, alpha: Optional[float] = None) -> OracleResult:
        return brute_force_best_labeling(coll, alpha=alpha)
    return oracle
