"""Hardness constructions and their empirical verifiers.

LLP side: 2-sized bags whose members are unit vectors at a (near-)fixed
angle, all with aggregate label 1, so a bag is satisfied exactly when a
labeling separates the pair.  The full sphere-cell partition behind the
asymptotic statement is astronomically large, so the generator samples
pairs from the angle band instead; the no-strong check is exact at tiny
scale and a labeled lower-bound heuristic beyond that.

MIL side: the circle construction, discretized into 2T arcs, implemented
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import (
    Bag,
    BagCollection,
    InstanceTable,
    ParameterError,
    LLP,
    MIL,
    accuracy,
    constant_classifier,
    random_classifier_satisfaction_prob,
    satisfaction_vector,
)
from .oracles import (
    OracleResult,
    best_halfspace_2d,
    brute_force_best_labeling,
)


class GenerationError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


# ---------------------------------------------------------------------------
# LLP: sampled angle-band pairs

@dataclass(frozen=True)
class MaxCutLLPConfig:
    alpha: float          # target pair angle theta = alpha * pi, alpha in [1/2, 1)
    epsilon: float        # slack; default band width is epsilon * pi
    d: int
    n_pairs: int
    seed: int = 0
    band_width: Optional[float] = None  # radians; overrides epsilon * pi

    def __post_init__(self):
        if not (0.5 <= self.alpha < 1.0):
            raise ParameterError("alpha must be in [1/2, 1)")
        if self.epsilon <= 0 or self.alpha + self.epsilon >= 1.0:
            raise ParameterError("need 0 < epsilon and alpha + epsilon < 1")
        if self.d < 2:
            raise ParameterError("d must be >= 2")
        if self.n_pairs < 1:
            raise ParameterError("n_pairs must be >= 1")

    @property
    def theta(self) -> float:
        return self.alpha * math.pi

    @property
    def band(self) -> float:
        return self.band_width if self.band_width is not None else self.epsilon * math.pi


def _sample_band_angle(lo, hi, d, rng, max_attempts=10000):
    # angle density on the sphere is proportional to sin^(d-2)
    power = d - 2
    peak = max(math.sin(lo) ** power, math.sin(hi) ** power,
               1.0 if lo <= math.pi / 2 <= hi else 0.0)
    for _ in range(max_attempts):
        phi = rng.uniform(lo, hi)
        if rng.random() * peak <= math.sin(phi) ** power:
            return phi
    raise GenerationError("angle rejection sampling failed after %d attempts" % max_attempts)


def _unit(v):
    return v / np.linalg.norm(v)


def gen_llp_maxcut_bags(cfg: MaxCutLLPConfig,
                        rng: Optional[np.random.Generator] = None) -> BagCollection:
    """Sample n_pairs unit-vector pairs with mutual angle in
    [theta, theta + band]; each pair is a 2-sized bag with aggregate label 1."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.theta, cfg.theta + cfg.band
    if hi >= math.pi:
        raise ParameterError("angle band must stay below pi")
    coords = np.zeros((2 * cfg.n_pairs, cfg.d))
    bags = []
    for j in range(cfg.n_pairs):
        u = _unit(rng.standard_normal(cfg.d))
        phi = _sample_band_angle(lo, hi, cfg.d, rng)
        tangent = rng.standard_normal(cfg.d)
        tangent -= (tangent @ u) * u
        norm = np.linalg.norm(tangent)
        if norm < 1e-12:
            raise GenerationError("degenerate tangent draw")
        v = math.cos(phi) * u + math.sin(phi) * (tangent / norm)
        coords[2 * j] = u
        coords[2 * j + 1] = v
        bags.append(Bag(members=(2 * j, 2 * j + 1), agg_label=1, mode=LLP))
    return BagCollection(bags=tuple(bags), table=InstanceTable(coords), mode=LLP)


@dataclass(frozen=True)
class NoStrongReport:
    value: float
    exact: bool   # False => value is only a lower bound on the true optimum
    labels: dict


def _labeling_accuracy(labels, coll):
    from .core import ExplicitLabeling
    return accuracy(ExplicitLabeling(labels), coll)


def verify_llp_no_strong(coll: BagCollection, budget: int = 100,
                         rng: Optional[np.random.Generator] = None) -> NoStrongReport:
    """Best labeling accuracy: exact by exhaustion when at most 24 distinct
    instances, otherwise restarted single-flip hill climbing (a lower bound)."""
    ids = coll.distinct_instance_ids()
    if ids.size <= 24:
        res = brute_force_best_labeling(coll)
        return NoStrongReport(value=res.achieved_accuracy, exact=True,
                              labels=res.classifier.labels)
    if rng is None:
        rng = np.random.default_rng(0)

    flat, seg, _, sigmas = coll._flat()
    w = coll.effective_weights()
    m = len(coll)
    n = ids.size
    pos_of = {int(v): p for p, v in enumerate(ids)}
    member_pos = np.array([pos_of[int(i)] for i in flat])
    # per-instance list of (bag index, multiplicity in that bag)
    counts: list[dict] = [dict() for _ in range(n)]
    for mem, bag_j in zip(member_pos, seg):
        d = counts[mem]
        d[int(bag_j)] = d.get(int(bag_j), 0) + 1
    bags_of = [list(d.items()) for d in counts]

    best_val = -1.0
    best_labels = None
    for _ in range(budget):
        labels = rng.integers(0, 2, size=n)
        sums = np.bincount(seg, weights=labels[member_pos], minlength=m).astype(np.int64)
        val = float(w @ (sums == sigmas))
        improved = True
        while improved:
            improved = False
            for i in rng.permutation(n):
                delta = 1 - 2 * labels[i]
                gain = 0.0
                for j, count in bags_of[i]:
                    new_sum = sums[j] + delta * count
                    gain += w[j] * (int(new_sum == sigmas[j]) - int(sums[j] == sigmas[j]))
                if gain > 1e-15:
                    labels[i] ^= 1
                    for j, count in bags_of[i]:
                        sums[j] += delta * count
                    val += gain
                    improved = True
        if val > best_val:
            best_val = val
            best_labels = labels.copy()
    labels_map = {int(ids[p]): int(best_labels[p]) for p in range(n)}
    return NoStrongReport(value=best_val, exact=False, labels=labels_map)


# ---------------------------------------------------------------------------
# MIL: circle arcs

@dataclass(frozen=True)
class CircleMILConfig:
    """Arc discretization of the circle construction.

    alpha must be rational with alpha*T integral so arc pairs align exactly
    and all bag weights are uniform; under exact alignment the arc-width
    condition relaxes to 2*delta <= min(2*alpha - 1, 1 - alpha).
    """

    alpha: Fraction
    T: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not (Fraction(1, 2) < self.alpha < 1):
            raise ParameterError("alpha must be in (1/2, 1)")
        if self.T < 1:
            raise ParameterError("T must be >= 1")
        if (self.alpha * self.T).denominator != 1:
            raise ParameterError("alpha * T must be an integer")
        delta = Fraction(1, self.T)
        if not 2 * delta <= min(2 * self.alpha - 1, 1 - self.alpha):
            raise ParameterError("arc width too coarse: need 2/T <= min(2a-1, 1-a)")

    @property
    def delta(self) -> float:
        return 1.0 / self.T

    @property
    def one_bag_offset(self) -> int:
        return int(self.alpha * self.T)

    @property
    def zero_bag_offset(self) -> int:
        return int((1 - self.alpha) * self.T)


def _offset_pairs(n_arcs: int, offset: int):
    seen = set()
    pairs = []
    for i in range(n_arcs):
        key = frozenset((i, (i + offset) % n_arcs))
        if key not in seen:
            seen.add(key)
            pairs.append(tuple(sorted(key)))
    return pairs


def gen_mil_circle_bags(cfg: CircleMILConfig) -> BagCollection:
    """Instances are the 2T arc midpoints; 1-bags pair arcs alpha*T
    positions apart, 0-bags (1-alpha)*T apart, all uniformly weighted so
    the 0-bag and 1-bag sides carry equal total weight."""
    n_arcs = 2 * cfg.T
    angles = (np.arange(n_arcs) + 0.5) * math.pi / cfg.T
    coords = np.column_stack([np.cos(angles), np.sin(angles)])
    zero_pairs = _offset_pairs(n_arcs, cfg.zero_bag_offset)
    one_pairs = _offset_pairs(n_arcs, cfg.one_bag_offset)
    bags = ([Bag(members=p, agg_label=0, mode=MIL) for p in zero_pairs]
            + [Bag(members=p, agg_label=1, mode=MIL) for p in one_pairs])
    # exact alignment: each side has the same pair count, so uniform weights
    # put half the mass on 0-bags and half on 1-bags
    assert len(zero_pairs) == len(one_pairs)
    w = np.full(len(bags), 1.0 / len(bags))
    return BagCollection(bags=tuple(bags), table=InstanceTable(coords),
                         mode=MIL, weights=w)


def verify_mil_no_strong(coll: BagCollection) -> NoStrongReport:
    """Exact optimum over all arc labelings (requires <= 24 arcs)."""
    ids = coll.distinct_instance_ids()
    if ids.size > 24:
        raise ParameterError("exact MIL verification limited to 24 arcs")
    res = brute_force_best_labeling(coll)
    return NoStrongReport(value=res.achieved_accuracy, exact=True,
                          labels=res.classifier.labels)


@dataclass(frozen=True)
class WeakExistsReport:
    best_accuracy: float
    best_kind: str
    bound: float
    holds: bool


def verify_mil_weak_exists(coll: BagCollection, cfg: CircleMILConfig,
                           weights=None, n_dirs: int = 720) -> WeakExistsReport:
    """Check that constant classifiers or some homogeneous halfspace reach
    the guaranteed accuracy 2/3 - (1-alpha)/2 - 2*delta under the given
    (or stored) bag weights."""
    if weights is not None:
        coll = BagCollection(bags=coll.bags, table=coll.table, mode=coll.mode,
                             weights=np.asarray(weights, dtype=np.float64))
    res = best_halfspace_2d(coll, n_dirs)
    bound = 2.0 / 3.0 - (1.0 - float(cfg.alpha)) / 2.0 - 2.0 * cfg.delta
    return WeakExistsReport(best_accuracy=res.achieved_accuracy,
                            best_kind=res.classifier.kind,
                            bound=bound,
                            holds=res.achieved_accuracy >= bound - 1e-12)


# ---------------------------------------------------------------------------
# adversarial weighting: the finite-menu zero-sum game

@dataclass(frozen=True)
class WeightingResult:
    weights: np.ndarray
    value: float
    witness: int       # menu index of the best response at the optimum
    duality_gap: float


def menu_satisfaction(coll: BagCollection, classifiers: Sequence,
                      include_random: bool = False) -> np.ndarray:
    """Per-bag satisfaction rows for a finite classifier menu; the optional
    random-labeling row uses the closed-form probabilities."""
    rows = [satisfaction_vector(h, coll).astype(np.float64) for h in classifiers]
    if include_random:
        rows.append(np.array([random_classifier_satisfaction_prob(b) for b in coll.bags]))
    return np.vstack(rows)


def adversarial_weights(coll: BagCollection, sat_matrix: np.ndarray) -> WeightingResult:
    """Weights minimizing the best menu accuracy: the value of the zero-sum
    game with payoff matrix sat_matrix (menu x bags), solved as a linear
    program.  The reported duality gap comes from best responses against
    both players' solutions."""
    V = np.asarray(sat_matrix, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] < 1:
        raise ParameterError("menu satisfaction matrix must be non-empty and 2-d")
    n_menu, m = V.shape
    if m != len(coll):
        raise ParameterError("satisfaction matrix width must match bag count")

    # min z  s.t.  V w <= z,  1'w = 1,  w >= 0
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([V, -np.ones((n_menu, 1))])
    b_ub = np.zeros(n_menu)
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    bounds = [(0, None)] * m + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError("weight LP failed: %s" % res.message)
    w = np.clip(res.x[:m], 0.0, None)
    w /= w.sum()

    # dual: max v  s.t.  p'V >= v,  1'p = 1,  p >= 0
    c2 = np.zeros(n_menu + 1)
    c2[-1] = -1.0
    A_ub2 = np.hstack([-V.T, np.ones((m, 1))])
    b_ub2 = np.zeros(m)
    A_eq2 = np.zeros((1, n_menu + 1))
    A_eq2[0, :n_menu] = 1.0
    bounds2 = [(0, None)] * n_menu + [(None, None)]
    res2 = linprog(c2, A_ub=A_ub2, b_ub=b_ub2, A_eq=A_eq2, b_eq=[1.0],
                   bounds=bounds2, method="highs")
    if not res2.success:
        raise RuntimeError("mixture LP failed: %s" % res2.message)
    p = np.clip(res2.x[:n_menu], 0.0, None)
    p /= p.sum()

    col_values = V @ w
    upper = float(col_values.max())       # best menu response to w
    lower = float((p @ V).min())          # worst bag against the mixture p
    return WeightingResult(weights=w, value=upper, witness=int(col_values.argmax()),
                           duality_gap=upper - lower)
