"""The union-bag distribution over large bags.

A draw fills t slots with uniform source-bag indices, keeps each slot
independently with probability 1/2, and concatenates the kept bags with
their aggregate labels summed.  Union is multiset concatenation, not set
union: residual additivity across the kept bags must hold exactly, and
deduplication would break it whenever a bag repeats or bags overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from .core import (
    Bag,
    BagCollection,
    Classifier,
    ParameterError,
    LLP,
    accuracy,
    residual,
)

DEFAULT_C0 = 0.8  # ~ sqrt(2/pi), the central-binomial anti-concentration constant

SUPPORT_GUARD = 10 ** 7


class SizeError(ParameterError):
    """Exact enumeration would exceed the support guard."""


class PreconditionError(ValueError):
    """A verifier's stated hypothesis does not hold for the given inputs."""


def _snap_int(x: float, eps: float = 1e-9) -> float:
    r = round(x)
    return float(r) if abs(x - r) <= eps else x


def compute_t(epsilon: float, alpha: float, c0: float = DEFAULT_C0) -> int:
    """Slot count t = ceil((32/eps) * (c0/alpha)^2)."""
    if not (0.0 < epsilon <= 1.0):
        raise ParameterError("epsilon must be in (0, 1]")
    if not (0.0 < alpha <= 1.0):
        raise ParameterError("alpha must be in (0, 1]")
    if c0 <= 0.0:
        raise ParameterError("c0 must be positive")
    return int(math.ceil(_snap_int((32.0 / epsilon) * (c0 / alpha) ** 2)))


@dataclass(frozen=True)
class UnionConfig:
    """Slot count plus the parameters it was (optionally) derived from."""

    t: int
    epsilon: Optional[float] = None
    alpha: Optional[float] = None
    c0: float = DEFAULT_C0

    def __post_init__(self):
        if self.t < 1:
            raise ParameterError("t must be >= 1")

    @classmethod
    def from_params(cls, epsilon: float, alpha: float, c0: float = DEFAULT_C0):
        return cls(t=compute_t(epsilon, alpha, c0), epsilon=epsilon, alpha=alpha, c0=c0)


@dataclass(frozen=True)
class UnionBag:
    """Concatenation of kept source bags with summed aggregate label."""

    members: tuple[int, ...]
    agg_label: int
    provenance: tuple[int, ...]  # source-bag indices kept, in slot order

    def to_bag(self, mode: str = LLP) -> Bag:
        return Bag(members=self.members, agg_label=self.agg_label, mode=mode)


def _build_union(coll: BagCollection, kept_indices) -> UnionBag:
    members = []
    sigma = 0
    for j in kept_indices:
        members.extend(coll.bags[j].members)
        sigma += coll.bags[j].agg_label
    return UnionBag(members=tuple(members), agg_label=sigma,
                    provenance=tuple(int(j) for j in kept_indices))


def sample_union(coll: BagCollection, cfg: UnionConfig,
                 rng: np.random.Generator) -> UnionBag:
    """One draw: t index draws then t coin draws, so a sample consumes a
    fixed amount of randomness and runs replay exactly from the seed."""
    if coll.is_weighted:
        raise ParameterError("union sampling expects an unweighted collection")
    m = len(coll)
    indices = rng.integers(0, m, size=cfg.t)
    coins = rng.random(cfg.t)
    kept = indices[coins < 0.5]
    return _build_union(coll, kept)


def sample_unions(coll: BagCollection, cfg: UnionConfig, s: int,
                  rng: np.random.Generator) -> list[UnionBag]:
    return [sample_union(coll, cfg, rng) for _ in range(s)]


def unions_to_collection(unions, coll: BagCollection,
                         weights=None) -> BagCollection:
    """Pack union bags into a collection over the same instance table."""
    bags = tuple(u.to_bag(coll.mode) for u in unions)
    w = np.asarray(weights, dtype=np.float64) if weights is not None else None
    return BagCollection(bags=bags, table=coll.table, mode=coll.mode, weights=w)


@dataclass(frozen=True)
class SupportEntry:
    union_bag: UnionBag
    weight: float


def enumerate_support(coll: BagCollection, t: int) -> list[SupportEntry]:
    """Exact support of the union distribution as canonical (sorted)
    multisets of source indices with their probabilities.

    A multiset of size r with multiplicities (c_1..c_u) has probability
    C(t, r) * 2^-t * r!/(prod c_i!) * m^-r.
    """
    if coll.is_weighted:
        raise ParameterError("support enumeration expects an unweighted collection")
    m = len(coll)
    if (m + 1) ** t > SUPPORT_GUARD:
        raise SizeError("(m+1)^t = %d exceeds the enumeration guard %d"
                        % ((m + 1) ** t, SUPPORT_GUARD))
    entries = []
    half_t = 0.5 ** t
    for r in range(t + 1):
        base = math.comb(t, r) * half_t * m ** (-float(r))
        for multiset in combinations_with_replacement(range(m), r):
            perms = math.factorial(r)
            for j in set(multiset):
                perms //= math.factorial(multiset.count(j))
            entries.append(SupportEntry(_build_union(coll, multiset), base * perms))
    return entries


def support_to_collection(entries, coll: BagCollection) -> BagCollection:
    """Weighted collection over the enumerated support."""
    return unions_to_collection([e.union_bag for e in entries], coll,
                                weights=[e.weight for e in entries])


@dataclass(frozen=True)
class AmplificationReport:
    empirical_sat_rate: float
    bound: float
    stderr: float
    n_samples: int
    holds: bool


def verify_error_amplification(h: Classifier, coll: BagCollection,
                               cfg: UnionConfig, zeta: float,
                               n_samples: int, rng: np.random.Generator,
                               ) -> AmplificationReport:
    """Monte-Carlo check that a classifier with accuracy < 1 - zeta on the
    source bags satisfies a sampled union with probability at most
    c0/sqrt(zeta*t) + exp(-zeta*t/8), up to 3 standard errors.

    A union is satisfied iff the kept residuals sum to zero, so sampling
    works directly on the per-bag residual vector.
    """
    if not (0.0 < zeta < 1.0):
        raise ParameterError("zeta must be in (0, 1)")
    acc = accuracy(h, coll)
    if acc >= 1.0 - zeta:
        raise PreconditionError(
            "hypothesis violated: accuracy %.6f >= 1 - zeta = %.6f" % (acc, 1.0 - zeta))
    res = np.array([residual(h, b, coll.table) for b in coll.bags], dtype=np.int64)
    m = len(coll)
    sat_count = 0
    chunk = max(1, min(n_samples, 10 ** 7 // max(cfg.t, 1)))
    remaining = n_samples
    while remaining > 0:
        k = min(chunk, remaining)
        idx = rng.integers(0, m, size=(k, cfg.t))
        coins = rng.random((k, cfg.t)) < 0.5
        totals = (res[idx] * coins).sum(axis=1)
        sat_count += int((totals == 0).sum())
        remaining -= k
    p_hat = sat_count / n_samples
    bound = cfg.c0 / math.sqrt(zeta * cfg.t) + math.exp(-zeta * cfg.t / 8.0)
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / n_samples)
    return AmplificationReport(
        empirical_sat_rate=p_hat,
        bound=bound,
        stderr=stderr,
        n_samples=n_samples,
        holds=p_hat <= bound + 3.0 * stderr,
    )
