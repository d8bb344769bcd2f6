"""Weak-to-strong learning for LLP via large union bags.

Two routes with the same contract: the exhaustive route hands the oracle
the exact weighted support of the union distribution; the sampling route
hands it s iid draws.  Either way, an oracle that achieves accuracy alpha
on the large bags yields a classifier with accuracy >= 1 - epsilon on the
small bags (with probability >= 1 - delta for the sampling route).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BagCollection, Classifier, ParameterError
from .oracles import OracleResult
from .union import (
    DEFAULT_C0,
    UnionConfig,
    compute_t,
    enumerate_support,
    sample_unions,
    support_to_collection,
    unions_to_collection,
)


@dataclass(frozen=True)
class SampleSizePlan:
    n: int
    alpha: float
    delta: float
    vc_dim: Optional[int]
    s: int


def compute_s(n: int, alpha: float, delta: float,
              vc_dim: Optional[int] = None) -> SampleSizePlan:
    """Sample count making the failure probability union bound <= delta.

    The per-classifier failure probability is exp(-alpha*s/6); the growth
    function of the oracle's class is bounded by 2^n (unrestricted) or
    (e*n/r)^r (VC dimension r < n), giving
        s = ceil((6/alpha) * (n*ln 2 + ln(1/delta)))          unrestricted
        s = ceil((6/alpha) * (r*ln(e*n/r) + ln(1/delta)))     VC class.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not (0.0 < alpha <= 1.0):
        raise ParameterError("alpha must be in (0, 1]")
    if not (0.0 < delta < 1.0):
        raise ParameterError("delta must be in (0, 1)")
    if vc_dim is not None and vc_dim < 1:
        raise ParameterError("vc_dim must be >= 1")
    if vc_dim is None or vc_dim >= n:
        growth_log = n * math.log(2.0)
        vc_used = None
    else:
        growth_log = vc_dim * math.log(math.e * n / vc_dim)
        vc_used = vc_dim
    s = int(math.ceil((6.0 / alpha) * (growth_log + math.log(1.0 / delta))))
    return SampleSizePlan(n=n, alpha=alpha, delta=delta, vc_dim=vc_used, s=max(s, 1))


@dataclass
class WeakToStrongResult:
    classifier: Classifier
    oracle_result: OracleResult
    t: int
    large_collection: BagCollection
    met_contract: Optional[bool]
    sample_plan: Optional[SampleSizePlan] = None


def _check_large_sizes(large: BagCollection, k: int, t: int):
    limit = k * t
    for bag in large.bags:
        if len(bag) > limit:
            raise AssertionError("large bag of size %d exceeds k*t = %d" % (len(bag), limit))


def algorithm_a1(coll: BagCollection, epsilon: float, alpha: float,
                 oracle, c0: float = DEFAULT_C0,
                 t: Optional[int] = None) -> WeakToStrongResult:
    """Exhaustive route: enumerate the exact weighted support of the union
    distribution and run the oracle on it.  Deterministic."""
    if coll.is_weighted:
        raise ParameterError("algorithm_a1 expects an unweighted collection")
    if t is None:
        t = compute_t(epsilon, alpha, c0)
    entries = enumerate_support(coll, t)
    large = support_to_collection(entries, coll)
    _check_large_sizes(large, coll.max_bag_size, t)
    result = oracle(large, alpha)
    return WeakToStrongResult(classifier=result.classifier, oracle_result=result,
                              t=t, large_collection=large,
                              met_contract=result.met_contract)


def algorithm_a2(coll: BagCollection, epsilon: float, alpha: float,
                 oracle, rng: np.random.Generator,
                 delta: float = 0.05, c0: float = DEFAULT_C0,
                 t: Optional[int] = None,
                 s: Optional[int] = None,
                 vc_dim: Optional[int] = None) -> WeakToStrongResult:
    """Sampling route: draw s iid union bags and run the oracle on the
    unweighted sampled collection."""
    if coll.is_weighted:
        raise ParameterError("algorithm_a2 expects an unweighted collection")
    if t is None:
        t = compute_t(epsilon, alpha, c0)
    plan = None
    if s is None:
        plan = compute_s(int(coll.distinct_instance_ids().size), alpha, delta, vc_dim)
        s = plan.s
    if s < 1:
        raise ParameterError("s must be >= 1")
    cfg = UnionConfig(t=t, epsilon=epsilon, alpha=alpha, c0=c0)
    unions = sample_unions(coll, cfg, s, rng)
    large = unions_to_collection(unions, coll)
    _check_large_sizes(large, coll.max_bag_size, t)
    result = oracle(large, alpha)
    return WeakToStrongResult(classifier=result.classifier, oracle_result=result,
                              t=t, large_collection=large,
                              met_contract=result.met_contract, sample_plan=plan)
