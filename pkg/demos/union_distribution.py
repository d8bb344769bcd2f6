"""Poke at the union-bag distribution.

Each draw keeps a fair-coin subset of t uniformly chosen bag slots and
concatenates the survivors; the aggregate label is the sum of the kept
labels.  At small scale the exact support is enumerable, so we can check
sampled frequencies against closed-form probabilities, and then watch the
error-amplification effect: a classifier that misses many small bags
almost never satisfies a large union.
"""

import numpy as np

from baglearn import (
    Bag,
    BagCollection,
    InstanceTable,
    LLP,
    UnionConfig,
    constant_classifier,
    enumerate_support,
    sample_union,
    verify_error_amplification,
)


def support_vs_samples():
    rng = np.random.default_rng(0)
    tbl = InstanceTable(rng.standard_normal((6, 2)))
    bags = tuple(Bag((2 * i, 2 * i + 1), 1, LLP) for i in range(3))
    coll = BagCollection(bags, tbl, LLP)

    t = 2
    entries = enumerate_support(coll, t)
    n = 200000
    counts = {}
    for _ in range(n):
        key = tuple(sorted(sample_union(coll, UnionConfig(t=t), rng).provenance))
        counts[key] = counts.get(key, 0) + 1

    print("union support for m=3 bags, t=2:")
    for e in sorted(entries, key=lambda e: e.union_bag.provenance):
        key = tuple(sorted(e.union_bag.provenance))
        print("  bags %-8s  exact %.4f   sampled %.4f"
              % (key or "(none)", e.weight, counts.get(key, 0) / n))


def amplification():
    rng = np.random.default_rng(1)
    tbl = InstanceTable(rng.standard_normal((100, 2)))
    bags = tuple(Bag((2 * i, 2 * i + 1), 1, LLP) for i in range(50))
    coll = BagCollection(bags, tbl, LLP)

    h = constant_classifier(0)  # satisfies no bag: accuracy 0
    rep = verify_error_amplification(h, coll, UnionConfig(t=64), zeta=0.5,
                                     n_samples=100000,
                                     rng=np.random.default_rng(2))
    print("\nerror amplification at t=64 for an accuracy-0 classifier:")
    print("  union satisfaction rate %.5f vs bound %.5f (holds: %s)"
          % (rep.empirical_sat_rate, rep.bound, rep.holds))


if __name__ == "__main__":
    support_vs_samples()
    amplification()
