"""Walk through weak-to-strong learning on bags, start to finish.

A collection of small bags only reveals label sums, so even a perfect
bag-level learner can stop at mediocre per-bag accuracy.  Training the
same learner on large *union* bags forces it to be consistent with many
overlapping sums at once, and the small-bag accuracy jumps.
"""

import numpy as np

from baglearn import (
    SyntheticConfig,
    TrainConfig,
    accuracy,
    algorithm_a1,
    algorithm_a2,
    brute_force_oracle,
    compute_t,
    gen_random_bags,
    sgd_oracle,
)


def tiny_exact_demo():
    print("--- exhaustive route (tiny, deterministic) ---")
    ds = gen_random_bags(SyntheticConfig(n_bags=3, q=2, d=2, n_test=10, seed=7))
    coll = ds.collection
    res = algorithm_a1(coll, epsilon=0.3, alpha=0.9,
                       oracle=brute_force_oracle(), t=4)
    print("small bags: %d, union support size: %d (t=%d)"
          % (len(coll), len(res.large_collection), res.t))
    print("small-bag accuracy of the returned labeling: %.3f"
          % accuracy(res.classifier, coll))


def sampled_sgd_demo():
    print("--- sampling route with the SGD learner ---")
    ds = gen_random_bags(SyntheticConfig(n_bags=500, q=5, d=10, n_test=1000, seed=0))
    coll = ds.collection

    # baseline: the same learner applied directly to the small bags
    direct = sgd_oracle(TrainConfig(epochs=40, seed=1))(coll, None)
    print("direct training on small bags:        %.3f" %
          accuracy(direct.classifier, coll))

    res = algorithm_a2(coll, epsilon=0.1, alpha=0.5,
                       oracle=sgd_oracle(TrainConfig(epochs=40, seed=1)),
                       rng=np.random.default_rng(1), t=10, s=8000)
    clf = res.classifier
    test_acc = (clf.predict(ds.test_coords) == ds.test_labels).mean()
    print("after training on %d sampled unions:  %.3f (small bags), %.3f (test)"
          % (len(res.large_collection), accuracy(clf, coll), test_acc))
    print("for comparison, t from (epsilon=0.1, alpha=0.5) would be %d"
          % compute_t(0.1, 0.5))


if __name__ == "__main__":
    tiny_exact_demo()
    print()
    sampled_sgd_demo()
