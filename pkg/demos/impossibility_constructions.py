"""The two hardness constructions, with their verifiers.

Both are collections of 2-sized bags where weak classifiers provably
exist for every bag weighting, yet no labeling gets close to perfect
accuracy -- so weak bag learners cannot be boosted in general.  The OR
case (MIL) lives on a discretized circle; the sum case (LLP) samples
unit-vector pairs at a wide fixed angle.
"""

from fractions import Fraction

import numpy as np

from baglearn import (
    CircleMILConfig,
    MaxCutLLPConfig,
    accuracy,
    adversarial_weights,
    constant_classifier,
    gen_llp_maxcut_bags,
    gen_mil_circle_bags,
    menu_satisfaction,
    random_homogeneous_halfspace,
    trivial_accuracy,
    verify_llp_no_strong,
    verify_mil_no_strong,
    verify_mil_weak_exists,
)


def mil_circle():
    cfg = CircleMILConfig(alpha=Fraction(3, 4), T=8)
    coll = gen_mil_circle_bags(cfg)
    print("MIL circle: %d bags on %d arcs (alpha=%s, T=%d)"
          % (len(coll), len(coll.table), cfg.alpha, cfg.T))

    ns = verify_mil_no_strong(coll)
    print("  best of all 2^16 arc labelings: %.4f (upper bound 3/4)" % ns.value)

    weak = verify_mil_weak_exists(coll, cfg)
    print("  best constant/halfspace at uniform weights: %.4f >= bound %.4f: %s"
          % (weak.best_accuracy, weak.bound, weak.holds))

    # let an adversary pick the weighting against a classifier menu
    rng = np.random.default_rng(0)
    menu = [constant_classifier(0), constant_classifier(1)]
    menu += [random_homogeneous_halfspace(2, rng) for _ in range(360)]
    adv = adversarial_weights(coll, menu_satisfaction(coll, menu))
    still = verify_mil_weak_exists(coll, cfg, weights=adv.weights)
    print("  adversarial weighting: menu value %.4f (duality gap %.1e), "
          "weak bound still holds: %s" % (adv.value, adv.duality_gap, still.holds))
    print("  trivial baseline: %.4f" % trivial_accuracy(coll))


def llp_band():
    cfg = MaxCutLLPConfig(alpha=0.75, epsilon=0.05, d=3, n_pairs=12, seed=1)
    coll = gen_llp_maxcut_bags(cfg)
    print("\nLLP angle-band pairs: %d bags in dimension %d, pair angle >= %.2f rad"
          % (len(coll), cfg.d, cfg.theta))

    rng = np.random.default_rng(2)
    accs = [accuracy(random_homogeneous_halfspace(cfg.d, rng), coll)
            for _ in range(2000)]
    print("  mean random-halfspace accuracy: %.4f (expected about alpha = %.2f)"
          % (np.mean(accs), cfg.alpha))

    ns = verify_llp_no_strong(coll)
    print("  best labeling: %.4f (exact: %s)" % (ns.value, ns.exact))
    print("  trivial baseline: %.4f" % trivial_accuracy(coll))


if __name__ == "__main__":
    mil_circle()
    llp_band()
