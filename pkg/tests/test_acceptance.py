"""Acceptance gate: one test per acceptance criterion.

Each test prints a single PASS/FAIL line (to the real stdout, so it shows
up in piped pytest output) before asserting.  Fixtures that train models
are module-scoped and shared across criteria.
"""

import math
import os
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from baglearn.constructions import (
    CircleMILConfig,
    MaxCutLLPConfig,
    adversarial_weights,
    gen_llp_maxcut_bags,
    gen_mil_circle_bags,
    menu_satisfaction,
    verify_mil_no_strong,
    verify_mil_weak_exists,
)
from baglearn.core import (
    Bag,
    BagCollection,
    ExplicitLabeling,
    HalfspaceClassifier,
    InstanceTable,
    LLP,
    MIL,
    accuracy,
    constant_classifier,
    residual,
    trivial_accuracy,
    weighted_to_unweighted,
)
from baglearn.datagen import (
    ColumnSpec,
    DatasetSchema,
    SyntheticConfig,
)
from baglearn.experiment import ExperimentConfig, run_experiment
from baglearn.oracles import (
    TrainConfig,
    bag_mse_loss_grad,
    brute_force_best_labeling,
    brute_force_oracle,
    random_homogeneous_halfspace,
)
from baglearn.union import UnionConfig, enumerate_support, sample_union, \
    verify_error_amplification
from baglearn.weak_to_strong import algorithm_a1

HEART_PATH = os.path.join(os.path.dirname(__file__), "..", "data",
                          "processed.cleveland.data")


@pytest.fixture
def report(capfd):
    """Prints one acceptance line per criterion, bypassing pytest capture
    so the line shows up even for passing tests."""
    def _report(num, ok, detail):
        line = "ACCEPTANCE %2d: %s — %s" % (num, "PASS" if ok else "FAIL", detail)
        with capfd.disabled():
            print(line, flush=True)
        print(line)
    return _report


def synth_experiment(mode, s, base_seed=0):
    return ExperimentConfig(
        dataset_kind="synthetic",
        synthetic=SyntheticConfig(n_bags=1000, q=5, d=10, mode=mode,
                                  n_test=1500, seed=base_seed),
        q=5, t=10, s=s,
        train=TrainConfig(),
        repetitions=5, base_seed=base_seed,
    )


@pytest.fixture(scope="module")
def random_s15000():
    return run_experiment(synth_experiment("random", 15000))


@pytest.fixture(scope="module")
def hard_s15000():
    return run_experiment(synth_experiment("hard", 15000))


@pytest.fixture(scope="module")
def random_s5000():
    return run_experiment(synth_experiment("random", 5000))


def test_criterion_1_table_reproduction(random_s15000, report):
    agg = random_s15000.aggregate()
    small, test = agg["small_pct"][0], agg["test_pct"][0]
    ok = small >= 85.0 and test >= 94.0
    report(1, ok, "random q=5 t=10 s=15000: small %.3f%% (>= 85), test %.3f%% (>= 94)"
           % (small, test))
    assert ok


def test_criterion_2_hard_vs_random(random_s15000, hard_s15000, report):
    rnd = random_s15000.aggregate()["small_pct"][0]
    hard = hard_s15000.aggregate()["small_pct"][0]
    gap = rnd - hard
    ok = gap >= 5.0
    report(2, ok, "small-bag accuracy random %.3f%% vs hard %.3f%%: gap %.3f (>= 5)"
           % (rnd, hard, gap))
    assert ok


def heart_schema():
    numeric = ["age", "trestbps", "chol", "thalach", "oldpeak"]
    categorical = ["sex", "cp", "fbs", "restecg", "exang", "slope", "ca", "thal"]
    order = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
             "thalach", "exang", "oldpeak", "slope", "ca", "thal", "num"]
    cols = []
    for name in order:
        if name == "num":
            cols.append(ColumnSpec(name, "target"))
        elif name in numeric:
            cols.append(ColumnSpec(name, "numeric"))
        else:
            assert name in categorical
            cols.append(ColumnSpec(name, "categorical"))
    return DatasetSchema(columns=cols, positive_values=("1", "2", "3", "4"),
                         has_header=False)


def test_criterion_3_heart_dataset(report):
    if not os.path.exists(HEART_PATH):
        report(3, False, "SKIPPED: heart data file not found at %s "
                         "(place the 303-row comma-separated Cleveland file there)"
               % os.path.abspath(HEART_PATH))
        pytest.skip("heart data file not available in this environment")
    cfg = ExperimentConfig(
        dataset_kind="tabular", tabular_path=HEART_PATH, schema=heart_schema(),
        test_fraction=0.15, q=5, t=10, s=10000,
        train=TrainConfig(), repetitions=5, base_seed=0,
    )
    rep = run_experiment(cfg)
    test = rep.aggregate()["test_pct"][0]
    ok = test >= 70.0
    report(3, ok, "heart q=5 t=10 s=10000: mean test accuracy %.3f%% (>= 70)" % test)
    assert ok


def test_criterion_4_monotonicity_in_s(random_s15000, random_s5000, report):
    hi = random_s15000.aggregate()["test_pct"][0]
    lo = random_s5000.aggregate()["test_pct"][0]
    ok = hi > lo
    report(4, ok, "test accuracy s=15000 %.3f%% vs s=5000 %.3f%%" % (hi, lo))
    assert ok


def test_criterion_5_mil_construction_exact(report):
    start = time.monotonic()
    cfg = CircleMILConfig(alpha=Fraction(3, 4), T=8)
    coll = gen_mil_circle_bags(cfg)
    ns = verify_mil_no_strong(coll)
    never_exceeds = ns.value <= 0.75 + 1e-12
    equals = abs(ns.value - 0.75) <= 1e-12

    rng = np.random.default_rng(0)
    weak_ok = verify_mil_weak_exists(coll, cfg).holds
    for _ in range(100):
        w = rng.random(len(coll))
        w /= w.sum()
        weak_ok = weak_ok and verify_mil_weak_exists(coll, cfg, weights=w,
                                                     n_dirs=180).holds
    menu = [constant_classifier(0), constant_classifier(1)]
    menu += [random_homogeneous_halfspace(2, rng) for _ in range(720)]
    adv = adversarial_weights(coll, menu_satisfaction(coll, menu))
    gap_ok = adv.duality_gap <= 1e-3
    weak_adv_ok = verify_mil_weak_exists(coll, cfg, weights=adv.weights).holds
    elapsed = time.monotonic() - start

    ok = equals and never_exceeds and weak_ok and gap_ok and weak_adv_ok \
        and elapsed <= 60.0
    report(5, ok, "exact optimum %.6f (criterion: == 0.75; true discrete optimum "
                  "at alpha=3/4, T=8 is 5/8 — the continuous 3/4 is an upper "
                  "bound only), <= 0.75 %s, weak bound 100 weightings %s, "
                  "adversarial gap %.2e %s, %.1f s"
           % (ns.value, never_exceeds, weak_ok, adv.duality_gap, gap_ok, elapsed))
    assert never_exceeds and weak_ok and gap_ok and weak_adv_ok
    assert elapsed <= 60.0
    # Unattainable as specified: the exhaustive search over all 2^16 arc
    # labelings shows the optimum is exactly 0.625, and a Fourier bound on
    # the continuous construction caps it near 0.68 for alpha=3/4; 3/4 is
    # approached only as alpha -> 1.  Asserted as stated, failing honestly.
    assert equals, ("no-strong optimum is %.6f, not 0.75; see the decisions "
                    "ledger for the analysis" % ns.value)


def test_criterion_6_trivial_accuracy(report):
    llp = gen_llp_maxcut_bags(MaxCutLLPConfig(alpha=0.75, epsilon=0.05, d=3,
                                              n_pairs=50, seed=0))
    tbl = InstanceTable(np.eye(4)[:, :2])
    mil = BagCollection((Bag((0, 1), 0, MIL), Bag((2, 3), 1, MIL)), tbl, MIL)
    v_llp = trivial_accuracy(llp)
    v_mil = trivial_accuracy(mil)
    ok = abs(v_llp - 0.5) <= 1e-3 and abs(v_mil - 0.5) <= 1e-3
    report(6, ok, "trivial accuracy LLP construction %.6f, MIL pair %.6f "
                  "(0.500 +- 1e-3)" % (v_llp, v_mil))
    assert ok


def test_criterion_7_error_amplification(report):
    from baglearn.datagen import gen_random_bags
    ds = gen_random_bags(SyntheticConfig(n_bags=50, q=5, d=10, n_test=10, seed=0))
    coll = ds.collection
    h = constant_classifier(0)
    zeta = 0.3
    assert accuracy(h, coll) < 1.0 - zeta
    rep = verify_error_amplification(h, coll, UnionConfig(t=64, c0=0.8), zeta=zeta,
                                     n_samples=10 ** 5,
                                     rng=np.random.default_rng(1))
    ok = rep.holds
    report(7, ok, "sat rate %.6f <= bound %.6f + 3 SE (zeta=0.3, t=64, C0=0.8)"
           % (rep.empirical_sat_rate, rep.bound))
    assert ok


def test_criterion_8_support_correctness(report):
    rng_tbl = np.random.default_rng(2)
    tbl = InstanceTable(rng_tbl.standard_normal((6, 2)))
    bags = tuple(Bag((2 * i, 2 * i + 1), 1, LLP) for i in range(3))
    coll = BagCollection(bags, tbl, LLP)
    t = 3
    entries = enumerate_support(coll, t)
    total = sum(e.weight for e in entries)
    sum_ok = abs(total - 1.0) <= 1e-9

    n = 10 ** 6
    rng = np.random.default_rng(3)
    counts = {}
    for _ in range(n):
        key = tuple(sorted(sample_union(coll, UnionConfig(t=t), rng).provenance))
        counts[key] = counts.get(key, 0) + 1
    worst = 0.0
    freq_ok = True
    for e in entries:
        key = tuple(sorted(e.union_bag.provenance))
        p = e.weight
        emp = counts.get(key, 0) / n
        se = math.sqrt(p * (1 - p) / n)
        dev = abs(emp - p) / se if se > 0 else 0.0
        worst = max(worst, dev)
        freq_ok = freq_ok and abs(emp - p) <= 3 * se
    ok = sum_ok and freq_ok
    report(8, ok, "m=3 t=3: %d support entries sum to %.12f, worst deviation "
                  "%.2f SE over 10^6 draws (<= 3)" % (len(entries), total, worst))
    assert ok


def test_criterion_9_a1_tiny_end_to_end(report):
    rng = np.random.default_rng(4)
    coords = rng.standard_normal((6, 2))
    truth = HalfspaceClassifier(np.array([0.8, -0.6]))
    labels = truth.predict(coords)
    bags = tuple(Bag((2 * i, 2 * i + 1), int(labels[2 * i] + labels[2 * i + 1]), LLP)
                 for i in range(3))
    coll = BagCollection(bags, InstanceTable(coords), LLP)
    res1 = algorithm_a1(coll, epsilon=0.3, alpha=0.9, oracle=brute_force_oracle(), t=4)
    res2 = algorithm_a1(coll, epsilon=0.3, alpha=0.9, oracle=brute_force_oracle(), t=4)
    acc = accuracy(res1.classifier, coll)
    optimum = brute_force_best_labeling(coll).achieved_accuracy
    deterministic = res1.classifier.labels == res2.classifier.labels
    ok = acc >= 0.7 and acc <= optimum + 1e-12 and deterministic
    report(9, ok, "A1 m=3 t=4: accuracy %.3f (>= 0.7), brute-force optimum %.3f, "
                  "deterministic %s" % (acc, optimum, deterministic))
    assert ok


def test_criterion_10_weighted_to_unweighted(report):
    rng = np.random.default_rng(5)
    worst = 0.0
    ok = True
    for trial in range(100):
        m = int(rng.integers(2, 9))
        tbl = InstanceTable(rng.standard_normal((2 * m, 3)))
        bags = tuple(Bag((2 * i, 2 * i + 1), int(rng.integers(0, 3)), LLP)
                     for i in range(m))
        w = rng.random(m)
        w /= w.sum()
        coll = BagCollection(bags, tbl, LLP, weights=w)
        classifiers = [HalfspaceClassifier(rng.standard_normal(3),
                                           float(rng.standard_normal()))
                       for _ in range(20)]
        for T in (2, 5, 10):
            out = weighted_to_unweighted(coll, T)
            ok = ok and (T - 1) * m <= len(out) <= T * m
            for h in classifiers:
                drift = abs(accuracy(h, out) - accuracy(h, coll))
                worst = max(worst, drift * (T - 1))
                ok = ok and drift <= 1.0 / (T - 1) + 1e-12
    report(10, ok, "100 collections x T in {2,5,10} x 20 classifiers: size in "
                   "[(T-1)m, Tm], worst drift x (T-1) = %.3f (<= 1)" % worst)
    assert ok


def test_criterion_11_property_suites(report):
    start = time.monotonic()
    # residual additivity (exact)
    rng = np.random.default_rng(6)
    tbl = InstanceTable(rng.standard_normal((8, 2)))
    h = ExplicitLabeling({i: int(v) for i, v in
                          enumerate(rng.integers(0, 2, size=8))})
    additive = True
    for _ in range(200):
        parts = [Bag(tuple(rng.integers(0, 8, size=int(rng.integers(1, 4)))),
                     int(rng.integers(0, 2)), LLP) for _ in range(3)]
        union = Bag(tuple(i for b in parts for i in b.members),
                    sum(b.agg_label for b in parts), LLP)
        additive = additive and (residual(h, union, tbl)
                                 == sum(residual(h, b, tbl) for b in parts))

    # gradient finite differences
    grad_ok = True
    for _ in range(30):
        d = int(rng.integers(2, 5))
        sizes = rng.integers(1, 5, size=3)
        coords = rng.standard_normal((int(sizes.sum()), d))
        seg = np.repeat(np.arange(3), sizes)
        sigmas = rng.integers(0, sizes + 1).astype(np.float64)
        w = rng.standard_normal(d) * 0.5
        b = float(rng.standard_normal() * 0.5)
        _, gw, gb = bag_mse_loss_grad(w, b, coords, seg, sigmas)
        step = 1e-5
        num = np.zeros(d)
        for k in range(d):
            wp, wm = w.copy(), w.copy()
            wp[k] += step
            wm[k] -= step
            num[k] = (bag_mse_loss_grad(wp, b, coords, seg, sigmas)[0]
                      - bag_mse_loss_grad(wm, b, coords, seg, sigmas)[0]) / (2 * step)
        scale = max(np.abs(np.append(gw, gb)).max(), 1e-8)
        grad_ok = grad_ok and np.abs(gw - num).max() / scale <= 1e-4

    # halfspace separation probability = angle / pi
    theta = 2 * math.pi / 3
    pts = np.array([[1.0, 0.0], [math.cos(theta), math.sin(theta)]])
    draws = 10 ** 4
    hits = 0
    for _ in range(draws):
        pred = random_homogeneous_halfspace(2, rng).predict(pts)
        hits += pred[0] != pred[1]
    target = theta / math.pi
    se = math.sqrt(target * (1 - target) / draws)
    sep_ok = abs(hits / draws - target) <= 3 * se

    # binomial kept-count chi-squared
    from scipy import stats
    pair_tbl = InstanceTable(rng.standard_normal((4, 2)))
    pair_coll = BagCollection((Bag((0, 1), 1, LLP), Bag((2, 3), 1, LLP)),
                              pair_tbl, LLP)
    t = 6
    kept = np.array([len(sample_union(pair_coll, UnionConfig(t=t), rng).provenance)
                     for _ in range(50000)])
    observed = np.bincount(kept, minlength=t + 1)
    expected = 50000 * np.array([math.comb(t, k) * 0.5 ** t for k in range(t + 1)])
    _, pvalue = stats.chisquare(observed, expected)
    chi_ok = pvalue > 0.01

    elapsed = time.monotonic() - start
    ok = additive and grad_ok and sep_ok and chi_ok and elapsed <= 600.0
    report(11, ok, "residual additivity %s, gradient FD %s, separation prob %s, "
                   "chi-squared p=%.3f %s, %.1f s (<= 600)"
           % (additive, grad_ok, sep_ok, pvalue, chi_ok, elapsed))
    assert ok
