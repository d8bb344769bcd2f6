"""Command-line front end.

Verbs: ``run`` (weak-to-strong experiment), ``verify`` (construction
property checks), ``convert`` (weighted -> unweighted collection),
``gen`` (emit a dataset/collection file).

Configuration comes from an optional YAML file (--config); every config
key used here can be overridden by a same-named flag.  Exit codes:
0 success, 2 configuration error, 3 data error, 4 training error,
5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np
import yaml

from . import constructions, textio
from .core import DataError, ParameterError, trivial_accuracy, weighted_to_unweighted
from .datagen import DatasetSchema, IngestionError, SyntheticConfig
from .experiment import ExperimentConfig, run_experiment, write_report
from .oracles import TrainConfig, TrainingError, random_homogeneous_halfspace
from .union import DEFAULT_C0

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAIN = 4
EXIT_VERIFY = 5


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        cfg = yaml.safe_load(fh) or {}
    if not isinstance(cfg, dict):
        raise ParameterError("config file must hold a mapping")
    return cfg


def _merged(cfg: dict, args, keys):
    """Flag values override config-file values; None flags fall through."""
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _experiment_config(cfg: dict) -> ExperimentConfig:
    ds = cfg.get("dataset", {})
    kind = ds.get("kind", "synthetic")
    q = int(cfg.get("q", ds.get("q", 5)))
    synthetic = None
    schema = None
    if kind == "synthetic":
        synthetic = SyntheticConfig(
            n_bags=int(ds.get("n_bags", 1000)),
            q=q,
            d=int(ds.get("d", 10)),
            mode=ds.get("mode", "random"),
            hard_pair_angle_slack=float(ds.get("hard_pair_angle_slack", 0.1)),
            n_test=int(ds.get("n_test", 1500)),
            seed=int(cfg.get("base_seed", 0)),
        )
    elif kind == "tabular":
        sc = ds.get("schema")
        if sc is None:
            raise ParameterError("tabular dataset requires a schema block")
        schema = DatasetSchema(
            columns=[tuple(c) for c in sc["columns"]],
            positive_values=tuple(sc.get("positive_values", (1, "1"))),
            delimiter=sc.get("delimiter", ","),
            has_header=bool(sc.get("has_header", True)),
        )
    tr = cfg.get("train", {})
    train = TrainConfig(
        learning_rate=float(tr.get("learning_rate", 1e-2)),
        batch_size=int(tr.get("batch_size", 512)),
        epochs=int(tr.get("epochs", 160)),
    )
    return ExperimentConfig(
        dataset_kind=kind,
        synthetic=synthetic,
        tabular_path=ds.get("path"),
        schema=schema,
        test_fraction=float(ds.get("test_fraction", 0.15)),
        q=q,
        t=None if cfg.get("t") is None else int(cfg["t"]),
        epsilon=None if cfg.get("epsilon") is None else float(cfg["epsilon"]),
        alpha=None if cfg.get("alpha") is None else float(cfg["alpha"]),
        c0=None if cfg.get("c0") is None else float(cfg["c0"]),
        s=None if cfg.get("s") is None else int(cfg["s"]),
        delta=None if cfg.get("delta") is None else float(cfg["delta"]),
        vc_dim=None if cfg.get("vc_dim") is None else int(cfg["vc_dim"]),
        train=train,
        repetitions=int(cfg.get("repetitions", 5)),
        base_seed=int(cfg.get("base_seed", 0)),
    )


def cmd_run(args) -> int:
    cfg = _merged(_load_config(args.config), args,
                  ("q", "t", "s", "epsilon", "alpha", "c0", "delta",
                   "repetitions", "base_seed"))
    expcfg = _experiment_config(cfg)
    report = run_experiment(expcfg)
    out = args.output or cfg.get("output", "report")
    write_report(report, out)
    agg = report.aggregate()
    for name, label in (("large_pct", "large"), ("small_pct", "small"),
                        ("test_pct", "test")):
        mean, std = agg[name]
        print("%s: %.3f +- %.3f" % (label, mean, std))
    print("report written to %s.csv / %s.summary.txt" % (out, out))
    return 0


def cmd_verify(args) -> int:
    failures = []
    if args.kind == "mil":
        cfg = constructions.CircleMILConfig(alpha=Fraction(args.alpha), T=args.T)
        coll = constructions.gen_mil_circle_bags(cfg)
        ns = constructions.verify_mil_no_strong(coll)
        print("no_strong_optimum: %.6f" % ns.value)
        print("no_strong_exact: %s" % ns.exact)
        if ns.value > 0.75 + 1e-12:
            failures.append("no-strong optimum exceeds 3/4")
        weak = constructions.verify_mil_weak_exists(coll, cfg)
        print("weak_best_accuracy: %.6f" % weak.best_accuracy)
        print("weak_bound: %.6f" % weak.bound)
        print("weak_exists_holds: %s" % weak.holds)
        if not weak.holds:
            failures.append("weak-classifier bound violated at uniform weights")
        menu = [constructions.constant_classifier(0),
                constructions.constant_classifier(1)]
        rng = np.random.default_rng(args.seed)
        menu += [random_homogeneous_halfspace(2, rng) for _ in range(args.n_dirs)]
        V = constructions.menu_satisfaction(coll, menu)
        adv = constructions.adversarial_weights(coll, V)
        print("adversarial_value: %.6f" % adv.value)
        print("adversarial_duality_gap: %.3e" % adv.duality_gap)
        weak_adv = constructions.verify_mil_weak_exists(coll, cfg, weights=adv.weights)
        print("weak_exists_adversarial_holds: %s" % weak_adv.holds)
        if not weak_adv.holds:
            failures.append("weak-classifier bound violated at adversarial weights")
        triv = trivial_accuracy(coll)
        print("trivial_accuracy: %.6f" % triv)
    elif args.kind == "llp":
        cfg = constructions.MaxCutLLPConfig(alpha=float(Fraction(args.alpha)),
                                            epsilon=args.epsilon, d=args.d,
                                            n_pairs=args.n_pairs, seed=args.seed)
        coll = constructions.gen_llp_maxcut_bags(cfg)
        rng = np.random.default_rng(args.seed + 1)
        accs = [constructions.accuracy(random_homogeneous_halfspace(cfg.d, rng), coll)
                for _ in range(args.halfspace_draws)]
        mean_acc = float(np.mean(accs))
        print("mean_halfspace_accuracy: %.6f" % mean_acc)
        if mean_acc < cfg.alpha - 0.02:
            failures.append("mean halfspace accuracy below alpha - 0.02")
        ns = constructions.verify_llp_no_strong(coll, budget=args.budget,
                                               rng=np.random.default_rng(args.seed + 2))
        print("best_labeling_value: %.6f" % ns.value)
        print("best_labeling_exact: %s" % ns.exact)
        triv = trivial_accuracy(coll)
        print("trivial_accuracy: %.6f" % triv)
    else:
        raise ParameterError("verify kind must be llp or mil")
    for msg in failures:
        print("FAIL: %s" % msg)
    return EXIT_VERIFY if failures else 0


def cmd_convert(args) -> int:
    coll = textio.read_collection(args.input)
    if not coll.is_weighted:
        raise ParameterError("convert expects a weighted input collection")
    out = weighted_to_unweighted(coll, args.T)
    textio.save_collection(out, args.output)
    print("bags: %d -> %d" % (len(coll), len(out)))
    print("accuracy drift bound 1/(T-1) = %.6g" % (1.0 / (args.T - 1)))
    return 0


def cmd_gen(args) -> int:
    if args.dataset in ("random", "hard"):
        syn = SyntheticConfig(n_bags=args.n_bags, q=args.q, d=args.d,
                              mode=args.dataset, seed=args.seed)
        from .datagen import gen_hard_bags, gen_random_bags
        gen = gen_random_bags if args.dataset == "random" else gen_hard_bags
        coll = gen(syn).collection
    elif args.dataset == "llp-construction":
        cfg = constructions.MaxCutLLPConfig(alpha=float(Fraction(args.alpha)),
                                            epsilon=args.epsilon, d=args.d,
                                            n_pairs=args.n_pairs, seed=args.seed)
        coll = constructions.gen_llp_maxcut_bags(cfg)
    elif args.dataset == "mil-construction":
        cfg = constructions.CircleMILConfig(alpha=Fraction(args.alpha), T=args.T)
        coll = constructions.gen_mil_circle_bags(cfg)
    else:
        raise ParameterError("unknown dataset %r" % args.dataset)
    textio.save_collection(coll, args.output)
    print("wrote %d bags over %d instances to %s"
          % (len(coll), len(coll.table), args.output))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="baglearn")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a weak-to-strong experiment")
    pr.add_argument("--config", help="YAML config file")
    pr.add_argument("--q", type=int)
    pr.add_argument("--t", type=int)
    pr.add_argument("--s", type=int)
    pr.add_argument("--epsilon", type=float)
    pr.add_argument("--alpha", type=float)
    pr.add_argument("--c0", type=float)
    pr.add_argument("--delta", type=float)
    pr.add_argument("--repetitions", type=int)
    pr.add_argument("--base-seed", dest="base_seed", type=int)
    pr.add_argument("--output")
    pr.set_defaults(func=cmd_run)

    pv = sub.add_parser("verify", help="verify a hardness construction")
    pv.add_argument("kind", choices=["llp", "mil"])
    pv.add_argument("--alpha", default="3/4", help="accuracy parameter (fraction ok)")
    pv.add_argument("--T", type=int, default=8, help="MIL: half the arc count")
    pv.add_argument("--epsilon", type=float, default=0.05, help="LLP slack")
    pv.add_argument("--d", type=int, default=4, help="LLP sphere dimension")
    pv.add_argument("--n-pairs", dest="n_pairs", type=int, default=8)
    pv.add_argument("--n-dirs", dest="n_dirs", type=int, default=720)
    pv.add_argument("--halfspace-draws", dest="halfspace_draws", type=int, default=2000)
    pv.add_argument("--budget", type=int, default=50, help="LLP local-search restarts")
    pv.add_argument("--seed", type=int, default=0)
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("convert", help="weighted -> unweighted collection")
    pc.add_argument("input")
    pc.add_argument("output")
    pc.add_argument("--T", type=int, required=True)
    pc.set_defaults(func=cmd_convert)

    pg = sub.add_parser("gen", help="emit a dataset/collection file")
    pg.add_argument("dataset",
                    choices=["random", "hard", "llp-construction", "mil-construction"])
    pg.add_argument("output")
    pg.add_argument("--n-bags", dest="n_bags", type=int, default=1000)
    pg.add_argument("--q", type=int, default=5)
    pg.add_argument("--d", type=int, default=10)
    pg.add_argument("--alpha", default="3/4")
    pg.add_argument("--epsilon", type=float, default=0.05)
    pg.add_argument("--n-pairs", dest="n_pairs", type=int, default=100)
    pg.add_argument("--T", type=int, default=8)
    pg.add_argument("--seed", type=int, default=0)
    pg.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, yaml.YAMLError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, IngestionError, OSError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    except TrainingError as exc:
        print("training error: %s" % exc, file=sys.stderr)
        return EXIT_TRAIN


if __name__ == "__main__":
    sys.exit(main())
