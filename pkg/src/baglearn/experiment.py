"""Seeded experiment harness: small bags in, accuracy report out.

The small-bag collection and test split are built once from the base seed
and stay fixed across repetitions; each run i (1-based) re-samples the
large bags and re-trains with seed = base_seed + i, so any single run can
be re-executed in isolation.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import BagCollection, ParameterError, accuracy
from .datagen import (
    DatasetSchema,
    SyntheticConfig,
    gen_hard_bags,
    gen_random_bags,
    load_tabular,
    partition_into_bags,
    split_test,
)
from .oracles import TrainConfig, train_linear_sigmoid
from .union import UnionConfig, compute_t, sample_unions, unions_to_collection
from .weak_to_strong import compute_s


@dataclass
class ExperimentConfig:
    # dataset: synthetic ("random"/"hard") or tabular (path + schema)
    dataset_kind: str = "synthetic"
    synthetic: Optional[SyntheticConfig] = None
    tabular_path: Optional[str] = None
    schema: Optional[DatasetSchema] = None
    test_fraction: float = 0.15
    q: int = 5
    # exactly one of t / (epsilon, alpha, c0)
    t: Optional[int] = None
    epsilon: Optional[float] = None
    alpha: Optional[float] = None
    c0: Optional[float] = None
    # exactly one of s / (delta, vc_dim)
    s: Optional[int] = None
    delta: Optional[float] = None
    vc_dim: Optional[int] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    repetitions: int = 5
    base_seed: int = 0

    def resolved_t(self) -> int:
        has_derived = self.epsilon is not None or self.alpha is not None
        if (self.t is None) == (not has_derived):
            raise ParameterError("provide exactly one of t or (epsilon, alpha, c0)")
        if self.t is not None:
            return self.t
        if self.epsilon is None or self.alpha is None:
            raise ParameterError("deriving t requires both epsilon and alpha")
        return compute_t(self.epsilon, self.alpha,
                         self.c0 if self.c0 is not None else 0.8)

    def resolved_s(self, n_instances: int) -> int:
        if (self.s is None) == (self.delta is None):
            raise ParameterError("provide exactly one of s or delta")
        if self.s is not None:
            return self.s
        if self.alpha is None:
            raise ParameterError("deriving s requires alpha")
        return compute_s(n_instances, self.alpha, self.delta, self.vc_dim).s


@dataclass
class RunRow:
    run: int
    seed: int
    large_pct: float
    small_pct: float
    test_pct: float
    met_contract: Optional[bool]


@dataclass
class ExperimentReport:
    rows: list
    t: int
    s: int
    config: ExperimentConfig

    def _col(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def aggregate(self) -> dict:
        out = {}
        single = len(self.rows) == 1
        for name in ("large_pct", "small_pct", "test_pct"):
            vals = self._col(name)
            out[name] = (float(vals.mean()),
                         0.0 if single else float(vals.std(ddof=1)))
        out["single_run"] = single
        return out


def build_small_bags(cfg: ExperimentConfig):
    """Fixed small-bag collection plus labeled test instances."""
    if cfg.dataset_kind == "synthetic":
        syn = cfg.synthetic or SyntheticConfig(q=cfg.q, seed=cfg.base_seed)
        gen = gen_random_bags if syn.mode == "random" else gen_hard_bags
        data = gen(syn)
        return data.collection, data.test_coords, data.test_labels
    if cfg.dataset_kind == "tabular":
        if cfg.tabular_path is None or cfg.schema is None:
            raise ParameterError("tabular datasets need a path and a schema")
        coords, labels, _report = load_tabular(cfg.tabular_path, cfg.schema)
        rng = np.random.default_rng(cfg.base_seed)
        (tr_x, tr_y), (te_x, te_y) = split_test(coords, labels, cfg.test_fraction, rng)
        coll, _dropped = partition_into_bags(tr_x, tr_y, cfg.q, rng)
        return coll, te_x, te_y
    raise ParameterError("dataset_kind must be 'synthetic' or 'tabular'")


def run_single(coll: BagCollection, test_coords, test_labels,
               t: int, s: int, train: TrainConfig, seed: int,
               alpha: Optional[float] = None) -> RunRow:
    rng = np.random.default_rng(seed)
    unions = sample_unions(coll, UnionConfig(t=t), s, rng)
    large = unions_to_collection(unions, coll)
    tc = TrainConfig(learning_rate=train.learning_rate, batch_size=train.batch_size,
                     epochs=train.epochs, seed=seed, weight_init=train.weight_init)
    result = train_linear_sigmoid(large, tc, alpha=alpha)
    clf = result.classifier
    small_acc = accuracy(clf, coll)
    test_acc = float((clf.predict(test_coords) == test_labels).mean())
    return RunRow(run=0, seed=seed,
                  large_pct=100.0 * result.achieved_accuracy,
                  small_pct=100.0 * small_acc,
                  test_pct=100.0 * test_acc,
                  met_contract=result.met_contract)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    coll, test_coords, test_labels = build_small_bags(cfg)
    t = cfg.resolved_t()
    s = cfg.resolved_s(int(coll.distinct_instance_ids().size))
    rows = []
    for i in range(1, cfg.repetitions + 1):
        row = run_single(coll, test_coords, test_labels, t, s,
                         cfg.train, seed=cfg.base_seed + i, alpha=cfg.alpha)
        row.run = i
        rows.append(row)
    return ExperimentReport(rows=rows, t=t, s=s, config=cfg)


# ---------------------------------------------------------------------------
# report output: CSV rows plus a key: value summary

def format_rows_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write("run,seed,large_pct,small_pct,test_pct,met_contract\n")
    for r in report.rows:
        met = "" if r.met_contract is None else str(int(r.met_contract))
        buf.write("%d,%d,%.3f,%.3f,%.3f,%s\n"
                  % (r.run, r.seed, r.large_pct, r.small_pct, r.test_pct, met))
    return buf.getvalue()


def format_summary(report: ExperimentReport) -> str:
    agg = report.aggregate()
    lines = [
        "t: %d" % report.t,
        "s: %d" % report.s,
        "repetitions: %d" % len(report.rows),
        "base_seed: %d" % report.config.base_seed,
    ]
    for name, label in (("large_pct", "large_bag_accuracy"),
                        ("small_pct", "small_bag_accuracy"),
                        ("test_pct", "test_instance_accuracy")):
        mean, std = agg[name]
        lines.append("%s_mean: %.3f" % (label, mean))
        lines.append("%s_std: %.3f" % (label, std))
    if agg["single_run"]:
        lines.append("std_flag: single-run (std reported as 0)")
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, out_prefix: str) -> None:
    with open(out_prefix + ".csv", "w") as fh:
        fh.write(format_rows_csv(report))
    with open(out_prefix + ".summary.txt", "w") as fh:
        fh.write(format_summary(report))
