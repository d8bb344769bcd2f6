"""Synthetic bag generators and tabular dataset ingestion.

Synthetic data is realizable: a hidden homogeneous linear labeler provides
ground-truth labels, bags carry only the label sums, and the held-out test
set is drawn by picking a random member of a random training bag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from .core import (
    Bag,
    BagCollection,
    HalfspaceClassifier,
    InstanceTable,
    ParameterError,
    LLP,
)


class IngestionError(ValueError):
    """Unparseable or schema-violating tabular input."""


@dataclass
class SyntheticConfig:
    n_bags: int = 1000
    q: int = 5
    d: int = 10
    mode: str = "random"                 # "random" | "hard"
    hard_pair_angle_slack: float = 0.1   # radians
    n_test: int = 1500
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("random", "hard"):
            raise ParameterError("mode must be 'random' or 'hard'")
        if self.q < 1 or self.n_bags < 1 or self.d < 2:
            raise ParameterError("q, n_bags >= 1 and d >= 2 required")
        if self.mode == "hard" and self.q % 2 == 0:
            raise ParameterError("hard bags require odd q")


@dataclass
class SyntheticDataset:
    collection: BagCollection           # training bags, labels hidden
    labeler: HalfspaceClassifier        # the hidden ground-truth classifier
    test_coords: np.ndarray
    test_labels: np.ndarray


def _unit_rows(mat):
    return mat / np.linalg.norm(mat, axis=1, keepdims=True)


def _sphere_points(n, d, rng):
    return _unit_rows(rng.standard_normal((n, d)))


def _finish_dataset(coords, cfg, rng) -> SyntheticDataset:
    fstar = HalfspaceClassifier(r=_unit_rows(rng.standard_normal((1, cfg.d)))[0], c=0.0)
    labels = fstar.predict(coords)
    bags = []
    for j in range(cfg.n_bags):
        mem = tuple(range(j * cfg.q, (j + 1) * cfg.q))
        bags.append(Bag(members=mem, agg_label=int(labels[list(mem)].sum()), mode=LLP))
    coll = BagCollection(bags=tuple(bags), table=InstanceTable(coords), mode=LLP)
    # test instance = uniform member of a uniform training bag
    bag_idx = rng.integers(0, cfg.n_bags, size=cfg.n_test)
    mem_idx = rng.integers(0, cfg.q, size=cfg.n_test)
    test_ids = bag_idx * cfg.q + mem_idx
    return SyntheticDataset(collection=coll, labeler=fstar,
                            test_coords=coords[test_ids],
                            test_labels=labels[test_ids])


def gen_random_bags(cfg: SyntheticConfig,
                    rng: Optional[np.random.Generator] = None) -> SyntheticDataset:
    """Each bag is q uniform unit-sphere points."""
    if cfg.mode != "random":
        raise ParameterError("config mode must be 'random'")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    coords = _sphere_points(cfg.n_bags * cfg.q, cfg.d, rng)
    return _finish_dataset(coords, cfg, rng)


def _boundary_point(fstar_dir, d, rng):
    x = rng.standard_normal(d)
    x -= (x @ fstar_dir) * fstar_dir
    norm = np.linalg.norm(x)
    while norm < 1e-12:
        x = rng.standard_normal(d)
        x -= (x @ fstar_dir) * fstar_dir
        norm = np.linalg.norm(x)
    return x / norm


def gen_hard_bags(cfg: SyntheticConfig,
                  rng: Optional[np.random.Generator] = None) -> SyntheticDataset:
    """Bags of (q-1)/2 adversarial pairs plus one uniform point.

    A close pair straddles the labeler's boundary within the angle slack
    (opposite labels); an antipodal pair sits within the slack of being
    diametrically opposite while sharing a label.  Pair type is a fair coin.
    """
    if cfg.mode != "hard":
        raise ParameterError("config mode must be 'hard'")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    fstar_dir = _unit_rows(rng.standard_normal((1, cfg.d)))[0]
    eta = cfg.hard_pair_angle_slack
    n_pairs = (cfg.q - 1) // 2
    coords = np.zeros((cfg.n_bags * cfg.q, cfg.d))
    row = 0
    for _ in range(cfg.n_bags):
        for _ in range(n_pairs):
            b = _boundary_point(fstar_dir, cfg.d, rng)
            a1 = rng.uniform(0.0, eta / 2.0)
            a2 = rng.uniform(0.0, eta / 2.0)
            if rng.random() < 0.5:
                # close pair: both near b, opposite sides of the boundary
                x1 = math.cos(a1) * b + math.sin(a1) * fstar_dir
                x2 = math.cos(a2) * b - math.sin(a2) * fstar_dir
            else:
                # antipodal pair: near b and near -b, same side of the boundary
                side = 1.0 if rng.random() < 0.5 else -1.0
                x1 = math.cos(a1) * b + side * math.sin(a1) * fstar_dir
                x2 = -math.cos(a2) * b + side * math.sin(a2) * fstar_dir
            coords[row] = x1
            coords[row + 1] = x2
            row += 2
        coords[row] = _sphere_points(1, cfg.d, rng)[0]
        row += 1

    fstar = HalfspaceClassifier(r=fstar_dir, c=0.0)
    labels = fstar.predict(coords)
    bags = []
    for j in range(cfg.n_bags):
        mem = tuple(range(j * cfg.q, (j + 1) * cfg.q))
        bags.append(Bag(members=mem, agg_label=int(labels[list(mem)].sum()), mode=LLP))
    coll = BagCollection(bags=tuple(bags), table=InstanceTable(coords), mode=LLP)
    bag_idx = rng.integers(0, cfg.n_bags, size=cfg.n_test)
    mem_idx = rng.integers(0, cfg.q, size=cfg.n_test)
    test_ids = bag_idx * cfg.q + mem_idx
    return SyntheticDataset(collection=coll, labeler=fstar,
                            test_coords=coords[test_ids],
                            test_labels=labels[test_ids])


# ---------------------------------------------------------------------------
# tabular ingestion

@dataclass
class ColumnSpec:
    name: str
    kind: str  # "numeric" | "categorical" | "target"


@dataclass
class DatasetSchema:
    columns: list
    positive_values: tuple = (1, "1")  # raw target values mapped to label 1
    delimiter: str = ","
    has_header: bool = True
    missing_markers: tuple = ("?", "", "NA", "nan")

    def __post_init__(self):
        self.columns = [c if isinstance(c, ColumnSpec) else ColumnSpec(*c)
                        for c in self.columns]
        targets = [c for c in self.columns if c.kind == "target"]
        if len(targets) != 1:
            raise IngestionError("schema must declare exactly one target column")
        for c in self.columns:
            if c.kind not in ("numeric", "categorical", "target"):
                raise IngestionError("unknown column kind %r" % c.kind)


@dataclass
class IngestReport:
    rows_read: int
    rows_dropped: int
    feature_names: list = field(default_factory=list)


def load_tabular(path, schema: DatasetSchema):
    """Read a delimited file into (coords, labels, report).

    Numeric columns are normalized to zero mean / unit variance over the
    retained rows; categoricals are one-hot expanded in sorted category
    order; rows with missing values are dropped and counted.
    """
    names = [c.name for c in schema.columns]
    try:
        df = pd.read_csv(path, sep=schema.delimiter,
                         header=0 if schema.has_header else None,
                         names=None if schema.has_header else names,
                         na_values=list(schema.missing_markers),
                         skipinitialspace=True, dtype=str)
    except Exception as exc:
        raise IngestionError("cannot parse %s: %s" % (path, exc)) from exc
    missing_cols = [n for n in names if n not in df.columns]
    if missing_cols:
        raise IngestionError("columns missing from file: %s" % missing_cols)
    df = df[names]
    rows_read = len(df)
    if rows_read == 0:
        return np.zeros((0, 0)), np.zeros(0, np.int64), IngestReport(0, 0)

    df = df.replace({m: np.nan for m in schema.missing_markers})
    keep = ~df.isna().any(axis=1)
    dropped = int((~keep).sum())
    df = df[keep]
    if len(df) == 0:
        return np.zeros((0, 0)), np.zeros(0, np.int64), IngestReport(rows_read, dropped)

    target_col = next(c.name for c in schema.columns if c.kind == "target")
    pos = {str(v) for v in schema.positive_values}
    labels = df[target_col].astype(str).str.strip().isin(pos).astype(np.int64).to_numpy()

    blocks = []
    feature_names = []
    for c in schema.columns:
        if c.kind == "numeric":
            try:
                col = df[c.name].astype(np.float64).to_numpy()
            except ValueError:
                bad = df.index[pd.to_numeric(df[c.name], errors="coerce").isna()]
                raise IngestionError("non-numeric values in column %r at rows %s"
                                     % (c.name, list(bad[:10])))
            mu = col.mean()
            sd = col.std()
            blocks.append(((col - mu) / sd if sd > 0 else col - mu).reshape(-1, 1))
            feature_names.append(c.name)
        elif c.kind == "categorical":
            vals = df[c.name].astype(str).str.strip()
            cats = sorted(vals.unique())
            onehot = np.zeros((len(df), len(cats)))
            for k, cat in enumerate(cats):
                onehot[:, k] = (vals == cat).to_numpy()
            blocks.append(onehot)
            feature_names.extend("%s=%s" % (c.name, cat) for cat in cats)
    coords = np.hstack(blocks)
    return coords, labels, IngestReport(rows_read, dropped, feature_names)


def partition_into_bags(coords, labels, q: int,
                        rng: np.random.Generator) -> tuple[BagCollection, int]:
    """Random permutation, then consecutive q-blocks; the short final block
    is dropped.  Aggregate labels are the member label sums; the returned
    table carries no instance labels."""
    n = coords.shape[0]
    if q > n:
        raise ParameterError("bag size q exceeds table size")
    perm = rng.permutation(n)
    n_bags = n // q
    dropped = n - n_bags * q
    kept = perm[:n_bags * q]
    table = InstanceTable(coords[kept])
    labels_kept = np.asarray(labels)[kept]
    bags = []
    for j in range(n_bags):
        mem = tuple(range(j * q, (j + 1) * q))
        bags.append(Bag(members=mem, agg_label=int(labels_kept[list(mem)].sum()), mode=LLP))
    return BagCollection(bags=tuple(bags), table=table, mode=LLP), dropped


def split_test(coords, labels, fraction: float, rng: np.random.Generator):
    """Random test split of round-to-nearest (ties up) fraction of rows."""
    if not (0.0 < fraction < 1.0):
        raise ParameterError("fraction must be in (0, 1)")
    n = coords.shape[0]
    n_test = int(math.floor(n * fraction + 0.5))
    perm = rng.permutation(n)
    test_idx, train_idx = perm[:n_test], perm[n_test:]
    labels = np.asarray(labels)
    return ((coords[train_idx], labels[train_idx]),
            (coords[test_idx], labels[test_idx]))
