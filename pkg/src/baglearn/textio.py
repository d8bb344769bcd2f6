"""Line-oriented text formats for bag collections and classifiers.

Collection grammar (blank lines and ``#`` comment lines are ignored)::

    bags v1
    mode <llp|mil>
    d <dimension>
    m <number of bags>
    n <number of instances>
    instance <id> <coord> ... <coord>
    bag <sigma> <weight|-> <id> ... <id> [# prov <i,j,...>]

Weights print at 17 significant digits so round-trips are lossless.
Instance ground-truth labels are a training-time secret and are not
serialized.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import (
    Bag,
    BagCollection,
    DataError,
    HalfspaceClassifier,
    InstanceTable,
    LinearSigmoidClassifier,
    ExplicitLabeling,
    LLP,
    MIL,
)

_FMT = "%.17g"


def dump_collection(coll: BagCollection, provenance: Optional[list] = None) -> str:
    """Serialize a collection; optional per-bag provenance index tuples are
    recorded as trailing comments."""
    lines = ["bags v1",
             "mode %s" % coll.mode,
             "d %d" % coll.table.dim,
             "m %d" % len(coll),
             "n %d" % len(coll.table)]
    for i, row in enumerate(coll.table.coords):
        lines.append("instance %d %s" % (i, " ".join(_FMT % v for v in row)))
    weights = coll.weights
    for j, bag in enumerate(coll.bags):
        wtxt = _FMT % weights[j] if weights is not None else "-"
        line = "bag %d %s %s" % (bag.agg_label, wtxt,
                                 " ".join(str(i) for i in bag.members))
        if provenance is not None:
            line += " # prov %s" % ",".join(str(p) for p in provenance[j])
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def load_collection(text: str) -> BagCollection:
    header = {}
    coords = {}
    bags = []
    weights = []
    saw_unweighted = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "bags":
                if parts[1] != "v1":
                    raise DataError("unsupported format version %r" % parts[1])
            elif tag in ("mode", "d", "m", "n"):
                header[tag] = parts[1]
            elif tag == "instance":
                coords[int(parts[1])] = [float(v) for v in parts[2:]]
            elif tag == "bag":
                sigma = int(parts[1])
                if parts[2] == "-":
                    saw_unweighted = True
                else:
                    weights.append(float(parts[2]))
                bags.append((sigma, tuple(int(i) for i in parts[3:])))
            else:
                raise DataError("unknown record %r" % tag)
        except (IndexError, ValueError) as exc:
            raise DataError("line %d: %s" % (lineno, exc)) from exc

    for key in ("mode", "d", "m", "n"):
        if key not in header:
            raise DataError("missing header field %r" % key)
    mode = header["mode"]
    if mode not in (LLP, MIL):
        raise DataError("bad mode %r" % mode)
    n, m, d = int(header["n"]), int(header["m"]), int(header["d"])
    if len(coords) != n or set(coords) != set(range(n)):
        raise DataError("instance ids must be exactly 0..n-1")
    if len(bags) != m:
        raise DataError("expected %d bags, found %d" % (m, len(bags)))
    if saw_unweighted and weights:
        raise DataError("mixed weighted and unweighted bag lines")

    mat = np.zeros((n, d))
    for i in range(n):
        if len(coords[i]) != d:
            raise DataError("instance %d has wrong dimension" % i)
        mat[i] = coords[i]
    table = InstanceTable(mat)
    bag_objs = tuple(Bag(members=mem, agg_label=s, mode=mode) for s, mem in bags)
    w = np.array(weights) if weights else None
    return BagCollection(bags=bag_objs, table=table, mode=mode, weights=w)


def save_collection(coll: BagCollection, path, provenance=None) -> None:
    with open(path, "w") as fh:
        fh.write(dump_collection(coll, provenance))


def read_collection(path) -> BagCollection:
    with open(path) as fh:
        return load_collection(fh.read())


# ---------------------------------------------------------------------------
# classifier records

def dump_classifier(h) -> str:
    if isinstance(h, LinearSigmoidClassifier):
        return "classifier linear-sigmoid %d %s %s %s\n" % (
            h.w.size,
            " ".join(_FMT % v for v in h.w),
            _FMT % h.b,
            _FMT % h.threshold,
        )
    if isinstance(h, HalfspaceClassifier):
        return "classifier %s %d %s %s\n" % (
            h.kind,
            h.r.size,
            " ".join(_FMT % v for v in h.r),
            _FMT % h.c,
        )
    if isinstance(h, ExplicitLabeling):
        pairs = " ".join("%d:%d" % (k, v) for k, v in sorted(h.labels.items()))
        return "classifier explicit-labeling %d %s\n" % (len(h.labels), pairs)
    raise DataError("cannot serialize classifier of type %s" % type(h).__name__)


def load_classifier(text: str):
    parts = text.split()
    if len(parts) < 2 or parts[0] != "classifier":
        raise DataError("not a classifier record")
    kind = parts[1]
    if kind == "linear-sigmoid":
        d = int(parts[2])
        vals = [float(v) for v in parts[3:]]
        if len(vals) != d + 2:
            raise DataError("linear-sigmoid record has wrong length")
        return LinearSigmoidClassifier(w=vals[:d], b=vals[d], threshold=vals[d + 1])
    if kind in ("homogeneous-halfspace", "affine-halfspace"):
        d = int(parts[2])
        vals = [float(v) for v in parts[3:]]
        if len(vals) != d + 1:
            raise DataError("halfspace record has wrong length")
        return HalfspaceClassifier(r=vals[:d], c=vals[d])
    if kind == "explicit-labeling":
        count = int(parts[2])
        pairs = parts[3:]
        if len(pairs) != count:
            raise DataError("explicit-labeling record has wrong length")
        labels = {}
        for p in pairs:
            k, v = p.split(":")
            labels[int(k)] = int(v)
        return ExplicitLabeling(labels)
    raise DataError("unknown classifier kind %r" % kind)
