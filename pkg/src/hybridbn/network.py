"""Bayesian networks: CPTs, JSON I/O, maximum-likelihood fitting, sampling.

CPTs are stored as arrays of shape (arity, q) where q is the product of the
parent arities; column j corresponds to the j-th parent configuration in
mixed-radix order over the parents sorted by variable index, last parent
fastest. Every column sums to 1 within 1e-9.
"""

import json
import math

import numpy as np

from .data import CategoricalDataset, DataError, nominal_config_codes
from .graphs import Dag, topological_order

_COLUMN_SUM_READ_TOL = 1e-6
_COLUMN_SUM_TOL = 1e-9


class BayesianNetwork:
    """A Dag plus per-node conditional probability tables and metadata."""

    __slots__ = ("graph", "names", "levels", "cpts")

    def __init__(self, graph, names, levels, cpts):
        self.graph = graph
        self.names = tuple(names)
        self.levels = tuple(tuple(lv) for lv in levels)
        self.cpts = [np.asarray(t, dtype=float) for t in cpts]
        self.validate()

    @property
    def d(self):
        return self.graph.d

    @property
    def arities(self):
        return tuple(len(lv) for lv in self.levels)

    def parent_arities(self, v):
        return [len(self.levels[p]) for p in self.graph.parents(v)]

    def validate(self):
        if not (len(self.names) == len(self.levels) == len(self.cpts) == self.d):
            raise DataError("variable metadata does not match the graph")
        for v in range(self.d):
            r = len(self.levels[v])
            if r < 2:
                raise DataError(f"variable {self.names[v]!r} needs at least 2 levels")
            q = math.prod(self.parent_arities(v))
            if self.cpts[v].shape != (r, q):
                raise DataError(
                    f"CPT of {self.names[v]!r} has shape {self.cpts[v].shape}, "
                    f"expected {(r, q)}"
                )
            sums = self.cpts[v].sum(axis=0)
            if np.any(np.abs(sums - 1.0) > _COLUMN_SUM_TOL):
                raise DataError(f"CPT column of {self.names[v]!r} does not sum to 1")
            if np.any(self.cpts[v] < 0):
                raise DataError(f"CPT of {self.names[v]!r} has negative entries")


def fit_cpts(dag, data, laplace=0.0):
    """Maximum-likelihood CPTs from data, with optional Laplace smoothing.

    With laplace = 0, parent configurations never observed get a uniform
    column (there is no evidence to prefer any level).
    """
    cpts = []
    for v in range(dag.d):
        r = data.arity(v)
        pa = list(dag.parents(v))
        pa_ar = [data.arity(p) for p in pa]
        q = math.prod(pa_ar)
        codes = nominal_config_codes(data.rows[:, pa], pa_ar)
        flat = data.rows[:, v].astype(np.int64) * q + codes
        counts = np.bincount(flat, minlength=r * q).reshape(r, q).astype(float)
        counts += laplace
        totals = counts.sum(axis=0)
        table = np.empty_like(counts)
        seen = totals > 0
        table[:, seen] = counts[:, seen] / totals[seen]
        table[:, ~seen] = 1.0 / r
        cpts.append(table)
    return BayesianNetwork(dag.copy(), data.names, data.levels, cpts)


def forward_sample(net, n, seed):
    """Ancestral sampling: one generator per dataset, consumed in
    (lexicographically smallest) topological node order, row order within."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    rows = np.zeros((n, net.d), dtype=np.int32)
    for v in topological_order(net.graph):
        u = rng.random(n)
        pa = list(net.graph.parents(v))
        codes = nominal_config_codes(rows[:, pa], [net.arities[p] for p in pa])
        cdf = np.cumsum(net.cpts[v], axis=0)
        levels = (u[:, None] > cdf[:, codes].T).sum(axis=1)
        rows[:, v] = np.minimum(levels, net.arities[v] - 1)
    return CategoricalDataset(net.names, net.levels, rows)


def write_network(net, path):
    """Serialize a network to the JSON schema (see README)."""
    doc = {
        "variables": [
            {"name": net.names[v], "levels": list(net.levels[v])}
            for v in range(net.d)
        ],
        "edges": [
            [net.names[u], net.names[v]] for u, v in net.graph.edges()
        ],
        "cpts": {
            net.names[v]: [float(x) for x in net.cpts[v].ravel(order="C")]
            for v in range(net.d)
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_network(path):
    """Parse and validate a network JSON file.

    Column sums are checked within 1e-6 and then renormalized exactly, so
    the in-memory invariant (1e-9) holds for every loaded network.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON in {path}: {exc}") from None
    for key in ("variables", "edges", "cpts"):
        if key not in doc:
            raise DataError(f"network file missing {key!r}")
    names = []
    levels = []
    for entry in doc["variables"]:
        if "name" not in entry or "levels" not in entry:
            raise DataError("variable entries need 'name' and 'levels'")
        if len(entry["levels"]) < 2:
            raise DataError(f"variable {entry['name']!r} needs at least 2 levels")
        names.append(str(entry["name"]))
        levels.append([str(t) for t in entry["levels"]])
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise DataError("duplicate variable names")
    dag = Dag(len(names))
    for pair in doc["edges"]:
        if len(pair) != 2 or pair[0] not in index or pair[1] not in index:
            raise DataError(f"bad edge {pair!r}")
        try:
            dag.add_edge(index[pair[0]], index[pair[1]])
        except ValueError as exc:
            raise DataError(str(exc)) from None
    cpts = []
    for v, name in enumerate(names):
        if name not in doc["cpts"]:
            raise DataError(f"missing CPT for {name!r}")
        r = len(levels[v])
        q = math.prod(len(levels[p]) for p in dag.parents(v))
        flat = np.asarray(doc["cpts"][name], dtype=float)
        if flat.size != r * q:
            raise DataError(
                f"CPT for {name!r} has {flat.size} entries, expected {r * q}"
            )
        table = flat.reshape(r, q)
        sums = table.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > _COLUMN_SUM_READ_TOL):
            raise DataError(f"CPT column of {name!r} does not sum to 1")
        if np.any(table < 0):
            raise DataError(f"CPT of {name!r} has negative entries")
        cpts.append(table / sums)
    return BayesianNetwork(dag, names, levels, cpts)
