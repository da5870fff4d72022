"""Constraint-based local discovery and skeleton assembly.

The pipeline per target T: a parents-children superset via two elimination
phases with conditioning sets of size at most 1 (de_pcs), a spouse superset
with conditioning sets of size at most 2 (de_sps), then an FDR-controlled
parents-children estimate on the restricted universe {T} union PCS union
SPS (fdr_iapc on top of iamb_fdr), with a decentralized OR phase that
rescues false negatives (hpc). The whole-graph skeleton keeps edge {X, Y}
iff X is in hpc(Y) and Y is in hpc(X).

Iteration order over variables follows dataset column order everywhere;
with oracle sources the output is order-independent, with statistical
sources the order is the documented tie-break.
"""

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

from .data import DataError
from .independence import TestConfig


class IndependenceSource(Protocol):
    """What the discovery algorithms need from an independence backend."""

    @property
    def n_vars(self) -> int: ...

    def independent(self, x, y, z=()) -> bool: ...

    def p_value(self, x, y, z=()) -> float: ...


@dataclass(frozen=True)
class PcsResult:
    """Output of de_pcs: the superset and the recorded separating sets.

    dsep maps every removed variable to the set that separated it from the
    target (empty for Phase I, a singleton for Phase II).
    """

    pcs: frozenset
    dsep: dict


@dataclass(frozen=True)
class Skeleton:
    """Undirected structure over d nodes; pc sets are the edge neighborhoods."""

    d: int
    edges: frozenset
    pc: tuple = field(init=False)

    def __post_init__(self):
        edges = frozenset(
            (u, v) if u < v else (v, u) for u, v in self.edges
        )
        for u, v in edges:
            if u == v or not (0 <= u < self.d and 0 <= v < self.d):
                raise ValueError(f"bad skeleton edge ({u}, {v})")
        pc = [set() for _ in range(self.d)]
        for u, v in edges:
            pc[u].add(v)
            pc[v].add(u)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "pc", tuple(frozenset(s) for s in pc))

    def neighbors(self, v):
        return self.pc[v]


def de_pcs(target, src, universe):
    """Parents-children superset by elimination with |Z| <= 1.

    Phase I removes variables marginally independent of the target; Phase II
    removes X on the first surviving singleton Y with T independent of X
    given Y. Removed variables keep their separating set in dsep.
    """
    pcs = [v for v in sorted(universe) if v != target]
    dsep = {}
    for x in list(pcs):
        if src.independent(target, x, ()):
            pcs.remove(x)
            dsep[x] = frozenset()
    for x in list(pcs):
        for y in [w for w in pcs if w != x]:
            if src.independent(target, x, (y,)):
                pcs.remove(x)
                dsep[x] = frozenset((y,))
                break
    return PcsResult(pcs=frozenset(pcs), dsep=dsep)


def de_sps(target, src, universe, pcs, dsep):
    """Spouse superset with |Z| <= 2.

    For each X in pcs, the growing pass admits outside variables that become
    dependent on the target once X joins their separating set (collider
    activation); the shrinking pass drops Y on the first Z in the per-X set
    with T independent of Y given {X, Z}.
    """
    outside = [v for v in sorted(universe) if v != target and v not in pcs]
    sps = set()
    for x in sorted(pcs):
        local = []
        for y in outside:
            if not src.independent(target, y, tuple(sorted(dsep[y] | {x}))):
                local.append(y)
        for y in list(local):
            for z in [w for w in local if w != y]:
                if src.independent(target, y, tuple(sorted((x, z)))):
                    local.remove(y)
                    break
        sps.update(local)
    return frozenset(sps)


def _bh_significant(pvals, alpha):
    # Benjamini-Hochberg step-up: reject the nulls of the k most significant
    # entries where k is the largest rank with p_(k) <= alpha * k / m.
    m = len(pvals)
    if m == 0:
        return set()
    order = sorted(pvals, key=lambda t: (t[1], t[0]))
    kmax = 0
    for rank, (_, p) in enumerate(order, start=1):
        if p <= alpha * rank / m:
            kmax = rank
    return {v for v, _ in order[:kmax]}


def iamb_fdr(target, src, universe, alpha):
    """Markov-boundary estimate by grow/shrink with FDR control.

    Each sweep admits at most one candidate: the most significant one, and
    only if it survives a Benjamini-Hochberg step-up over all candidate
    p-values. Shrinking re-tests every member given the rest under the same
    criterion and drops the least significant failure, one at a time, until
    all members survive. Terminates when the boundary is stable (a
    visited-state guard stops grow/shrink oscillation on noisy input).
    """
    order = [v for v in sorted(universe) if v != target]
    mb = []
    seen_states = {frozenset()}
    while True:
        changed = False
        candidates = [v for v in order if v not in mb]
        if candidates:
            ps = [(v, src.p_value(target, v, tuple(mb))) for v in candidates]
            survivors = _bh_significant(ps, alpha)
            if survivors:
                best = min((p, v) for v, p in ps if v in survivors)[1]
                mb.append(best)
                changed = True
        while mb:
            ps = [
                (v, src.p_value(target, v, tuple(u for u in mb if u != v)))
                for v in mb
            ]
            survivors = _bh_significant(ps, alpha)
            failures = [(p, v) for v, p in ps if v not in survivors]
            if not failures:
                break
            mb.remove(max(failures)[1])
            changed = True
        state = frozenset(mb)
        if not changed or state in seen_states:
            return set(mb)
        seen_states.add(state)


def fdr_iapc(target, src, universe, alpha, max_condset=None):
    """Parents-children estimate: the Markov boundary minus its spouses.

    X is removed when some subset of the (fixed) boundary estimate,
    searched in ascending size up to max_condset, separates it from the
    target; the first separating subset wins.
    """
    mb = sorted(iamb_fdr(target, src, universe, alpha))
    pc = set(mb)
    for x in mb:
        others = [v for v in mb if v != x]
        cap = len(others) if max_condset is None else min(max_condset, len(others))
        separated = False
        for size in range(cap + 1):
            for zs in itertools.combinations(others, size):
                if src.independent(target, x, zs):
                    separated = True
                    break
            if separated:
                break
        if separated:
            pc.discard(x)
    return pc


def hpc(target, src, universe=None, cfg=None):
    """Hybrid parents-children discovery around one target.

    Filters the universe down to {T} union PCS union SPS, runs fdr_iapc
    there, then rescues each discarded PCS member X whose own fdr_iapc
    (within the same restricted universe) contains the target.
    """
    cfg = cfg or TestConfig()
    if universe is None:
        universe = range(src.n_vars)
    universe = sorted(universe)
    res = de_pcs(target, src, universe)
    sps = de_sps(target, src, universe, res.pcs, res.dsep)
    restricted = sorted({target} | res.pcs | sps)
    pc = fdr_iapc(target, src, restricted, cfg.alpha, cfg.max_condset)
    for x in sorted(res.pcs - pc):
        if target in fdr_iapc(x, src, restricted, cfg.alpha, cfg.max_condset):
            pc.add(x)
    return pc


def build_skeleton(src, cfg=None, jobs=1, universe=None):
    """Whole-graph skeleton: run hpc per node, keep mutual edges (AND rule).

    Per-target runs are independent; with jobs > 1 they execute in a thread
    pool. Outputs are reproducible regardless of schedule because every
    per-target result is deterministic.
    """
    cfg = cfg or TestConfig()
    nodes = sorted(universe if universe is not None else range(src.n_vars))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: hpc(t, src, nodes, cfg), nodes))
    else:
        results = [hpc(t, src, nodes, cfg) for t in nodes]
    hpcs = dict(zip(nodes, results))
    edges = set()
    for x in nodes:
        for y in hpcs[x]:
            if y > x and x in hpcs[y]:
                edges.add((x, y))
    return Skeleton(d=src.n_vars, edges=frozenset(edges))


def write_skeleton(skel, names, path):
    """Serialize a skeleton: node names, unordered edges, per-node pc sets."""
    names = list(names)
    if len(names) != skel.d:
        raise ValueError("names do not match the skeleton")
    doc = {
        "nodes": names,
        "edges": [[names[u], names[v]] for u, v in sorted(skel.edges)],
        "pc": {
            names[v]: [names[w] for w in sorted(skel.pc[v])] for v in range(skel.d)
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_skeleton(path):
    """Parse a skeleton JSON file; returns (Skeleton, names)."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON in {path}: {exc}") from None
    if "nodes" not in doc or "edges" not in doc:
        raise DataError("skeleton file needs 'nodes' and 'edges'")
    names = [str(t) for t in doc["nodes"]]
    index = {name: i for i, name in enumerate(names)}
    edges = set()
    for pair in doc["edges"]:
        if len(pair) != 2 or pair[0] not in index or pair[1] not in index:
            raise DataError(f"bad skeleton edge {pair!r}")
        u, v = index[pair[0]], index[pair[1]]
        edges.add((u, v) if u < v else (v, u))
    return Skeleton(d=len(names), edges=frozenset(edges)), names
