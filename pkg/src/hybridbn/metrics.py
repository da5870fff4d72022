"""Structure-quality metrics: skeleton scores, CPDAG conversion, SHD,
train/test score reporting."""

import math
from dataclasses import dataclass
from itertools import combinations

from .graphs import Pdag
from .scoring import ScoreConfig, Scorer


@dataclass(frozen=True)
class SkeletonMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    fpr: float
    euclidean: float


def skeleton_metrics(learned, truth):
    """Edge-level precision, recall, false-positive rate and the Euclidean
    distance from perfect precision and recall.

    Precision of an empty output is 1 by convention: no discoveries means no
    false discoveries.
    """
    if learned.d != truth.d:
        raise ValueError("skeletons have different node sets")
    tp = len(learned.edges & truth.edges)
    fp = len(learned.edges - truth.edges)
    fn = len(truth.edges - learned.edges)
    precision = 1.0 if tp + fp == 0 else tp / (tp + fp)
    recall = 1.0 if tp + fn == 0 else tp / (tp + fn)
    non_edges = truth.d * (truth.d - 1) // 2 - len(truth.edges)
    fpr = 0.0 if non_edges == 0 else fp / non_edges
    euclidean = math.hypot(1.0 - precision, 1.0 - recall)
    return SkeletonMetrics(tp, fp, fn, precision, recall, fpr, euclidean)


def _orient(p, u, v):
    key = (u, v) if u < v else (v, u)
    if key in p.undirected:
        p.orient(u, v)
    elif (u, v) not in p.directed:
        raise AssertionError(f"conflicting orientation for {u}->{v}")


def _undirected_neighbors(p, v):
    out = set()
    for a, b in p.undirected:
        if a == v:
            out.add(b)
        elif b == v:
            out.add(a)
    return out


def _meek_orients(p, a, b):
    # True when one of Meek's rules orients the undirected edge a-b as a->b.
    dir_in_a = {u for u, w in p.directed if w == a}
    # R1: c -> a, c and b nonadjacent
    for c in dir_in_a:
        if not p.adjacent(c, b):
            return True
    # R2: a -> c -> b
    for c, w in p.directed:
        if c == a and (w, b) in p.directed:
            return True
    # R3: a - c -> b and a - d -> b with c, d nonadjacent
    und_a = _undirected_neighbors(p, a)
    into_b = {u for u, w in p.directed if w == b}
    spokes = sorted(und_a & into_b)
    for c, d in combinations(spokes, 2):
        if not p.adjacent(c, d):
            return True
    # R4: a - k and k -> l -> b with k and b nonadjacent
    for k in und_a:
        if p.adjacent(k, b):
            continue
        for kk, l in p.directed:
            if kk == k and (l, b) in p.directed:
                return True
    return False


def dag_to_cpdag(g):
    """The DAG pattern: compelled edges directed, reversible edges undirected.

    Orients the v-structures of g and closes under Meek's orientation rules.
    """
    p = Pdag(g.d)
    for u, v in g.edges():
        p.add_undirected(u, v)
    for w in range(g.d):
        for u, v in combinations(g.parents(w), 2):
            if not g.adjacent(u, v):
                _orient(p, u, w)
                _orient(p, v, w)
    changed = True
    while changed:
        changed = False
        for a, b in sorted(p.undirected):
            if _meek_orients(p, a, b):
                p.orient(a, b)
                changed = True
            elif _meek_orients(p, b, a):
                p.orient(b, a)
                changed = True
    return p


def _pair_status(p, u, v):
    # u < v assumed; None, "und", "uv" or "vu"
    if (u, v) in p.undirected:
        return "und"
    if (u, v) in p.directed:
        return "uv"
    if (v, u) in p.directed:
        return "vu"
    return None


def shd(a, b):
    """Structural Hamming distance between two PDAGs.

    One unit per node pair whose adjacency presence differs, and one unit
    per pair adjacent in both but with different orientation status
    (undirected vs directed, or directed opposite ways).
    """
    if a.d != b.d:
        raise ValueError("graphs have different node sets")
    total = 0
    for pair in a.adjacency_pairs() | b.adjacency_pairs():
        sa = _pair_status(a, *pair)
        sb = _pair_status(b, *pair)
        if sa != sb:
            total += 1
    return total


def holdout_scores(dag, train, test, cfg=None):
    """BDeu and BIC totals of a fixed structure on train and test data."""
    cfg = cfg or ScoreConfig()
    if train.names != test.names or train.arities != test.arities:
        raise ValueError("train and test datasets have mismatched variables")
    if dag.d != train.d:
        raise ValueError("structure does not cover the dataset's variables")
    out = {}
    for tag, ds in (("train", train), ("test", test)):
        bdeu = Scorer(ds, ScoreConfig(score="bdeu", ess=cfg.ess))
        bic = Scorer(ds, ScoreConfig(score="bic"))
        out[f"bdeu_{tag}"] = bdeu.total(dag)
        out[f"bic_{tag}"] = bic.total(dag)
    return out
