"""Independent oracles and enumeration utilities shared by the tests.

Everything here is deliberately written from first principles (path
enumeration, covered-edge traversal, sequential Dirichlet predictive
products, high-precision integration) so that agreement with the package
is evidence, not tautology.
"""

import math
from itertools import combinations, product

import mpmath
import numpy as np

from hybridbn.graphs import Dag, Pdag, is_acyclic
from hybridbn.skeleton import Skeleton

mpmath.mp.dps = 30


# ---------------------------------------------------------------- graphs


def all_dags(d):
    """Every DAG on d labeled nodes, as a sorted tuple of directed edges."""
    pairs = list(combinations(range(d), 2))
    out = []
    for assignment in product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (u, v), a in zip(pairs, assignment):
            if a == 1:
                edges.append((u, v))
            elif a == 2:
                edges.append((v, u))
        if is_acyclic(d, edges):
            out.append(tuple(sorted(edges)))
    return out


def v_structures(d, edges):
    """Canonical v-structure triples (min-parent, child, max-parent)."""
    parents = {v: set() for v in range(d)}
    adjacent = set()
    for u, v in edges:
        parents[v].add(u)
        adjacent.add((min(u, v), max(u, v)))
    out = set()
    for w in range(d):
        for a, b in combinations(sorted(parents[w]), 2):
            if (min(a, b), max(a, b)) not in adjacent:
                out.add((a, w, b))
    return frozenset(out)


def equivalence_key(d, edges):
    skeleton = frozenset((min(u, v), max(u, v)) for u, v in edges)
    return skeleton, v_structures(d, edges)


def covered_edge_class(d, edges):
    """All members of the Markov-equivalence class of (d, edges).

    Traverses the class by reversing covered edges (u -> v is covered when
    pa(v) = pa(u) + {u}); Chickering's transformational characterization
    says this reaches exactly the equivalent DAGs.
    """
    start = frozenset(edges)
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        parents = {v: set() for v in range(d)}
        for u, v in cur:
            parents[v].add(u)
        for u, v in cur:
            if parents[v] == parents[u] | {u}:
                nxt = frozenset((cur - {(u, v)}) | {(v, u)})
                if nxt not in seen:
                    assert is_acyclic(d, nxt)
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def class_cpdag(d, members):
    """CPDAG of an equivalence class given all its members explicitly:
    orientations that vary across members become undirected edges."""
    any_member = next(iter(members))
    all_edges = {e for m in members for e in m}
    p = Pdag(d)
    for u, v in any_member:
        if (v, u) in all_edges:
            if not p.adjacent(u, v):
                p.add_undirected(u, v)
        else:
            p.add_directed(u, v)
    return p


_cpdag_memo = {}


def brute_force_cpdag(d, edges):
    """CPDAG by explicit class enumeration, memoized across class members."""
    key = (d, frozenset(edges))
    hit = _cpdag_memo.get(key)
    if hit is None:
        members = covered_edge_class(d, edges)
        hit = class_cpdag(d, members)
        for m in members:
            _cpdag_memo[(d, m)] = hit
    return hit


def descendants(d, edges, node):
    children = {v: set() for v in range(d)}
    for u, v in edges:
        children[u].add(v)
    out = set()
    stack = [node]
    while stack:
        cur = stack.pop()
        for w in children[cur]:
            if w not in out:
                out.add(w)
                stack.append(w)
    return out


def dsep_by_paths(g, x, y, z):
    """d-separation by enumerating all simple undirected paths.

    A path is open iff every interior collider is in z or has a descendant
    in z, and no interior non-collider is in z. Exponential; small graphs
    only.
    """
    d = g.d
    edges = set(g.edges())
    z = frozenset(z)
    neighbors = {v: set() for v in range(d)}
    for u, v in edges:
        neighbors[u].add(v)
        neighbors[v].add(u)
    unblocks = {m: bool(({m} | descendants(d, edges, m)) & z) for m in range(d)}

    def path_open(path):
        for i in range(1, len(path) - 1):
            a, m, b = path[i - 1], path[i], path[i + 1]
            collider = (a, m) in edges and (b, m) in edges
            if collider:
                if not unblocks[m]:
                    return False
            else:
                if m in z:
                    return False
        return True

    stack = [(x, [x])]
    while stack:
        node, path = stack.pop()
        if node == y:
            if path_open(path):
                return False
            continue
        for w in neighbors[node]:
            if w not in path:
                stack.append((w, path + [w]))
    return True


def true_skeleton(dag):
    return Skeleton(
        d=dag.d,
        edges=frozenset((min(u, v), max(u, v)) for u, v in dag.edges()),
    )


def random_pdag_pair(rng, d):
    from hybridbn.synthetic import random_pdag

    return random_pdag(d, rng), random_pdag(d, rng)


# ------------------------------------------------------------ statistics


def chi2_sf_oracle(x, dof):
    """Upper-tail chi-square probability by high-precision integration."""
    return float(mpmath.gammainc(mpmath.mpf(dof) / 2, a=mpmath.mpf(x) / 2,
                                 regularized=True))


def mi_brute(counts):
    """Conditional mutual information by explicit loops over the table."""
    counts = np.asarray(counts)
    r, c, l = counts.shape
    n = counts.sum()
    total = 0.0
    for k in range(l):
        stratum = counts[:, :, k]
        nk = stratum.sum()
        for i in range(r):
            for j in range(c):
                nij = stratum[i, j]
                if nij > 0:
                    total += nij * math.log(
                        nij * nk / (stratum[i, :].sum() * stratum[:, j].sum())
                    )
    return total / n


def tally_contingency(rows, x, y, z):
    """Brute-force dict tally of (X, Y, Z-config) triples."""
    strata = {}
    for row in rows:
        key = tuple(int(row[v]) for v in z)
        strata.setdefault(key, []).append((int(row[x]), int(row[y])))
    return strata


def dm_log_marginal(counts, alphas):
    """Dirichlet-multinomial log marginal likelihood, computed as the
    product of sequential predictive probabilities (no gamma functions)."""
    total = 0.0
    for cnt, a in zip(counts, alphas):
        for i in range(int(cnt)):
            total += math.log(a + i)
    a_sum = float(sum(alphas))
    for i in range(int(sum(counts))):
        total -= math.log(a_sum + i)
    return total


def bdeu_family_oracle(data, node, parents, ess):
    """BDeu local score built from the Dirichlet-multinomial oracle."""
    r = data.arity(node)
    parents = sorted(parents)
    q = 1
    for p in parents:
        q *= data.arity(p)
    strata = {}
    for row in data.rows:
        key = tuple(int(row[p]) for p in parents)
        strata.setdefault(key, [0] * r)[int(row[node])] += 1
    a_jk = ess / (q * r)
    return sum(dm_log_marginal(cells, [a_jk] * r) for cells in strata.values())


# ------------------------------------------------------- instrumentation


class RecordingSource:
    """IndependenceSource wrapper that records conditioning-set sizes."""

    def __init__(self, inner):
        self.inner = inner
        self.max_z = -1
        self.calls = 0

    @property
    def n_vars(self):
        return self.inner.n_vars

    def _note(self, z):
        self.calls += 1
        size = len(tuple(z))
        if size > self.max_z:
            self.max_z = size

    def independent(self, x, y, z=()):
        self._note(z)
        return self.inner.independent(x, y, z)

    def p_value(self, x, y, z=()):
        self._note(z)
        return self.inner.p_value(x, y, z)


# ------------------------------------------------------------ multilabel


def set_partitions(items):
    """All set partitions of a sequence (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def brute_min_partition(g, labels):
    """Finest partition of the labels into blocks that are d-separated from
    the remaining labels given all features; asserts uniqueness."""
    from hybridbn.graphs import d_separated_sets

    labels = sorted(labels)
    features = [v for v in range(g.d) if v not in set(labels)]

    def valid(partition):
        for block in partition:
            others = [y for y in labels if y not in set(block)]
            if others and not d_separated_sets(g, block, others, features):
                return False
        return True

    best = None
    for partition in set_partitions(labels):
        if valid(partition):
            if best is None or len(partition) > len(best):
                best = partition
    assert best is not None  # the one-block partition is always valid
    finest = sorted(tuple(sorted(b)) for b in best)
    ties = [
        p for p in set_partitions(labels)
        if len(p) == len(best) and valid(p)
    ]
    assert len(ties) == 1, f"finest valid partition is not unique: {ties}"
    return finest


def blanket_and_minimal(g, block, labels, boundary):
    """Check that a block boundary is a Markov blanket of the block in the
    true DAG (given the remaining features) and that no member is
    redundant, i.e. the boundary is minimal."""
    from hybridbn.graphs import d_separated_sets

    features = [v for v in range(g.d) if v not in set(labels)]
    boundary = sorted(boundary)
    rest = [v for v in features if v not in set(boundary)]
    if rest and not d_separated_sets(g, block, rest, boundary):
        return False
    for m in boundary:
        reduced = [v for v in boundary if v != m]
        other = rest + [m]
        if d_separated_sets(g, block, other, reduced):
            return False
    return True


def random_dataset(rng, d, n, max_arity=2):
    from hybridbn.data import CategoricalDataset

    arities = [int(rng.integers(2, max_arity + 1)) for _ in range(d)]
    rows = np.column_stack(
        [rng.integers(0, a, size=n, dtype=np.int32) for a in arities]
    )
    return CategoricalDataset.from_array(rows, arities=arities)


def dag_from_edges(d, edges):
    return Dag(d, edges)
