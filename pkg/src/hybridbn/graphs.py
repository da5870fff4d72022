"""Directed graphs over integer node ids: DAGs, PDAGs, d-separation, DOT.

Two d-separation routines are provided: a Bayes-ball reachability query for
node pairs and a moralized-ancestral-graph query for node sets. They answer
the same question and the tests hold them to agreement.
"""

import heapq
from collections import deque
from dataclasses import dataclass


class Dag:
    """Directed acyclic graph; mutations validate acyclicity.

    Nodes are 0..d-1. Edges are held as parent and child sets per node so
    hill climbing can test moves quickly.
    """

    __slots__ = ("d", "_parents", "_children")

    def __init__(self, d, edges=()):
        if d < 0:
            raise ValueError("d must be non-negative")
        self.d = d
        self._parents = [set() for _ in range(d)]
        self._children = [set() for _ in range(d)]
        for u, v in edges:
            self.add_edge(u, v)

    def _check_node(self, v):
        if not 0 <= v < self.d:
            raise ValueError(f"node {v} out of range")

    def parents(self, v):
        return tuple(sorted(self._parents[v]))

    def children(self, v):
        return tuple(sorted(self._children[v]))

    def has_edge(self, u, v):
        return v in self._children[u]

    def adjacent(self, u, v):
        return v in self._children[u] or u in self._children[v]

    def edges(self):
        """Sorted list of directed edges (u, v)."""
        return sorted((u, v) for u in range(self.d) for v in self._children[u])

    def edge_count(self):
        return sum(len(c) for c in self._children)

    def has_path(self, a, b):
        """True iff a directed path a -> ... -> b exists (a == b counts)."""
        if a == b:
            return True
        seen = {a}
        stack = [a]
        while stack:
            u = stack.pop()
            for w in self._children[u]:
                if w == b:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def add_edge(self, u, v):
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError("self-loops are not allowed")
        if v in self._children[u]:
            raise ValueError(f"duplicate edge {u}->{v}")
        if self.has_path(v, u):
            raise ValueError(f"edge {u}->{v} would create a cycle")
        self._children[u].add(v)
        self._parents[v].add(u)

    def remove_edge(self, u, v):
        if v not in self._children[u]:
            raise ValueError(f"no edge {u}->{v}")
        self._children[u].remove(v)
        self._parents[v].remove(u)

    def reverse_edge(self, u, v):
        self.remove_edge(u, v)
        try:
            self.add_edge(v, u)
        except ValueError:
            self._children[u].add(v)
            self._parents[v].add(u)
            raise

    def copy(self):
        g = Dag(self.d)
        g._parents = [set(p) for p in self._parents]
        g._children = [set(c) for c in self._children]
        return g

    def __eq__(self, other):
        return (
            isinstance(other, Dag)
            and self.d == other.d
            and self._children == other._children
        )

    def __repr__(self):
        return f"Dag(d={self.d}, edges={self.edges()})"


def is_acyclic(d, edges):
    """True iff the candidate edge list over d nodes admits a topological order."""
    indeg = [0] * d
    children = [[] for _ in range(d)]
    for u, v in edges:
        children[u].append(v)
        indeg[v] += 1
    queue = deque(v for v in range(d) if indeg[v] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for w in children[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == d


def topological_order(g):
    """Lexicographically smallest topological order (deterministic)."""
    indeg = [len(g._parents[v]) for v in range(g.d)]
    heap = [v for v in range(g.d) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for w in sorted(g._children[u]):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != g.d:
        raise ValueError("graph is cyclic")
    return order


def ancestors(g, nodes):
    """All ancestors of the given nodes, including the nodes themselves."""
    anc = set(nodes)
    stack = list(anc)
    while stack:
        v = stack.pop()
        for p in g._parents[v]:
            if p not in anc:
                anc.add(p)
                stack.append(p)
    return anc


def d_separated(g, x, y, z):
    """Bayes-ball reachability: True iff every path between x and y is blocked.

    A path is blocked by z when some non-collider on it is in z, or some
    collider has neither itself nor any descendant in z.
    """
    z = frozenset(z)
    if x == y or x in z or y in z:
        raise ValueError("x, y must be distinct and disjoint from z")
    anc_z = ancestors(g, z)
    # states: (node, 1) reached moving up (from a child), (node, 0) moving down
    visited = set()
    queue = deque([(x, 1)])
    while queue:
        node, up = queue.popleft()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node == y:
            return False
        if up:
            if node not in z:
                for p in g._parents[node]:
                    queue.append((p, 1))
                for c in g._children[node]:
                    queue.append((c, 0))
        else:
            if node not in z:
                for c in g._children[node]:
                    queue.append((c, 0))
            if node in anc_z:
                for p in g._parents[node]:
                    queue.append((p, 1))
    return True


def d_separated_sets(g, xs, ys, z):
    """Moralized-ancestral-graph d-separation for node sets.

    True iff z separates xs from ys in the moral graph of the ancestral
    subgraph induced by xs, ys and z.
    """
    xs = frozenset(xs)
    ys = frozenset(ys)
    z = frozenset(z)
    if not xs or not ys:
        raise ValueError("xs and ys must be nonempty")
    if xs & ys or xs & z or ys & z:
        raise ValueError("xs, ys and z must be pairwise disjoint")
    keep = ancestors(g, xs | ys | z)
    adj = {v: set() for v in keep}
    for v in keep:
        pa = [p for p in g._parents[v] if p in keep]
        for p in pa:
            adj[p].add(v)
            adj[v].add(p)
        # marry co-parents
        for i in range(len(pa)):
            for j in range(i + 1, len(pa)):
                adj[pa[i]].add(pa[j])
                adj[pa[j]].add(pa[i])
    seen = set(xs)
    stack = [v for v in xs]
    while stack:
        v = stack.pop()
        if v in ys:
            return False
        for w in adj[v]:
            if w not in z and w not in seen:
                seen.add(w)
                stack.append(w)
    return True


@dataclass(frozen=True)
class MarkovSets:
    """Per-node pc (parents + children), sp (spouses) and mb (pc union sp)."""

    pc: tuple
    sp: tuple
    mb: tuple


def markov_sets(g):
    """Read pc, sp and mb for every node off the graph."""
    pc = [frozenset(g._parents[v] | g._children[v]) for v in range(g.d)]
    sp = []
    for v in range(g.d):
        s = set()
        for c in g._children[v]:
            s |= g._parents[c]
        s.discard(v)
        sp.append(frozenset(s))
    mb = [pc[v] | sp[v] for v in range(g.d)]
    return MarkovSets(pc=tuple(pc), sp=tuple(sp), mb=tuple(mb))


class Pdag:
    """Partially directed graph: disjoint directed and undirected edge sets."""

    __slots__ = ("d", "directed", "undirected")

    def __init__(self, d, directed=(), undirected=()):
        self.d = d
        self.directed = set()
        self.undirected = set()
        for u, v in directed:
            self.add_directed(u, v)
        for u, v in undirected:
            self.add_undirected(u, v)

    @staticmethod
    def _norm(u, v):
        return (u, v) if u < v else (v, u)

    def _check(self, u, v):
        if u == v:
            raise ValueError("self-loops are not allowed")
        if not (0 <= u < self.d and 0 <= v < self.d):
            raise ValueError("node out of range")

    def add_directed(self, u, v):
        self._check(u, v)
        if self.adjacent(u, v):
            raise ValueError(f"pair {u},{v} already adjacent")
        self.directed.add((u, v))

    def add_undirected(self, u, v):
        self._check(u, v)
        if self.adjacent(u, v):
            raise ValueError(f"pair {u},{v} already adjacent")
        self.undirected.add(self._norm(u, v))

    def adjacent(self, u, v):
        return (
            (u, v) in self.directed
            or (v, u) in self.directed
            or self._norm(u, v) in self.undirected
        )

    def orient(self, u, v):
        """Turn the undirected edge u-v into u->v."""
        key = self._norm(u, v)
        if key not in self.undirected:
            raise ValueError(f"no undirected edge {u}-{v}")
        self.undirected.remove(key)
        self.directed.add((u, v))

    def adjacency_pairs(self):
        pairs = set(self.undirected)
        pairs.update(self._norm(u, v) for u, v in self.directed)
        return pairs

    @classmethod
    def from_dag(cls, g):
        p = cls(g.d)
        for u, v in g.edges():
            p.add_directed(u, v)
        return p

    def copy(self):
        p = Pdag(self.d)
        p.directed = set(self.directed)
        p.undirected = set(self.undirected)
        return p

    def __eq__(self, other):
        return (
            isinstance(other, Pdag)
            and self.d == other.d
            and self.directed == other.directed
            and self.undirected == other.undirected
        )

    def __repr__(self):
        return (
            f"Pdag(d={self.d}, directed={sorted(self.directed)}, "
            f"undirected={sorted(self.undirected)})"
        )


def _quote(name):
    return '"' + str(name).replace('"', '\\"') + '"'


def to_dot(g, names=None):
    """Render a Dag or Pdag in DOT syntax; undirected edges get dir=none."""
    names = names or [str(v) for v in range(g.d)]
    lines = ["digraph G {"]
    for v in range(g.d):
        lines.append(f"  {_quote(names[v])};")
    if isinstance(g, Dag):
        directed = g.edges()
        undirected = []
    else:
        directed = sorted(g.directed)
        undirected = sorted(g.undirected)
    for u, v in directed:
        lines.append(f"  {_quote(names[u])} -> {_quote(names[v])};")
    for u, v in undirected:
        lines.append(f"  {_quote(names[u])} -> {_quote(names[v])} [dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
