"""Undirected simple graphs on ``[0, n)``, generators and JSON IO."""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]
Partition = list[list[int]]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, frozenset((int(u), int(v)) for u, v in edges))

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Adjacency as bitmasks, for the brute-force oracles."""
        return tuple(sum(1 << u for u in nb) for nb in self.adj)

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph relabelled to ``0..len(vertices)-1`` in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        return Graph(len(pos), frozenset(
            (pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos))

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges | frozenset(extra))

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        return cls.from_edges(int(data["n"]), data["edges"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "Graph":
        return cls.from_dict(json.loads(Path(path).read_text()))


# generators -----------------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def clique(c: int) -> Graph:
    if c < 1:
        raise ValueError("clique size must be positive")
    return Graph.from_edges(c, itertools.combinations(range(c), 2))


def grid(r: int, c: int) -> Graph:
    if r < 1 or c < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for i in range(r):
        for j in range(c):
            v = i * c + j
            if j + 1 < c:
                edges.append((v, v + 1))
            if i + 1 < r:
                edges.append((v, v + c))
    return Graph.from_edges(r * c, edges)


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph.from_edges(offset, edges)


def random_tree(n: int, seed=None) -> Graph:
    """Uniform random labelled tree, decoded from a random Pruefer sequence."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Graph(1)
    if n == 2:
        return Graph.from_edges(2, [(0, 1)])
    rng = _rng(seed)
    seq = rng.integers(0, n, size=n - 2).tolist()
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Graph.from_edges(n, edges)


def random_bounded_degree_tree(n: int, max_degree: int = 3, seed=None) -> Graph:
    """Random recursive tree whose vertex degrees never exceed ``max_degree``."""
    if n < 1 or max_degree < 2:
        raise ValueError("need n >= 1 and max_degree >= 2")
    rng = _rng(seed)
    deg = np.zeros(n, dtype=int)
    open_ = [0]
    edges = []
    for v in range(1, n):
        i = int(rng.integers(len(open_)))
        u = open_[i]
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
        if deg[u] >= max_degree:
            open_[i] = open_[-1]
            open_.pop()
        open_.append(v)
    perm = rng.permutation(n)
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def tree_plus_edges(n: int, e: int, seed=None) -> Graph:
    """A uniform random tree with ``e`` extra edges added uniformly among non-edges."""
    if e < 0 or e > n * (n - 1) // 2 - (n - 1):
        raise ValueError(f"cannot add {e} edges to a tree on {n} vertices")
    rng = _rng(seed)
    t = random_tree(n, rng)
    edges = set(t.edges)
    while len(edges) < n - 1 + e:
        u, v = rng.choice(n, size=2, replace=False)
        edges.add((int(min(u, v)), int(max(u, v))))
    return Graph(n, frozenset(edges))


def k_tree(n: int, k: int, seed=None) -> Graph:
    """Random k-tree: a (k+1)-clique, then each new vertex joined to a random k-clique."""
    if k < 1 or n < k + 1:
        raise ValueError("need k >= 1 and n >= k + 1")
    rng = _rng(seed)
    edges = set(itertools.combinations(range(k + 1), 2))
    kcliques = [tuple(q) for q in itertools.combinations(range(k + 1), k)]
    for v in range(k + 1, n):
        q = kcliques[int(rng.integers(len(kcliques)))]
        edges.update((u, v) for u in q)
        for x in q:
            kcliques.append(tuple(sorted(set(q) - {x})) + (v,))
    perm = rng.permutation(n)
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def clique_planted(n: int, c: int, seed=None) -> Graph:
    """Random tree on ``n`` vertices with a clique planted on ``c`` random vertices."""
    if not 2 <= c <= n:
        raise ValueError("need 2 <= c <= n")
    rng = _rng(seed)
    t = random_tree(n, rng)
    members = sorted(int(x) for x in rng.choice(n, size=c, replace=False))
    return t.with_edges(itertools.combinations(members, 2))


FAMILIES = {
    "tree": (random_tree, ("n",)),
    "bdtree": (random_bounded_degree_tree, ("n", "d")),
    "tree_plus_edges": (tree_plus_edges, ("n", "e")),
    "ktree": (k_tree, ("n", "k")),
    "k_tree": (k_tree, ("n", "k")),
    "grid": (grid, ("r", "c")),
    "clique": (clique, ("c",)),
    "clique_planted": (clique_planted, ("n", "c")),
    "path": (path_graph, ("n",)),
    "cycle": (cycle_graph, ("n",)),
}

_DEFAULTS = {"bdtree": {"d": 3}, "tree_plus_edges": {"e": 1}}
_SEEDED = {"tree", "bdtree", "tree_plus_edges", "ktree", "k_tree", "clique_planted"}


def parse_graph_spec(spec: str) -> tuple[str, dict[str, int]]:
    """Parse ``family:key=value,...`` (e.g. ``ktree:n=50,k=2``)."""
    family, _, rest = spec.partition(":")
    family = family.strip()
    if family not in FAMILIES:
        raise ValueError(f"unknown graph family {family!r}; choose from {sorted(FAMILIES)}")
    params = dict(_DEFAULTS.get(family, {}))
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"malformed parameter {item!r} in graph spec")
        try:
            params[key.strip()] = int(val)
        except ValueError:
            raise ValueError(f"parameter {key!r} must be an integer") from None
    needed = FAMILIES[family][1]
    missing = [p for p in needed if p not in params]
    unknown = [p for p in params if p not in needed]
    if missing or unknown:
        raise ValueError(f"{family} expects parameters {needed}; missing {missing}, unknown {unknown}")
    return family, params


def graph_from_spec(spec: str, seed=None) -> Graph:
    family, params = parse_graph_spec(spec)
    fn, names = FAMILIES[family]
    args = [params[p] for p in names]
    if family in _SEEDED:
        return fn(*args, seed=seed)
    return fn(*args)
