"""Exact combinatorial oracles on ground-truth graphs.

These are verification aids: they see the whole graph and are only meant
for synthesis checks and for brute-force confirmation of tester verdicts.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from typing import Iterable, Sequence

from .graphs import Graph, Partition

SN_MAX_N = 12
TW_MAX_N = 10


def _bfs_labels(G: Graph, removed: frozenset[int] = frozenset()) -> list[int]:
    label = [-1] * G.n
    cur = 0
    for s in range(G.n):
        if s in removed or label[s] >= 0:
            continue
        label[s] = cur
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in G.adj[u]:
                if w not in removed and label[w] < 0:
                    label[w] = cur
                    queue.append(w)
        cur += 1
    return label


def connected_components(G: Graph, W: Iterable[int] | None = None) -> Partition:
    """Blocks ``C & W`` for the components ``C`` of ``G`` (``W`` defaults to all of V)."""
    labels = _bfs_labels(G)
    W = range(G.n) if W is None else W
    blocks: dict[int, list[int]] = {}
    for v in sorted(set(W)):
        blocks.setdefault(labels[v], []).append(v)
    return sorted(blocks.values(), key=lambda b: b[0])


def components_without(G: Graph, removed: Iterable[int]) -> Partition:
    """Connected components of ``G`` after deleting ``removed``."""
    removed = frozenset(removed)
    labels = _bfs_labels(G, removed)
    blocks: dict[int, list[int]] = {}
    for v in range(G.n):
        if v not in removed:
            blocks.setdefault(labels[v], []).append(v)
    return sorted(blocks.values(), key=lambda b: b[0])


def is_connected(G: Graph) -> bool:
    return G.n > 0 and len(connected_components(G)) == 1


def is_tree(G: Graph) -> bool:
    return is_connected(G) and G.num_edges == G.n - 1


def separates(G: Graph, S: Iterable[int], A: Iterable[int], B: Iterable[int]) -> bool:
    """True if every path from ``A`` to ``B`` meets ``S`` (S may overlap A or B)."""
    S = frozenset(S)
    labels = _bfs_labels(G, S)
    left = {labels[a] for a in A if a not in S}
    return not any(labels[b] in left for b in B if b not in S)


def max_component_after_removal(G: Graph, v: int) -> int:
    """Size of the largest component of ``G - v``."""
    return max((len(c) for c in components_without(G, [v])), default=0)


def weighted_max_component(G: Graph, v: int, weights: Sequence[float] | None = None) -> float:
    if weights is None:
        return float(max_component_after_removal(G, v))
    return max((sum(weights[u] for u in c) for c in components_without(G, [v])), default=0.0)


def exact_central_vertex(G: Graph, weights: Sequence[float] | None = None) -> int:
    """Vertex minimising the (weighted) largest component left after its removal."""
    if not is_connected(G):
        raise ValueError("graph must be connected")
    scores = [weighted_max_component(G, v, weights) for v in range(G.n)]
    best = min(scores)
    return scores.index(best)


def is_chordal(G: Graph) -> bool:
    """Maximum cardinality search followed by a perfect-elimination check."""
    weight = [0] * G.n
    pos = [-1] * G.n
    for i in range(G.n):
        v = max((u for u in range(G.n) if pos[u] < 0), key=lambda u: (weight[u], -u))
        pos[v] = i
        for u in G.adj[v]:
            if pos[u] < 0:
                weight[u] += 1
    for v in range(G.n):
        earlier = [u for u in G.adj[v] if pos[u] < pos[v]]
        if len(earlier) < 2:
            continue
        parent = max(earlier, key=lambda u: pos[u])
        if any(u != parent and u not in G.adj[parent] for u in earlier):
            return False
    return True


def clique_number(G: Graph) -> int:
    best = 1 if G.n else 0
    masks = G.masks

    def grow(cand: int, size: int):
        nonlocal best
        best = max(best, size)
        while cand:
            if size + cand.bit_count() <= best:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            grow(cand & masks[v], size + 1)

    grow((1 << G.n) - 1, 0)
    return best


# max-flow separator ---------------------------------------------------------

def min_vertex_separator_size(G: Graph, A: Iterable[int], B: Iterable[int]) -> int:
    """Smallest ``|S|`` such that ``S`` separates ``A`` from ``B`` (S may meet A and B).

    By Menger this is the maximum number of vertex-disjoint A-B paths; computed
    by unit-capacity augmenting paths on the split-vertex digraph. The value is
    always at most ``min(|A|, |B|)`` because ``A`` itself separates.
    """
    A, B = set(A), set(B)
    if not A or not B:
        return 0
    n = G.n
    src, snk = 2 * n, 2 * n + 1
    # residual capacities on arcs; vertex v -> in-node 2v, out-node 2v+1
    cap: dict[int, dict[int, int]] = {x: {} for x in range(2 * n + 2)}
    big = n + 1

    def arc(u, v, c):
        cap[u][v] = cap[u].get(v, 0) + c
        cap[v].setdefault(u, 0)

    for v in range(n):
        arc(2 * v, 2 * v + 1, 1)
    for u, v in G.edges:
        arc(2 * u + 1, 2 * v, big)
        arc(2 * v + 1, 2 * u, big)
    for a in A:
        arc(src, 2 * a, big)
    for b in B:
        arc(2 * b + 1, snk, big)

    flow = 0
    while True:
        parent = {src: None}
        queue = deque([src])
        while queue and snk not in parent:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if snk not in parent:
            return flow
        v = snk
        while parent[v] is not None:
            u = parent[v]
            cap[u][v] -= 1
            cap[v][u] += 1
            v = u
        flow += 1


# separation number ----------------------------------------------------------

def _neighbour_unions(masks: Sequence[int]) -> list[int]:
    n = len(masks)
    table = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & -m
        table[m] = table[m ^ low] | masks[low.bit_length() - 1]
    return table


def _component_sizes(X: int, nu: list[int]) -> list[int]:
    sizes = []
    rem = X
    while rem:
        comp = rem & -rem
        while True:
            grown = (comp | nu[comp]) & X
            if grown == comp:
                break
            comp = grown
        sizes.append(comp.bit_count())
        rem &= ~comp
    return sizes


def _balanced_split_exists(sizes: list[int], total: int, w: int) -> bool:
    """Can the components be grouped into two non-empty sides of size <= 2w/3?"""
    if len(sizes) < 2:
        return False
    limit = (2 * w) // 3
    lo, hi = max(1, total - limit), min(limit, total - 1)
    if lo > hi:
        return False
    reach = 1
    for c in sizes:
        reach |= reach << c
    window = ((1 << (hi + 1)) - 1) ^ ((1 << lo) - 1)
    return bool(reach & window)


def _has_small_separator(W: int, s: int, nu: list[int]) -> bool:
    bits = [v for v in range(W.bit_length()) if W >> v & 1]
    w = len(bits)
    for j in range(min(s, w - 2) + 1):
        for S in itertools.combinations(bits, j):
            smask = 0
            for v in S:
                smask |= 1 << v
            X = W & ~smask
            if _balanced_split_exists(_component_sizes(X, nu), w - j, w):
                return True
    return False


def has_balanced_separator(G: Graph, W: Iterable[int], s: int) -> bool:
    """Does ``W`` admit a (2/3, s)-separator inside the induced subgraph ``G_W``?"""
    mask = 0
    for v in W:
        mask |= 1 << v
    return _has_small_separator(mask, s, _neighbour_unions(G.masks))


def exact_separation_number(G: Graph, timeout: float | None = 120.0) -> int:
    """Separation number by exhaustive search over vertex subsets (n <= 12).

    ``sn(G) <= s`` iff every ``W`` with ``|W| >= s + 2`` splits into
    ``S, A, A'`` with ``|S| <= s``, both sides non-empty and at most
    ``2|W|/3``, and no edge of ``G_W`` between ``A`` and ``A'``.
    """
    n = G.n
    if n > SN_MAX_N:
        raise ValueError(f"exact separation number is limited to n <= {SN_MAX_N} (got {n})")
    if n <= 1:
        return 0
    deadline = None if timeout is None else time.monotonic() + timeout
    nu = _neighbour_unions(G.masks)
    subsets = sorted(range(1, 1 << n), key=lambda m: -m.bit_count())
    # sn(K_c) = c - 1 and sn is monotone under induced subgraphs
    s = max(0, clique_number(G) - 1)
    while True:
        ok = True
        for count, W in enumerate(subsets):
            if W.bit_count() < s + 2:
                break
            if deadline is not None and count % 256 == 0 and time.monotonic() > deadline:
                raise TimeoutError("exact separation number exceeded its time budget")
            if not _has_small_separator(W, s, nu):
                ok = False
                break
        if ok:
            return s
        s += 1


# treewidth ------------------------------------------------------------------

def treewidth_exact(G: Graph) -> int:
    """Exact treewidth by dynamic programming over elimination prefixes (n <= 10)."""
    n = G.n
    if n > TW_MAX_N:
        raise ValueError(f"exact treewidth is limited to n <= {TW_MAX_N} (got {n})")
    if n == 0:
        return -1
    masks = G.masks
    full = (1 << n) - 1

    def q_size(S: int, v: int) -> int:
        # vertices outside S+v reachable from v through S
        inside = S | (1 << v)
        comp = 1 << v
        while True:
            nb = 0
            m = comp
            while m:
                low = m & -m
                nb |= masks[low.bit_length() - 1]
                m ^= low
            grown = comp | (nb & inside)
            if grown == comp:
                break
            comp = grown
        border = nb & ~inside
        return border.bit_count()

    tw = {0: -1}
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            S = 0
            for v in combo:
                S |= 1 << v
            best = n
            for v in combo:
                rest = S ^ (1 << v)
                best = min(best, max(tw[rest], q_size(rest, v)))
            tw[S] = best
    return tw[full]
