"""Tree testing by balanced vertex partitions."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..exact import is_tree
from ..graphs import Graph
from ..linalg import spd_inverse
from ..oracle import CondCovView, CovarianceOracle
from .components import components
from .outcome import TestOutcome, TraceEntry, TreeTestConfig, Verdict

BREAK = None


def direct_subgraph_check(Sigma_BB: np.ndarray, tol: float = 1e-7) -> Graph:
    """Support graph of ``(Σ_BB)^{-1}`` on local indices, thresholded on partial correlations."""
    K = spd_inverse(Sigma_BB)
    d = np.sqrt(np.diag(K))
    pc = np.abs(K) / np.outer(d, d)
    iu, ju = np.nonzero(np.triu(pc > tol, 1))
    return Graph.from_edges(len(K), zip(iu.tolist(), ju.tolist()))


def find_balanced_partition_tree(make_view: Callable[[int], object], V: Sequence[int], m: int,
                                 rng: np.random.Generator):
    """Pick a vertex whose removal splits a sample of ``V`` evenly.

    ``make_view(v)`` returns a dependence view of the residual graph ``G \\ v``.
    ``W`` of size ``min(m, |V|)`` is drawn without replacement and
    ``M̂(v) = |V| max_C |C ∩ W| / |W|`` is evaluated for every ``v``.
    Returns :data:`BREAK` (``None``) when ``min M̂ > |V|/2``, otherwise
    ``(v*, blocks, mhat)`` where ``blocks`` are the components of ``V \\ v*``.
    """
    V = sorted(int(v) for v in V)
    nV = len(V)
    W = np.sort(rng.choice(np.array(V), size=min(m, nV), replace=False))
    best_v, best = -1, np.inf
    for v in V:
        rest = W[W != v]
        if rest.size == 0:
            mhat = 0.0
        else:
            blocks = components(make_view(v), rest)
            mhat = nV * max(len(b) for b in blocks) / W.size
        if mhat < best:
            best_v, best = v, mhat
    if best > nV / 2:
        return BREAK
    blocks = components(make_view(best_v), [v for v in V if v != best_v])
    return best_v, blocks, best


def run_tree_recursion(n: int, make_view, direct_is_tree: Callable[[list[int]], bool],
                       m: int, rng: np.random.Generator, query_count: Callable[[], int]) -> TestOutcome:
    """Shared divide-and-conquer loop of the covariance and CI tree testers."""
    trace: list[TraceEntry] = []
    stack = [(list(range(n)), 0)]
    verdict = Verdict.IS_TREE
    depth = 0
    while stack:
        V, level = stack.pop()
        depth = max(depth, level + 1)
        if len(V) <= m:
            ok = direct_is_tree(V)
            trace.append(TraceEntry(tuple(V), (), [], level, "direct" if ok else "direct-fail"))
            if not ok:
                verdict = Verdict.NOT_TREE
                break
            continue
        res = find_balanced_partition_tree(make_view, V, m, rng)
        if res is BREAK:
            trace.append(TraceEntry(tuple(V), (), [], level, "break"))
            verdict = Verdict.NOT_TREE
            break
        v, blocks, _ = res
        trace.append(TraceEntry(tuple(V), (v,), [tuple(b) for b in blocks], level))
        for b in reversed(blocks):
            stack.append((sorted(b + [v]), level + 1))
    return TestOutcome(verdict, True, query_count(), trace, depth, {"m": m})


def test_tree(oracle: CovarianceOracle, cfg: TreeTestConfig | None = None) -> TestOutcome:
    """Decide whether the graph of Σ is a tree (Σ assumed 1-faithful to a connected graph).

    Components of size at most ``m`` are checked directly by inverting their
    covariance block; larger ones are split at a sampled balanced vertex and
    the pieces ``C ∪ {v*}`` are tested on their marginal blocks.
    """
    cfg = cfg or TreeTestConfig()
    m = cfg.resolve_m(oracle.n)
    rng = np.random.default_rng(cfg.seed)

    def make_view(v):
        return CondCovView(oracle, [v], cfg.zero_tol)

    def direct(V):
        return is_tree(direct_subgraph_check(oracle.block(V, V), cfg.direct_tol))

    return run_tree_recursion(oracle.n, make_view, direct, m, rng, lambda: oracle.queries)


test_tree.__test__ = False
