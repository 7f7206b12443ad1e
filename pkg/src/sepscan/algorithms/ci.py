"""Tree testing from conditional-independence queries only."""

from __future__ import annotations

import itertools

import numpy as np

from ..exact import is_tree
from ..graphs import Graph
from ..oracle import CIOracle
from .outcome import TestOutcome, TreeTestConfig
from .tree import run_tree_recursion


def ci_support_graph(ci: CIOracle, V: list[int]) -> Graph:
    """Graph on local indices of ``V``: ``ij`` is an edge iff no single vertex of ``V`` (or none) renders them independent."""
    edges = []
    for a, b in itertools.combinations(range(len(V)), 2):
        i, j = V[a], V[b]
        if ci.ci(i, j):
            continue
        if any(ci.ci(i, j, k) for k in V if k != i and k != j):
            continue
        edges.append((a, b))
    return Graph.from_edges(len(V), edges)


def ci_test_tree(ci: CIOracle, m: int | None = None, seed: int = 0, eps: float = 0.1) -> TestOutcome:
    """Tree tester whose component discovery uses ``ci(i, j | v)`` statements.

    ``queries`` in the outcome counts distinct CI statements.
    """
    m = TreeTestConfig(m=m, eps=eps).resolve_m(ci.n)
    rng = np.random.default_rng(seed)
    out = run_tree_recursion(ci.n, ci.view, lambda V: is_tree(ci_support_graph(ci, V)),
                             m, rng, lambda: ci.queries)
    out.info["query_unit"] = "ci"
    return out
