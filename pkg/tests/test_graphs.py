import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepscan.exact import (clique_number, components_without, connected_components, exact_central_vertex,
                           exact_separation_number, has_balanced_separator, is_chordal, is_tree,
                           max_component_after_removal, min_vertex_separator_size, separates,
                           treewidth_exact, weighted_max_component)
from sepscan.graphs import (Graph, clique, clique_planted, cycle_graph, disjoint_union, graph_from_spec, grid,
                            k_tree, parse_graph_spec, path_graph, random_bounded_degree_tree, random_tree,
                            star_graph, tree_plus_edges)


def to_nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges)
    return H


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def naive_sn(G: Graph) -> int:
    """Separation number straight from the definition (tiny graphs only)."""
    H = to_nx(G)
    for s in range(G.n):
        ok = True
        for size in range(s + 2, G.n + 1):
            for W in itertools.combinations(range(G.n), size):
                if not _has_split(H, W, s):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return s
    return G.n - 1


def _has_split(H, W, s):
    w = len(W)
    for j in range(s + 1):
        for S in itertools.combinations(W, j):
            rest = [v for v in W if v not in S]
            for r in range(1, len(rest)):
                for A in itertools.combinations(rest, r):
                    Ap = [v for v in rest if v not in A]
                    if 3 * max(len(A), len(Ap)) > 2 * w:
                        continue
                    if not any(H.has_edge(a, b) for a in A for b in Ap):
                        return True
    return False


def brute_separator(G: Graph, A, B) -> int:
    for s in range(G.n + 1):
        for S in itertools.combinations(range(G.n), s):
            if separates(G, S, A, B):
                return s


def has_induced_long_cycle(G: Graph) -> bool:
    H = to_nx(G)
    for size in range(4, G.n + 1):
        for sub in itertools.combinations(range(G.n), size):
            X = H.subgraph(sub)
            if nx.is_connected(X) and all(d == 2 for _, d in X.degree()):
                return True
    return False


class TestGraph:
    def test_normalizes_edges(self):
        G = Graph.from_edges(3, [(2, 0), (0, 2), (1, 2)])
        assert G.sorted_edges() == [(0, 2), (1, 2)]
        assert G.max_degree == 2

    @pytest.mark.parametrize("edges", [[(0, 0)], [(0, 3)], [(-1, 1)]])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(ValueError):
            Graph.from_edges(3, edges)

    def test_json_round_trip(self, tmp_path):
        G = random_tree(15, 3)
        G.save(tmp_path / "g.json")
        assert Graph.load(tmp_path / "g.json") == G

    def test_induced_relabels(self):
        G = path_graph(5).induced([4, 3, 1])
        assert G.sorted_edges() == [(0, 1)]


class TestGenerators:
    @pytest.mark.parametrize("seed", range(5))
    def test_random_tree(self, seed):
        assert is_tree(random_tree(10, seed))

    def test_random_tree_deterministic(self):
        assert random_tree(30, 9) == random_tree(30, 9)

    @pytest.mark.parametrize("seed", range(5))
    def test_bounded_degree_tree(self, seed):
        T = random_bounded_degree_tree(200, 3, seed)
        assert is_tree(T) and T.max_degree <= 3

    @pytest.mark.parametrize("seed", range(5))
    def test_tree_plus_edges(self, seed):
        G = tree_plus_edges(10, 1, seed)
        assert not is_tree(G) and G.num_edges == 10

    @pytest.mark.parametrize("seed", range(3))
    def test_k_tree_chordal(self, seed):
        G = k_tree(10, 2, seed)
        assert G.num_edges == 2 * 10 - 3
        assert not has_induced_long_cycle(G)
        assert is_chordal(G) and nx.is_chordal(to_nx(G))

    def test_clique_planted(self):
        G = clique_planted(20, 5, 1)
        assert clique_number(G) >= 5

    def test_grid_and_union(self):
        assert grid(3, 4).num_edges == 17
        G = disjoint_union([path_graph(3), cycle_graph(4)])
        assert G.n == 7 and len(connected_components(G)) == 2

    @pytest.mark.parametrize("bad", [lambda: cycle_graph(2), lambda: clique(0), lambda: k_tree(2, 2),
                                     lambda: tree_plus_edges(3, 5), lambda: clique_planted(5, 7)])
    def test_invalid_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestSpecParsing:
    def test_defaults(self):
        assert parse_graph_spec("tree_plus_edges:n=9") == ("tree_plus_edges", {"n": 9, "e": 1})

    @pytest.mark.parametrize("spec", ["nope:n=3", "tree", "tree:n=x", "tree:n=3,q=1", "grid:r=2"])
    def test_errors(self, spec):
        with pytest.raises(ValueError):
            parse_graph_spec(spec)

    def test_graph_from_spec(self):
        assert graph_from_spec("ktree:n=12,k=3", 4).n == 12


class TestComponents:
    def test_path(self):
        assert connected_components(path_graph(5)) == [[0, 1, 2, 3, 4]]

    def test_two_edges(self):
        assert len(connected_components(Graph.from_edges(4, [(0, 1), (2, 3)]))) == 2

    @pytest.mark.parametrize("seed", range(10))
    def test_agrees_with_union_find(self, seed):
        G = random_graph(10, 0.15, seed)
        W = [v for v in range(10) if v % 3]
        ours = {frozenset(b) for b in connected_components(G, W)}
        uf = nx.utils.UnionFind(range(10))
        for u, v in G.edges:
            uf.union(u, v)
        theirs = {frozenset(c) & frozenset(W) for c in uf.to_sets()} - {frozenset()}
        assert ours == theirs

    def test_is_tree_cases(self):
        assert is_tree(path_graph(5))
        assert not is_tree(cycle_graph(4))
        assert not is_tree(disjoint_union([path_graph(3), path_graph(3)]))


class TestCentrality:
    def test_max_component(self):
        assert max_component_after_removal(star_graph(6), 0) == 1
        assert max_component_after_removal(path_graph(5), 2) == 2
        assert max_component_after_removal(path_graph(5), 0) == 4

    def test_central_vertex(self):
        assert exact_central_vertex(path_graph(5)) == 2
        assert exact_central_vertex(star_graph(5)) == 0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 50), st.integers(0, 2 ** 32 - 1))
    def test_weighted_centroid_halves(self, n, seed):
        T = random_tree(n, seed)
        w = np.random.default_rng(seed).random(n).tolist()
        v = exact_central_vertex(T, w)
        assert weighted_max_component(T, v, w) <= sum(w) / 2 + 1e-12


class TestSeparationNumber:
    @pytest.mark.parametrize("seed", range(5))
    def test_trees(self, seed):
        assert exact_separation_number(random_tree(10, seed)) == 1

    @pytest.mark.parametrize("G,expected", [(clique(5), 4), (cycle_graph(6), 2), (clique(2), 1), (Graph(1), 0)])
    def test_known_values(self, G, expected):
        assert exact_separation_number(G) == expected

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_naive_definition(self, seed):
        G = random_graph(7, 0.4, seed)
        assert exact_separation_number(G) == naive_sn(G)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            exact_separation_number(path_graph(13))

    def test_balanced_separator_helper(self):
        assert has_balanced_separator(path_graph(5), range(5), 1)
        assert not has_balanced_separator(clique(4), range(4), 1)

    @pytest.mark.parametrize("seed", range(6))
    def test_treewidth_sandwich(self, seed):
        G = random_graph(9, 0.35, seed)
        sn, tw = exact_separation_number(G), treewidth_exact(G)
        assert sn <= tw + 1 <= 15 * max(sn, 1)

    @pytest.mark.parametrize("G,tw", [(path_graph(6), 1), (cycle_graph(7), 2), (clique(5), 4), (grid(3, 3), 3)])
    def test_treewidth_known(self, G, tw):
        assert treewidth_exact(G) == tw


class TestMenger:
    def test_path(self):
        assert min_vertex_separator_size(path_graph(3), [0], [2]) == 1

    def test_disconnected(self):
        G = disjoint_union([path_graph(3), path_graph(3)])
        assert min_vertex_separator_size(G, [0], [4]) == 0

    def test_grid_columns(self):
        assert min_vertex_separator_size(grid(3, 3), [0, 3, 6], [2, 5, 8]) == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_enumeration(self, seed):
        G = random_graph(8, 0.3, seed)
        rng = np.random.default_rng(seed)
        perm = rng.permutation(8).tolist()
        A, B = perm[:2], perm[2:4]
        got = min_vertex_separator_size(G, A, B)
        assert got == brute_separator(G, A, B)
        assert (got == 0) == (not any(nx.has_path(to_nx(G), a, b) for a in A for b in B))

    def test_components_without(self):
        assert components_without(path_graph(5), [2]) == [[0, 1], [3, 4]]
