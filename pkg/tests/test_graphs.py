from __future__ import annotations

import itertools
import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynerg.graphs import (
    PRESETS,
    GraphError,
    LabeledGraph,
    automorphism_count,
    automorphisms,
    canonical_form,
    common_subgraph_patterns,
    copies_in_complete,
    edge_supported_subgraphs,
    falling_factorial,
    format_edge_list,
    graph_count_in_complete,
    graph_name,
    intersection,
    parse_edge_list,
    resolve_graph,
    subgraph_pattern_count,
    subgraph_patterns,
    union,
)

EDGE, WEDGE, TRIANGLE = PRESETS["edge"], PRESETS["wedge"], PRESETS["triangle"]


@st.composite
def small_graphs(draw, min_n=1, max_n=6, min_edges=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, len(pairs))) if pairs
                  else st.just([]))
    return LabeledGraph(range(1, n + 1), chosen)


def to_nx(g: LabeledGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges)
    return G


@pytest.mark.parametrize("name,expected", [
    ("edge", 2), ("wedge", 2), ("triangle", 6), ("path4", 2), ("cycle4", 8), ("K4", 24),
])
def test_preset_automorphisms(name, expected):
    assert automorphism_count(PRESETS[name]) == expected
    assert automorphism_count(canonical_form(PRESETS[name])) == expected


def test_subgraph_counts_of_small_presets():
    assert subgraph_pattern_count(WEDGE, canonical_form(EDGE)) == 2
    assert subgraph_pattern_count(TRIANGLE, canonical_form(EDGE)) == 3
    assert subgraph_pattern_count(TRIANGLE, canonical_form(WEDGE)) == 3
    assert subgraph_pattern_count(TRIANGLE, canonical_form(TRIANGLE)) == 1


def test_common_subgraphs_of_triangle():
    cs = common_subgraph_patterns(TRIANGLE, TRIANGLE)
    assert cs == {canonical_form(EDGE), canonical_form(WEDGE), canonical_form(TRIANGLE)}
    assert common_subgraph_patterns(WEDGE, TRIANGLE) == {canonical_form(EDGE), canonical_form(WEDGE)}


def test_pattern_names():
    assert str(canonical_form(LabeledGraph.from_edges([(4, 9), (9, 7), (4, 7)]))) == "triangle"
    assert graph_name(PRESETS["K4"]) == "K4"


def test_edgeless_graph_has_no_pattern():
    with pytest.raises(GraphError, match="edgeless"):
        canonical_form(LabeledGraph([1, 2, 3]))


def test_labels_must_be_positive():
    with pytest.raises(GraphError):
        LabeledGraph([0, 1], [(0, 1)])


def test_isolated_vertex_pattern_count():
    # one edge plus one isolated vertex inside the triangle: choose edge (3) then no free vertex
    H = TRIANGLE
    g = canonical_form(LabeledGraph([1, 2, 3], [(1, 2)]))
    assert g.has_isolated_vertices
    assert subgraph_pattern_count(H, g) == 3
    # in a 4-path: 3 edges, each with 2 free vertices
    g = canonical_form(LabeledGraph([1, 2, 3], [(1, 2)]))
    assert subgraph_pattern_count(PRESETS["path4"], g) == 6


@given(small_graphs(min_edges=1), st.randoms())
def test_canonical_form_is_relabeling_invariant(g, rnd):
    if g.n_edges == 0:
        return
    perm = list(range(1, g.n_vertices + 1))
    rnd.shuffle(perm)
    h = g.relabel({v: 10 + perm[i] for i, v in enumerate(g.vertices)})
    assert canonical_form(g) == canonical_form(h)


@given(small_graphs(min_edges=1), small_graphs(min_edges=1))
def test_canonical_form_separates_non_isomorphic(g, h):
    if g.n_edges == 0 or h.n_edges == 0:
        return
    same = nx.is_isomorphic(to_nx(g), to_nx(h))
    assert (canonical_form(g) == canonical_form(h)) == same


@given(small_graphs(max_n=6))
def test_automorphism_count_matches_brute_force(g):
    assert automorphism_count(g) == len(automorphisms(g))


@given(small_graphs(max_n=5, min_edges=1))
def test_subgraph_counts_sum_to_all_edge_subsets(g):
    if g.n_edges == 0:
        return
    # every nonempty edge subset on its support is counted exactly once
    total = sum(subgraph_pattern_count(g, p) for p in subgraph_patterns(g))
    assert total == 2 ** g.n_edges - 1


@given(small_graphs(max_n=5, min_edges=1), st.integers(1, 8))
def test_copies_in_complete_matches_formula(g, N):
    if g.n_edges == 0:
        return
    expected = len(copies_in_complete(g, range(1, N + 1))) if N >= g.n_vertices else 0
    assert graph_count_in_complete(g, N) == expected


def test_graph_count_examples():
    assert graph_count_in_complete(TRIANGLE, 10) == math.comb(10, 3)
    assert graph_count_in_complete(EDGE, 10) == 45
    assert graph_count_in_complete(WEDGE, 2) == 0
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(2, 3) == 0


def test_union_and_intersection():
    a = LabeledGraph.from_edges([(1, 2), (2, 3)])
    b = LabeledGraph.from_edges([(2, 3), (3, 4)])
    assert intersection(a, b).edges == {(2, 3)}
    assert union(a, b).n_edges == 3


def test_edge_supported_subgraphs_count():
    assert sum(1 for _ in edge_supported_subgraphs(PRESETS["K4"])) == 2 ** 6 - 1


def test_edge_list_round_trip():
    text = format_edge_list(PRESETS["cycle4"])
    assert parse_edge_list(text) == PRESETS["cycle4"]
    assert resolve_graph(text) == PRESETS["cycle4"]


def test_edge_list_file(tmp_path):
    p = tmp_path / "star.txt"
    p.write_text("V 4\n1 2\n1 3\n1 4  # centre 1\n")
    g = resolve_graph(str(p))
    assert g.n_vertices == 4 and g.n_edges == 3
    assert g.degree(1) == 3


@pytest.mark.parametrize("text", ["", "V 0", "W 3", "V 2\n1 3", "V 2\n1 2\n2 1", "V 3\n1"])
def test_bad_edge_lists(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


def test_unknown_graph_name():
    with pytest.raises(GraphError, match="unknown graph"):
        resolve_graph("pentagon-ish")
