from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from fsfw.graphs import (
    K2, ProductGraph, TreeGraph, WeightedGraph, bag_of, ball_size, build_ball, build_perfect_tree,
    complete_graph, cycle_graph, path_graph, perfect_tree_size, product,
)


def test_perfect_tree_d4_n2_has_13_vertices_and_root_degree_3():
    t = build_perfect_tree(4, 2)
    assert t.vertex_count == 13
    assert t.degree(t.root) == 3


def test_perfect_tree_height_zero_is_single_vertex():
    t = build_perfect_tree(3, 0)
    assert t.vertex_count == 1 and t.edge_count == 0


def test_perfect_tree_d3_n2_has_7_vertices():
    assert build_perfect_tree(3, 2).vertex_count == 7


def test_ball_sizes():
    assert build_ball(4, 2).vertex_count == 17
    assert build_ball(3, 0).vertex_count == 1
    assert build_ball(3, 3).vertex_count == 22


@pytest.mark.parametrize("builder", [build_perfect_tree, build_ball])
def test_tree_builders_reject_bad_parameters(builder):
    with pytest.raises(ValueError):
        builder(2, 3)
    with pytest.raises(ValueError):
        builder(3, -1)
    with pytest.raises(TypeError):
        builder(3.0, 1)


@pytest.mark.parametrize("d", [3, 4, 5])
@pytest.mark.parametrize("n", range(7))
def test_tree_sizes_match_geometric_sums(d, n):
    a = build_perfect_tree(d, n)
    b = build_ball(d, n)
    assert a.vertex_count == perfect_tree_size(d, n) == sum((d - 1) ** i for i in range(n + 1))
    assert b.vertex_count == ball_size(d, n)
    assert a.edge_count == a.vertex_count - 1
    assert b.edge_count == b.vertex_count - 1
    assert a.height == n and b.height == n


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_perfect_tree_degrees(d, n):
    t = build_perfect_tree(d, n)
    for v in range(t.vertex_count):
        kids = len(t.children[v])
        assert kids == (d - 1 if t.depth[v] < n else 0)
        if v != t.root and t.depth[v] < n:
            assert t.degree(v) == d


@pytest.mark.parametrize("d,n", [(3, 1), (3, 3), (4, 2), (5, 2)])
def test_ball_splits_into_perfect_trees_at_a_root_edge(d, n):
    ball = build_ball(d, n)
    child = ball.children[ball.root][0]
    h = nx.Graph()
    h.add_nodes_from(range(ball.vertex_count))
    h.add_edges_from((u, v) for u, v, _ in ball.edges if {u, v} != {ball.root, child})
    parts = sorted((len(c) for c in nx.connected_components(h)), reverse=True)
    assert parts == [perfect_tree_size(d, n), perfect_tree_size(d, n - 1)]
    big = max(nx.connected_components(h), key=len)
    small = min(nx.connected_components(h), key=len)
    assert nx.is_isomorphic(h.subgraph(big), _nx_tree(build_perfect_tree(d, n)))
    assert nx.is_isomorphic(h.subgraph(small), _nx_tree(build_perfect_tree(d, n - 1)))


def _nx_tree(t):
    h = nx.Graph()
    h.add_nodes_from(range(t.vertex_count))
    h.add_edges_from((u, v) for u, v, _ in t.edges)
    return h


def test_bfs_numbering_is_by_depth():
    t = build_ball(3, 3)
    assert list(t.depth) == sorted(t.depth)
    assert t.root == 0


def test_product_of_ball_and_k2():
    g = product(build_ball(3, 1), K2, Fraction(1))
    assert g.vertex_count == 8
    bag = [e for e in g.edges if g.bag_of(e[0]) == g.bag_of(e[1])]
    tree = [e for e in g.edges if g.bag_of(e[0]) != g.bag_of(e[1])]
    assert len(bag) == 4 and all(wt == 1 for *_, wt in bag)
    assert len(tree) == 6 and all(wt == 1 for *_, wt in tree)


def test_product_single_vertex_is_one_weighted_edge():
    g = product(build_ball(3, 0), K2, Fraction(5))
    assert g.edges == ((0, 1, Fraction(5)),)


def test_product_with_triangle_fiber():
    g = product(build_ball(3, 2), complete_graph(3), Fraction(2))
    assert g.vertex_count == 30
    for x in range(10):
        verts = list(g.bag(x))
        assert all(g.weight(a, b) == 2 for i, a in enumerate(verts) for b in verts[i + 1:])


def test_product_weights_scale_fiber_weights():
    fiber = WeightedGraph(3, [(0, 1, Fraction(3)), (1, 2, Fraction(1, 2))])
    g = product(build_perfect_tree(3, 1), fiber, Fraction(2))
    assert g.weight(g.vertex(1, 0), g.vertex(1, 1)) == 6
    assert g.weight(g.vertex(2, 1), g.vertex(2, 2)) == 1
    assert g.weight(g.vertex(0, 2), g.vertex(1, 2)) == 1


def test_product_rejects_bad_weight_and_disconnected_fiber():
    base = build_ball(3, 1)
    with pytest.raises(ValueError):
        product(base, K2, Fraction(0))
    with pytest.raises(ValueError):
        product(base, K2, -1.0)
    with pytest.raises(ValueError):
        product(base, WeightedGraph(3, [(0, 1, 1)]), 1.0)


def test_exact_and_float_substrates_do_not_mix():
    assert product(build_ball(3, 1), K2, Fraction(1, 2)).exact
    g = product(build_ball(3, 1), K2, 0.5)
    assert not g.exact
    assert all(isinstance(wt, float) for *_, wt in g.edges)
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 1, 1), (0, 1, 0.5)])
    with pytest.raises(ValueError):
        WeightedGraph(3, [(0, 1, 1), (1, 2, 0.5)])


def test_weighted_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 0, 1)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 1, 1), (1, 0, 2)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 2, 1)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 1, 0)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 1, float("nan"))])
    with pytest.raises(ValueError):
        WeightedGraph(0, [])


def test_bag_of_coordinates():
    g = product(build_ball(3, 2), K2, Fraction(1))
    for x in range(g.base.vertex_count):
        assert bag_of(g, g.vertex(x, 0)) == x == bag_of(g, g.vertex(x, 1))
    with pytest.raises(ValueError):
        g.bag_of(g.vertex_count)
    with pytest.raises(ValueError):
        g.vertex(0, 2)


def test_tree_path_and_parent_checks():
    t = build_ball(3, 2)
    leaf_a, leaf_b = 4, 9
    path = t.tree_path(leaf_a, leaf_b)
    assert path[0] == leaf_a and path[-1] == leaf_b
    assert all(t.has_edge(a, b) for a, b in zip(path, path[1:]))
    with pytest.raises(ValueError):
        TreeGraph([-1, -1])


def test_small_graph_builders():
    assert cycle_graph(4).edge_count == 4
    assert path_graph(4).edge_count == 3
    assert complete_graph(4).edge_count == 6
    assert K2.edge_count == 1


@given(d=st.integers(3, 5), n=st.integers(0, 3),
       fiber=st.sampled_from([K2, complete_graph(3), cycle_graph(4), path_graph(3)]),
       w=st.fractions(min_value=Fraction(1, 10), max_value=10))
def test_product_degree_is_tree_degree_plus_fiber_degree(d, n, fiber, w):
    base = build_ball(d, n)
    g = product(base, fiber, w)
    assert isinstance(g, ProductGraph)
    assert g.is_connected()
    for v in range(g.vertex_count):
        x, y = g.coords(v)
        assert g.degree(v) == base.degree(x) + fiber.degree(y)
