import random
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from scipy.spatial import ConvexHull

from flowtorus.digraph import (
    ExceptionalCycleRecord,
    TransitionGraph,
    cycle_class,
    direction_point,
    is_irreducible,
    recurrent_core,
    simple_cycles,
)
from flowtorus.errors import DimensionCapExceeded, EmptyRecurrentCore, NotSurjectiveOntoBaseHull, UnknownFace
from flowtorus.hull import (
    classify_face,
    direction_hull,
    elementary_currents,
    hull_of_points,
    polytope_projection,
    support_subgraph,
)
from helpers import complete_digraph, directed_cycle, figure_eight, graphs

F = Fraction


def gift_wrap(points):
    """Vertices of the planar convex hull by Jarvis march (collinear points dropped)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return set(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def dist(a, b):
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2

    hull = []
    start = pts[0]
    cur = start
    while True:
        hull.append(cur)
        cand = pts[0] if pts[0] != cur else pts[1]
        for p in pts:
            if p == cur:
                continue
            c = cross(cur, cand, p)
            if c < 0 or (c == 0 and dist(cur, p) > dist(cur, cand)):
                cand = p
        cur = cand
        if cur == start:
            break
    return set(hull)


def five_cycle_fixture() -> TransitionGraph:
    # two vertices, loops and a 2-cycle pair, labels in Z^2
    return TransitionGraph.build(2, [
        (0, 0, 1, (2, 0)),
        (0, 0, 1, (0, 0)),
        (1, 1, 1, (0, 2)),
        (0, 1, 1, (1, 1)),
        (1, 0, 1, (1, -1)),
        (1, 0, -1, (0, 0), 2),
    ])


def test_elementary_currents():
    (c,) = elementary_currents(directed_cycle(3))
    assert c.weights == {0: F(1, 3), 1: F(1, 3), 2: F(1, 3)}
    assert [c.weights for c in elementary_currents(figure_eight())] == [{0: 1}, {1: 1}]
    currents = elementary_currents(complete_digraph(3))
    assert len(currents) == 5
    assert all(c.is_balanced(complete_digraph(3)) for c in currents)


def test_direction_points():
    assert direction_point(TransitionGraph.build(1, [(0, 0, 1, (2, 0))]), [0]) == (2, 0)
    tri = directed_cycle(3, hvecs=[(1, 0), (0, 1), (0, 0)], b=2)
    assert direction_point(tri, [0, 1, 2]) == (F(1, 3), F(1, 3))
    m1 = cycle_class(tri, [0, 1, 2])
    m2 = cycle_class(tri, [0, 1, 2, 0, 1, 2])
    assert [F(x, m1.degree) for x in m1.vector] == [F(x, m2.degree) for x in m2.vector]


def test_figure_eight_segment():
    h = direction_hull(figure_eight())
    assert h.dim == 1
    assert sorted(h.vertex_point(v) for v in h.vertices) == [(0, 1), (1, 0)]
    assert len(h.faces) == 3


def test_single_loop_is_a_point():
    h = direction_hull(TransitionGraph.build(1, [(0, 0, 1, (1, 2))]))
    assert h.dim == 0 and len(h.faces) == 1 and h.vertices == [h.top]


def test_empty_core_and_dimension_cap():
    with pytest.raises(EmptyRecurrentCore):
        direction_hull(TransitionGraph.build(2, [(0, 1, 1, (1,))]))
    with pytest.raises(DimensionCapExceeded):
        direction_hull(TransitionGraph.build(1, [(0, 0, 1, (0,) * 9)]))


def test_fixture_hull_against_gift_wrapping():
    g = five_cycle_fixture()
    cycles = simple_cycles(g)
    assert len(cycles) == 5
    h = direction_hull(g)
    pts = [direction_point(g, c) for c in cycles]
    assert {h.vertex_point(v) for v in h.vertices} == gift_wrap(pts)


@pytest.mark.parametrize("seed", range(8))
def test_random_planar_hulls_against_gift_wrapping(seed):
    rng = random.Random(seed)
    pts = [(F(rng.randint(-6, 6), rng.randint(1, 3)), F(rng.randint(-6, 6), rng.randint(1, 3)))
           for _ in range(12)]
    h = hull_of_points(pts)
    if h.dim == 2:
        assert {h.vertex_point(v) for v in h.vertices} == gift_wrap(pts)


@pytest.mark.parametrize("seed", range(6))
def test_hull_facets_agree_with_qhull(seed):
    rng = np.random.default_rng(seed)
    d = 3 if seed % 2 else 4
    pts = [tuple(F(int(x)) for x in row) for row in rng.integers(-5, 6, size=(14, d))]
    h = hull_of_points(pts)
    qh = ConvexHull(np.array(pts, dtype=float))
    assert {tuple(np.array(h.vertex_point(v), dtype=float)) for v in h.vertices} == \
        {tuple(qh.points[i]) for i in qh.vertices}


def test_points_satisfy_every_facet_and_faces_are_tight_sets():
    h = direction_hull(five_cycle_fixture())
    for f in h.facets:
        for k, p in enumerate(h.points):
            assert f.value(p) >= 0
            assert (f.value(p) == 0) == (k in f.points)


def test_support_subgraphs():
    g = figure_eight()
    h = direction_hull(g)
    assert support_subgraph(h, h.top).edges == recurrent_core(g).edges
    loops = sorted(support_subgraph(h, v).edges for v in h.vertices)
    assert loops == [frozenset({0}), frozenset({1})]
    with pytest.raises(UnknownFace):
        support_subgraph(h, 99)


def test_edge_face_support_is_recurrent_union():
    g = five_cycle_fixture()
    h = direction_hull(g)
    cycles = simple_cycles(g)
    for f in h.faces:
        if f.dim != 1:
            continue
        on_face = [c for c in cycles if all(h.facets[i].value(direction_point(g, c)) == 0 for i in f.facets)]
        edges = set().union(*(c.edges for c in on_face))
        support = support_subgraph(h, f.index)
        assert support.edges == edges
        assert recurrent_core(support).edges == support.edges


def test_classification():
    g = TransitionGraph.build(2, [(0, 0, 1, (1, 0)), (0, 1, 1, (0, 1)), (1, 0, 1, (0, 0)), (1, 1, 1, (0, 0))])
    h = direction_hull(g)
    assert all(classify_face(h, f.index) == "purely_ordinary" for f in h.faces)
    rec = [ExceptionalCycleRecord.single([0], "SH_or_SV")]
    loop_face = h.minimal_face((1, 0))
    assert classify_face(h, loop_face, rec) == "purely_exceptional"
    assert classify_face(h, h.top, rec) == "mixed"


def test_projection_identity_and_single_coordinate():
    g = five_cycle_fixture()
    h = direction_hull(g)
    ident = [[1, 0], [0, 1]]
    pm = polytope_projection(h, ident, h)
    assert pm.preimage == {f.index: f.index for f in h.faces}
    line = polytope_projection(h, [[1, 0]])
    assert all(v is not None for v in line.preimage.values())


def test_projection_of_double_cover_onto_figure_eight():
    # lifts of loop u become a 2-cycle, the two lifts of v stay loops; labels
    # are already the base labels, so the projection is the identity matrix
    cover = TransitionGraph.build(2, [(0, 1, 1, (1, 0)), (1, 0, 1, (1, 0)), (0, 0, 1, (0, 1)), (1, 1, 1, (0, 1))])
    base = direction_hull(figure_eight())
    hc = direction_hull(cover)
    pm = polytope_projection(hc, [[1, 0], [0, 1]], base)
    for v in base.vertices:
        cf = pm.preimage[v]
        assert cf is not None
        assert {hc.points[k] for k in hc.faces[cf].points} == {base.vertex_point(v)}


def test_projection_warns_when_not_onto():
    base = direction_hull(figure_eight())
    single = direction_hull(TransitionGraph.build(1, [(0, 0, 1, (1, 0))]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        polytope_projection(single, [[1, 0], [0, 1]], base)
    assert any(issubclass(w.category, NotSurjectiveOntoBaseHull) for w in caught)


def test_hull_unchanged_by_repeated_points():
    pts = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]
    a = hull_of_points(pts)
    b = hull_of_points(pts + pts + [(F(1, 3), F(1, 3))])
    assert {a.vertex_point(v) for v in a.vertices} == {b.vertex_point(v) for v in b.vertices}


@given(graphs(max_vertices=3, max_edges=5))
def test_faces_are_monotone_in_support(g):
    if not recurrent_core(g).edges:
        return
    h = direction_hull(g)
    for f in h.faces:
        for sub in h.faces_below(f.index):
            assert support_subgraph(h, sub) <= support_subgraph(h, f.index)
    for v in h.vertices:
        assert h.faces[v].cycles


@given(graphs(max_vertices=3, max_edges=5))
def test_mixed_walk_directions_lie_in_hull(g):
    if not is_irreducible(g):
        return
    h = direction_hull(g)
    cycles = simple_cycles(g)
    es = g.edges
    for a in cycles:
        for c in cycles:
            shared = {es[i].source for i in a.edges} & {es[i].source for i in c.edges}
            if not shared:
                continue
            ma, mc = cycle_class(g, a), cycle_class(g, c)
            vec = [2 * x + 3 * y for x, y in zip(ma.vector, mc.vector)]
            deg = 2 * ma.degree + 3 * mc.degree
            assert h.contains([F(x, deg) for x in vec])
