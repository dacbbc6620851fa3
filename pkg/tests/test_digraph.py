from itertools import product

import pytest
from hypothesis import given

from flowtorus import caps
from flowtorus._exact import int_rank
from flowtorus.digraph import (
    ExceptionalCycleRecord,
    Monomial,
    TransitionGraph,
    canonical_abstract_labels,
    check_cycle,
    cycle_class,
    is_irreducible,
    recurrent_core,
    resolve_records,
    simple_cycles,
    strong_components,
    subgraph,
)
from flowtorus.errors import BadExceptionalReference, CycleCapExceeded, NotACycle, ParseError
from helpers import complete_digraph, directed_cycle, figure_eight, graphs


def brute_force_cycles(g: TransitionGraph, max_len: int) -> set[frozenset]:
    """Edge sets of vertex-simple cycles found by trying every edge sequence."""
    found = set()
    m = len(g.edges)
    for k in range(1, max_len + 1):
        for seq in product(range(m), repeat=k):
            es = [g.edges[i] for i in seq]
            if any(es[j].target != es[(j + 1) % k].source for j in range(k)):
                continue
            if len({e.source for e in es}) != k:
                continue
            found.add(frozenset(seq))
    return found


def test_loop_is_one_component():
    g = TransitionGraph.build(1, [(0, 0, 1, (1,))])
    comps = strong_components(g)
    assert len(comps) == 1 and comps[0].edges == {0}


def test_two_way_edges_form_one_component():
    g = TransitionGraph.build(2, [(0, 1, 1, ()), (1, 0, 1, ())])
    assert len(strong_components(g)) == 1


def test_path_has_singleton_components():
    g = TransitionGraph.build(3, [(0, 1, 1, ()), (1, 2, 1, ())])
    comps = strong_components(g)
    assert [sorted(c.vertices) for c in comps] == [[0], [1], [2]]
    assert all(not c.edges for c in comps)


def test_recurrent_core_examples():
    path = TransitionGraph.build(2, [(0, 1, 1, ())])
    assert not recurrent_core(path).edges
    tail = TransitionGraph.build(2, [(0, 0, 1, ()), (0, 1, 1, ())])
    assert recurrent_core(tail).edges == {0}
    k3 = complete_digraph(3)
    assert recurrent_core(k3).edges == k3.edge_ids


def test_irreducibility_examples():
    assert is_irreducible(complete_digraph(3))
    two_loops = TransitionGraph.build(2, [(0, 0, 1, ()), (1, 1, 1, ())])
    assert not is_irreducible(two_loops)
    assert not is_irreducible(TransitionGraph.build(1, []))


def test_cycle_counts():
    assert len(simple_cycles(figure_eight())) == 2
    assert len(simple_cycles(directed_cycle(3))) == 1
    cycles = simple_cycles(complete_digraph(3))
    assert sorted(len(c) for c in cycles) == [2, 2, 2, 3, 3]
    assert {frozenset(c.edges) for c in cycles} == brute_force_cycles(complete_digraph(3), 3)


def test_parallel_edges_give_distinct_cycles():
    g = TransitionGraph.build(2, [(0, 1, 1, ()), (0, 1, 1, ()), (1, 0, 1, ())])
    assert [c.edges for c in simple_cycles(g)] == [(0, 2), (1, 2)]


@given(graphs(max_vertices=3, max_edges=5))
def test_cycles_match_brute_force(g):
    cycles = simple_cycles(g)
    assert {frozenset(c.edges) for c in cycles} == brute_force_cycles(g, g.n_vertices)
    assert len({c.edges for c in cycles}) == len(cycles)


def test_cycle_cap():
    g = complete_digraph(5)
    with pytest.raises(CycleCapExceeded):
        simple_cycles(g, cap=10)
    caps.set_caps(cycles=3)
    try:
        with pytest.raises(CycleCapExceeded):
            simple_cycles(g)
    finally:
        caps.reset_caps()


def test_cycle_class_examples():
    loop = TransitionGraph.build(1, [(0, 0, 1, (1, 0))])
    assert cycle_class(loop, [0]) == Monomial(1, (1, 0))
    tri = directed_cycle(3, hvecs=[(1, 1), (0, -1), (-1, 0)], b=2)
    assert cycle_class(tri, [0, 1, 2]) == Monomial(3, (0, 0))
    g = TransitionGraph.build(2, [(0, 1, 1, (2, -1), 3), (1, 0, -1, (1, 4), 2), (1, 1, 1, (5, 5), 1)])
    hand = [sum(x) for x in zip((2, -1), (1, 4))]
    assert cycle_class(g, [0, 1]) == Monomial(5, tuple(hand))
    with pytest.raises(NotACycle):
        cycle_class(g, [0, 2, 0])


def test_check_cycle_rotates_and_rejects():
    g = directed_cycle(3)
    assert check_cycle(g, [1, 2, 0]).edges == (0, 1, 2)
    with pytest.raises(NotACycle):
        check_cycle(g, [0, 2])
    with pytest.raises(NotACycle):
        check_cycle(g, [7])


def test_abstract_labels_of_triangle():
    g = canonical_abstract_labels(directed_cycle(3, weights=[2, 5, 1]))
    assert g.b == 1
    assert sorted(e.hvec for e in g.edges) == [(0,), (0,), (1,)]
    assert all(e.weight == 1 for e in g.edges)


def test_abstract_labels_of_figure_eight():
    g = canonical_abstract_labels(figure_eight())
    assert [e.hvec for e in g.edges] == [(1, 0), (0, 1)]


@given(graphs(max_vertices=4, max_edges=6))
def test_abstract_classes_are_cycle_space_coordinates(g):
    a = canonical_abstract_labels(g)
    cycles = simple_cycles(a)
    classes = [cycle_class(a, c) for c in cycles]
    assert all(any(m.vector) for m in classes)
    supports = {}
    for c, m in zip(cycles, classes):
        assert m.degree == len(c)
        supports.setdefault(frozenset(c.edges), set()).add(m.vector)
    vectors = [next(iter(vs)) for vs in supports.values()]
    assert len(set(vectors)) == len(vectors)
    # rank of the class vectors equals the rank of the cycles' edge-incidence vectors
    incidence = [[1 if i in c.edges else 0 for i in range(len(g.edges))] for c in cycles]
    assert int_rank([list(m.vector) for m in classes]) == int_rank(incidence)


@given(graphs(max_vertices=4, max_edges=6))
def test_core_properties(g):
    core = recurrent_core(g)
    assert recurrent_core(core) == core
    covered = set()
    for c in simple_cycles(g):
        covered.update(c.edges)
    assert covered == core.edges
    if is_irreducible(g):
        assert core.edges == g.edge_ids


def test_graph_validation_collects_every_problem():
    with pytest.raises(ParseError) as err:
        TransitionGraph.build(1, [(0, 3, 1, (0,)), (0, 0, 2, (0, 1)), (0, 0, 1, (0,), 0)], b=1)
    msg = str(err.value)
    assert "edge 0" in msg and "edge 1" in msg and "edge 2" in msg


def test_subgraph_rejects_foreign_edges():
    with pytest.raises(ValueError):
        subgraph(figure_eight(), [5])


def test_exceptional_records_checked():
    g = TransitionGraph.build(1, [(0, 0, 1, (2,), 2), (0, 0, -1, (2,)), (0, 0, 1, (3,), 2)])
    assert resolve_records(g, [ExceptionalCycleRecord.single([0], "SH_or_SV", 2, 2)])
    with pytest.raises(BadExceptionalReference):  # sign -1
        resolve_records(g, [ExceptionalCycleRecord.single([1], "SH_or_SV")])
    with pytest.raises(BadExceptionalReference):  # class not divisible by po
        resolve_records(g, [ExceptionalCycleRecord.single([2], "corner", 4, 2)])
    with pytest.raises(BadExceptionalReference):  # edge used twice
        resolve_records(g, [ExceptionalCycleRecord.single([0], "SH_or_SV"),
                            ExceptionalCycleRecord.single([0], "mixed")])
    with pytest.raises(ParseError):
        ExceptionalCycleRecord.single([0], "corner", 3, 2)
    with pytest.raises(ParseError):
        ExceptionalCycleRecord.single([0], "unknown")
