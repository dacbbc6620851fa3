"""Labeled transition graphs and their combinatorics.

A transition graph is a finite directed multigraph whose edges carry a sign
(+1 or -1), a homology label in Z^b and a positive integer weight.  A cycle
is a tuple of edge indices, rotated so that it starts at the edge leaving
its smallest vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, NamedTuple, Sequence, Union

from . import caps
from .errors import CycleCapExceeded, NotACycle, ParseError, ZeroDegree
from .laurent import GroupRingElement, Monomial


class Edge(NamedTuple):
    source: int
    target: int
    sign: int
    hvec: tuple[int, ...]
    weight: int


@dataclass(frozen=True)
class TransitionGraph:
    n_vertices: int
    edges: tuple[Edge, ...]
    b: int
    vertex_names: tuple[str, ...] | None = None

    def __post_init__(self):
        errors = graph_errors(self)
        if errors:
            raise ParseError("; ".join(errors))

    @classmethod
    def build(cls, n_vertices: int, edges: Iterable[Sequence], b: int | None = None,
              vertex_names: Sequence[str] | None = None) -> "TransitionGraph":
        """Build from tuples (source, target, sign, hvec, weight); weight defaults to 1."""
        out = []
        for e in edges:
            s, t, sign, hvec = e[0], e[1], e[2], tuple(int(x) for x in e[3])
            w = e[4] if len(e) > 4 else 1
            out.append(Edge(int(s), int(t), int(sign), hvec, int(w)))
        if b is None:
            b = len(out[0].hvec) if out else 0
        return cls(n_vertices, tuple(out), b, tuple(vertex_names) if vertex_names else None)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(range(self.n_vertices))

    @property
    def edge_ids(self) -> frozenset[int]:
        return frozenset(range(len(self.edges)))

    def name(self, v: int) -> str:
        return self.vertex_names[v] if self.vertex_names else str(v)


def graph_errors(g: TransitionGraph) -> list[str]:
    """Every structural problem of ``g``, not just the first."""
    errors = []
    if g.n_vertices < 0:
        errors.append("negative vertex count")
    if g.vertex_names is not None and len(g.vertex_names) != g.n_vertices:
        errors.append("vertex_names has the wrong length")
    for i, e in enumerate(g.edges):
        if not (0 <= e.source < g.n_vertices and 0 <= e.target < g.n_vertices):
            errors.append(f"edge {i}: endpoint out of range")
        if e.sign not in (1, -1):
            errors.append(f"edge {i}: sign must be +1 or -1, got {e.sign}")
        if len(e.hvec) != g.b:
            errors.append(f"edge {i}: homology label has length {len(e.hvec)}, expected {g.b}")
        if not isinstance(e.weight, int) or e.weight < 1:
            errors.append(f"edge {i}: weight must be a positive integer, got {e.weight}")
    return errors


@dataclass(frozen=True)
class Subgraph:
    """Edge subset of a parent graph together with a vertex subset containing its endpoints."""

    graph: TransitionGraph
    vertices: frozenset[int]
    edges: frozenset[int]

    def __post_init__(self):
        for i in self.edges:
            e = self.graph.edges[i]
            if e.source not in self.vertices or e.target not in self.vertices:
                raise ValueError(f"edge {i} leaves the vertex subset")

    @property
    def b(self) -> int:
        return self.graph.b

    def __le__(self, other: "Subgraph") -> bool:
        return self.edges <= other.edges and self.vertices <= other.vertices

    def __and__(self, other: "Subgraph") -> "Subgraph":
        return Subgraph(self.graph, self.vertices & other.vertices, self.edges & other.edges)


GraphLike = Union[TransitionGraph, Subgraph]


def as_subgraph(g: GraphLike) -> Subgraph:
    if isinstance(g, Subgraph):
        return g
    return Subgraph(g, g.vertices, g.edge_ids)


def subgraph(g: GraphLike, edges: Iterable[int], vertices: Iterable[int] | None = None) -> Subgraph:
    """Subgraph on ``edges``; vertices default to the edge endpoints."""
    parent = as_subgraph(g)
    edges = frozenset(edges)
    if not edges <= parent.edges:
        raise ValueError("edges are not in the graph")
    ends = set()
    for i in edges:
        e = parent.graph.edges[i]
        ends.update((e.source, e.target))
    verts = frozenset(ends) if vertices is None else frozenset(vertices) | ends
    return Subgraph(parent.graph, verts, edges)


def _succ(view: Subgraph) -> dict[int, list[int]]:
    succ = {v: [] for v in view.vertices}
    for i in sorted(view.edges):
        e = view.graph.edges[i]
        succ[e.source].append(e.target)
    return succ


def _tarjan(vertices: Iterable[int], succ: dict[int, list[int]]) -> list[list[int]]:
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in sorted(vertices):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, pos = work[-1]
            nbrs = succ[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


def strong_components(g: GraphLike) -> list[Subgraph]:
    """Strongly connected components with their induced edges, ordered by smallest vertex."""
    view = as_subgraph(g)
    comps = _tarjan(view.vertices, _succ(view))
    label = {v: k for k, comp in enumerate(comps) for v in comp}
    edges: dict[int, set[int]] = {k: set() for k in range(len(comps))}
    for i in view.edges:
        e = view.graph.edges[i]
        if label[e.source] == label[e.target]:
            edges[label[e.source]].add(i)
    out = [Subgraph(view.graph, frozenset(c), frozenset(edges[k])) for k, c in enumerate(comps)]
    return sorted(out, key=lambda s: min(s.vertices))


def recurrent_core(g: GraphLike) -> Subgraph:
    """Edges lying on some cycle, with their endpoints."""
    edges = set()
    for comp in strong_components(g):
        edges |= comp.edges
    return subgraph(g, edges)


def is_recurrent(g: GraphLike) -> bool:
    view = as_subgraph(g)
    return recurrent_core(view).edges == view.edges


def is_irreducible(g: GraphLike) -> bool:
    """Strongly connected with at least one edge (a lone vertex needs a loop)."""
    view = as_subgraph(g)
    if not view.edges:
        return False
    comps = strong_components(view)
    return len(comps) == 1


class SimpleCycle(NamedTuple):
    edges: tuple[int, ...]

    def __len__(self) -> int:  # number of edges
        return len(self.edges)


def _rotate(graph: TransitionGraph, edges: Sequence[int]) -> tuple[int, ...]:
    k = min(range(len(edges)), key=lambda i: (graph.edges[edges[i]].source, edges[i]))
    return tuple(edges[k:]) + tuple(edges[:k])


def check_cycle(g: GraphLike, edges: Sequence[int]) -> SimpleCycle:
    """Validate that ``edges`` is a vertex-simple directed cycle of ``g``."""
    view = as_subgraph(g)
    edges = tuple(int(e) for e in edges)
    if not edges:
        raise NotACycle("empty edge list")
    for i in edges:
        if i not in view.edges:
            raise NotACycle(f"edge {i} is not in the graph")
    es = view.graph.edges
    for a, c in zip(edges, edges[1:] + edges[:1]):
        if es[a].target != es[c].source:
            raise NotACycle(f"edges {a} and {c} are not consecutive")
    sources = [es[i].source for i in edges]
    if len(set(sources)) != len(sources):
        raise NotACycle("cycle revisits a vertex")
    return SimpleCycle(_rotate(view.graph, edges))


def _vertex_cycles(vertices: list[int], succ: dict[int, list[int]], limit: int) -> list[list[int]]:
    """Johnson's algorithm on the simple digraph without loops."""
    adj = {v: sorted(set(w for w in succ[v] if w != v)) for v in vertices}
    out: list[list[int]] = []
    for s in sorted(vertices):
        allowed = [v for v in vertices if v >= s]
        sub = {v: [w for w in adj[v] if w >= s] for v in allowed}
        comp = next(c for c in _tarjan(allowed, sub) if s in c)
        if len(comp) < 2:
            continue
        members = set(comp)
        local = {v: [w for w in sub[v] if w in members] for v in comp}
        blocked: set[int] = set()
        blockmap: dict[int, set[int]] = {v: set() for v in comp}
        path: list[int] = []

        def unblock(u: int) -> None:
            todo = [u]
            while todo:
                x = todo.pop()
                if x in blocked:
                    blocked.discard(x)
                    todo.extend(blockmap[x])
                    blockmap[x].clear()

        def circuit(v: int) -> bool:
            found = False
            path.append(v)
            blocked.add(v)
            for w in local[v]:
                if w == s:
                    out.append(list(path))
                    if len(out) > limit:
                        raise CycleCapExceeded(f"more than {limit} simple cycles")
                    found = True
                elif w not in blocked and circuit(w):
                    found = True
            if found:
                unblock(v)
            else:
                for w in local[v]:
                    blockmap[w].add(v)
            path.pop()
            return found

        circuit(s)
    return out


def simple_cycles(g: GraphLike, cap: int | None = None) -> list[SimpleCycle]:
    """All vertex-simple cycles at edge level (parallel edges give distinct cycles).

    Sorted by length, then by edge tuple.
    """
    limit = caps.cap("cycles") if cap is None else cap
    view = as_subgraph(g)
    graph = view.graph
    parallel: dict[tuple[int, int], list[int]] = {}
    for i in sorted(view.edges):
        e = graph.edges[i]
        parallel.setdefault((e.source, e.target), []).append(i)
    cycles: list[tuple[int, ...]] = []
    for (s, t), ids in parallel.items():
        if s == t:
            cycles.extend((i,) for i in ids)
    if len(cycles) > limit:
        raise CycleCapExceeded(f"more than {limit} simple cycles")
    succ = _succ(view)
    for vc in _vertex_cycles(sorted(view.vertices), succ, limit):
        hops = [parallel[(a, c)] for a, c in zip(vc, vc[1:] + vc[:1])]
        for choice in product(*hops):
            cycles.append(_rotate(graph, choice))
            if len(cycles) > limit:
                raise CycleCapExceeded(f"more than {limit} simple cycles")
    cycles.sort(key=lambda c: (len(c), c))
    return [SimpleCycle(c) for c in cycles]


def cycle_sign(g: GraphLike, cycle: SimpleCycle | Sequence[int]) -> int:
    graph = as_subgraph(g).graph
    edges = cycle.edges if isinstance(cycle, SimpleCycle) else cycle
    s = 1
    for i in edges:
        s *= graph.edges[i].sign
    return s


def cycle_class(g: GraphLike, cycle: SimpleCycle | Sequence[int]) -> Monomial:
    """Homology class of a closed walk as a monomial (sum of labels, total weight)."""
    graph = as_subgraph(g).graph
    edges = cycle.edges if isinstance(cycle, SimpleCycle) else tuple(cycle)
    if not edges:
        raise NotACycle("empty edge list")
    for a, c in zip(edges, edges[1:] + edges[:1]):
        if graph.edges[a].target != graph.edges[c].source:
            raise NotACycle(f"edges {a} and {c} are not consecutive")
    vec = [0] * graph.b
    deg = 0
    for i in edges:
        e = graph.edges[i]
        deg += e.weight
        for k, x in enumerate(e.hvec):
            vec[k] += x
    return Monomial(deg, tuple(vec))


def cycle_monomial(g: GraphLike, cycle) -> GroupRingElement:
    m = cycle_class(g, cycle)
    return GroupRingElement.monomial(m.vector, m.degree)


def direction_point(g: GraphLike, cycle: SimpleCycle | Sequence[int]) -> tuple[Fraction, ...]:
    m = cycle_class(g, cycle)
    if m.degree == 0:
        raise ZeroDegree("cycle has zero total weight")
    return tuple(Fraction(x, m.degree) for x in m.vector)


def spanning_forest(g: GraphLike) -> tuple[list[int], list[int]]:
    """Tree and non-tree edges of an undirected spanning forest, scanning edges in index order."""
    view = as_subgraph(g)
    parent = {v: v for v in view.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree, rest = [], []
    for i in sorted(view.edges):
        e = view.graph.edges[i]
        a, c = find(e.source), find(e.target)
        if a == c:
            rest.append(i)
        else:
            parent[a] = c
            tree.append(i)
    return tree, rest


def canonical_abstract_labels(g: TransitionGraph) -> TransitionGraph:
    """Relabel so that homology labels are cycle-space coordinates.

    Non-tree edges of the spanning forest get distinct basis vectors, tree
    edges get 0 and every weight becomes 1.  Signs are kept.
    """
    _, rest = spanning_forest(g)
    b = len(rest)
    pos = {e: k for k, e in enumerate(rest)}
    edges = []
    for i, e in enumerate(g.edges):
        vec = [0] * b
        if i in pos:
            vec[pos[i]] = 1
        edges.append(Edge(e.source, e.target, e.sign, tuple(vec), 1))
    return TransitionGraph(g.n_vertices, tuple(edges), b, g.vertex_names)


def fundamental_cycle_chain(g: GraphLike, edge: int, tree: Sequence[int]) -> dict[int, int]:
    """Signed edge chain of the fundamental cycle of a non-tree ``edge``."""
    view = as_subgraph(g)
    graph = view.graph
    e = graph.edges[edge]
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for i in tree:
        t = graph.edges[i]
        adj.setdefault(t.source, []).append((t.target, i, 1))
        adj.setdefault(t.target, []).append((t.source, i, -1))
    # path in the tree from e.target back to e.source
    prev: dict[int, tuple[int, int, int] | None] = {e.target: None}
    todo = [e.target]
    while todo:
        x = todo.pop()
        if x == e.source:
            break
        for y, i, s in adj.get(x, []):
            if y not in prev:
                prev[y] = (x, i, s)
                todo.append(y)
    chain = {edge: 1}
    x = e.source
    while prev[x] is not None:
        px, i, s = prev[x]
        chain[i] = chain.get(i, 0) + s
        x = px
    return chain


EXCEPTIONAL_TYPES = ("SH_or_SV", "mixed", "corner")


@dataclass(frozen=True)
class ExceptionalCycleRecord:
    """One exceptional trajectory and the graph cycles it collapses to.

    ``cycles`` lists the simple cycles of the graph lying over the trajectory;
    they share one homology class, equal to ``po`` times the class of the
    trajectory itself.
    """

    cycles: tuple[tuple[int, ...], ...]
    type_content: str
    pn: int
    po: int

    def __post_init__(self):
        problems = []
        if self.type_content not in EXCEPTIONAL_TYPES:
            problems.append(f"unknown type {self.type_content!r}")
        if self.pn < 2:
            problems.append(f"pn must be at least 2, got {self.pn}")
        if self.po < 1 or self.pn % self.po:
            problems.append(f"po={self.po} must be a positive divisor of pn={self.pn}")
        if not self.cycles:
            problems.append("record lists no cycle")
        if problems:
            raise ParseError("; ".join(problems))

    @classmethod
    def single(cls, cycle: Sequence[int], type_content: str, pn: int = 2, po: int = 1):
        return cls((tuple(cycle),), type_content, pn, po)

    def expected_cycle_count(self) -> int:
        """Number of graph cycles over this trajectory for consistent data."""
        if self.type_content == "SH_or_SV":
            return self.pn // self.po
        if self.type_content == "mixed":
            return 3
        return 2 * self.pn // self.po


def resolve_records(g: GraphLike, records: Sequence[ExceptionalCycleRecord]) -> list[list[SimpleCycle]]:
    """Check every record against ``g`` and return its cycles in canonical rotation.

    Cycles must be simple, have sign +1, share one class divisible by po,
    and be edge-disjoint across all records.
    """
    from .errors import BadExceptionalReference

    view = as_subgraph(g)
    seen: dict[int, int] = {}
    out = []
    for k, rec in enumerate(records):
        cyc = []
        classes = set()
        for edges in rec.cycles:
            try:
                c = check_cycle(view, edges)
            except NotACycle as exc:
                raise BadExceptionalReference(f"record {k}: {exc}") from None
            if cycle_sign(view, c) != 1:
                raise BadExceptionalReference(f"record {k}: exceptional cycle {c.edges} has sign -1")
            for i in c.edges:
                if i in seen:
                    raise BadExceptionalReference(
                        f"record {k}: edge {i} already used by record {seen[i]}"
                    )
                seen[i] = k
            classes.add(cycle_class(view, c))
            cyc.append(c)
        if len(classes) > 1:
            raise BadExceptionalReference(f"record {k}: cycles have different classes")
        cls_ = classes.pop()
        if cls_.degree % rec.po or any(x % rec.po for x in cls_.vector):
            raise BadExceptionalReference(f"record {k}: class is not divisible by po={rec.po}")
        out.append(cyc)
    return out


def trajectory_monomial(g: GraphLike, record: ExceptionalCycleRecord) -> GroupRingElement:
    """The class of the trajectory: the cycle class divided by po."""
    m = cycle_class(g, record.cycles[0])
    return GroupRingElement.monomial([x // record.po for x in m.vector], m.degree // record.po)
