"""Projective currents, direction hulls and their exact face lattices.

The hull of the direction points of all simple cycles is computed with
exact integer arithmetic by the double description method, run inside the
affine span of the points.  Faces are identified by the set of generating
cycles whose points lie on them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import caps
from ._exact import inverse, primitive, rank, rref
from .digraph import (
    ExceptionalCycleRecord,
    GraphLike,
    SimpleCycle,
    Subgraph,
    TransitionGraph,
    as_subgraph,
    direction_point,
    recurrent_core,
    resolve_records,
    simple_cycles,
    subgraph,
)
from .errors import (
    DimensionCapExceeded,
    EmptyRecurrentCore,
    InconsistentProjection,
    NotSurjectiveOntoBaseHull,
    UnknownFace,
)

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class ProjectiveCurrent:
    """Probability measure on edges, balanced at every vertex."""

    weights: dict[int, Fraction]

    def is_balanced(self, g: GraphLike) -> bool:
        graph = as_subgraph(g).graph
        flow: dict[int, Fraction] = {}
        for i, w in self.weights.items():
            e = graph.edges[i]
            flow[e.source] = flow.get(e.source, 0) - w
            flow[e.target] = flow.get(e.target, 0) + w
        return all(v == 0 for v in flow.values()) and sum(self.weights.values()) == 1


def elementary_currents(g: GraphLike) -> list[ProjectiveCurrent]:
    """Normalised counting measure of every simple cycle."""
    out = []
    for c in simple_cycles(g):
        w = Fraction(1, len(c.edges))
        out.append(ProjectiveCurrent({i: w for i in c.edges}))
    return out


@dataclass(frozen=True)
class Facet:
    """Inequality offset + normal . x >= 0 in ambient coordinates (primitive integers)."""

    offset: int
    normal: tuple[int, ...]
    points: frozenset[int]

    def value(self, x: Sequence) -> Fraction:
        return self.offset + sum(a * Fraction(v) for a, v in zip(self.normal, x))


@dataclass(frozen=True)
class Face:
    index: int
    cycles: tuple[int, ...]
    points: frozenset[int]
    facets: frozenset[int]
    dim: int


@dataclass(frozen=True)
class AffineSpan:
    base: Point
    rows: tuple[tuple[Fraction, ...], ...]  # reduced row echelon basis of the direction space
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coords(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(Fraction(x[p]) - self.base[p] for p in self.pivots)

    def contains(self, x: Sequence) -> bool:
        w = [Fraction(a) - b for a, b in zip(x, self.base)]
        rebuilt = [Fraction(0)] * len(w)
        for coef, row in zip((w[p] for p in self.pivots), self.rows):
            for k, r in enumerate(row):
                rebuilt[k] += coef * r
        return rebuilt == w


def affine_span(points: Sequence[Point]) -> AffineSpan:
    base = tuple(points[0])
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    rows, pivots = rref(diffs) if diffs else ([], [])
    return AffineSpan(base, tuple(tuple(r) for r in rows), tuple(pivots))


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _facets_full(ys: Sequence[Sequence[Fraction]], d: int) -> list[tuple[tuple[int, ...], frozenset[int]]]:
    """Facets of a full-dimensional point set in Q^d by double description.

    Returns homogeneous integer normals a with a . (1, y) >= 0 and their
    incidence sets.  The dual cone is pointed because the points span.
    """
    if d == 0:
        return []
    vs = [primitive((1, *y)) for y in ys]
    chosen: list[int] = []
    for i in range(len(vs)):
        if rank([vs[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d + 1:
                break
    inv = inverse([vs[i] for i in chosen])
    rays = [primitive([inv[r][c] for r in range(d + 1)]) for c in range(d + 1)]
    bit = {idx: 1 << k for k, idx in enumerate(chosen)}
    zeros = [sum(bit[chosen[j]] for j in range(d + 1) if j != c) for c in range(d + 1)]
    next_bit = d + 1
    for i in range(len(vs)):
        if i in bit:
            continue
        bit[i] = 1 << next_bit
        next_bit += 1
        vals = [_dot(vs[i], a) for a in rays]
        pos = [k for k, s in enumerate(vals) if s > 0]
        neg = [k for k, s in enumerate(vals) if s < 0]
        zer = [k for k, s in enumerate(vals) if s == 0]
        if not neg:
            for k in zer:
                zeros[k] |= bit[i]
            continue
        new_rays, new_zeros = [], []
        for p in pos:
            for n in neg:
                common = zeros[p] & zeros[n]
                if bin(common).count("1") < d - 1:
                    continue
                if any(
                    k != p and k != n and (zeros[k] & common) == common for k in range(len(rays))
                ):
                    continue
                ray = [vals[p] * x - vals[n] * y for x, y in zip(rays[n], rays[p])]
                new_rays.append(primitive(ray))
                new_zeros.append(common | bit[i])
        keep = pos + zer
        rays = [rays[k] for k in keep] + new_rays
        zeros = [zeros[k] | (bit[i] if vals[k] == 0 else 0) for k in keep] + new_zeros
    out = []
    for a in rays:
        inc = frozenset(j for j, v in enumerate(vs) if _dot(v, a) == 0)
        out.append((a, inc))
    return out


class DirectionHull:
    """Exact convex hull of the direction points of the simple cycles of a graph."""

    def __init__(self, graph: Subgraph, cycles: list[SimpleCycle], cycle_points: list[Point],
                 ambient_dim: int):
        self.graph = graph
        self.cycles = cycles
        self.cycle_points = cycle_points
        self.ambient_dim = ambient_dim
        distinct = sorted(set(cycle_points))
        self.points: list[Point] = distinct
        where = {p: k for k, p in enumerate(distinct)}
        self.point_of_cycle = [where[p] for p in cycle_points]
        self.cycles_at_point: list[list[int]] = [[] for _ in distinct]
        for c, k in enumerate(self.point_of_cycle):
            self.cycles_at_point[k].append(c)
        self.span = affine_span(distinct)
        self.dim = self.span.dim
        ys = [self.span.coords(p) for p in distinct]
        self.facets: list[Facet] = []
        for a, inc in _facets_full(ys, self.dim):
            normal = [Fraction(0)] * ambient_dim
            offset = Fraction(a[0])
            for k, piv in enumerate(self.span.pivots):
                normal[piv] = Fraction(a[k + 1])
                offset -= a[k + 1] * self.span.base[piv]
            ints = primitive([offset] + normal)
            self.facets.append(Facet(ints[0], tuple(ints[1:]), inc))
        self.facets.sort(key=lambda f: (sorted(f.points), f.normal, f.offset))
        self._build_faces()

    def _build_faces(self) -> None:
        full = frozenset(range(len(self.points)))
        seen = {full}
        queue = [full]
        while queue:
            cur = queue.pop()
            for f in self.facets:
                nxt = cur & f.points
                if nxt and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        raw = []
        for pts in seen:
            cyc = tuple(sorted(c for k in pts for c in self.cycles_at_point[k]))
            fac = frozenset(i for i, f in enumerate(self.facets) if pts <= f.points)
            raw.append((cyc, pts, fac))
        raw.sort(key=lambda r: r[0])
        self.faces: list[Face] = []
        self._by_points: dict[frozenset[int], int] = {}
        for idx, (cyc, pts, fac) in enumerate(raw):
            dim = self._affine_dim(pts)
            self.faces.append(Face(idx, cyc, pts, fac, dim))
            self._by_points[pts] = idx
        self.top = self._by_points[full]

    def _affine_dim(self, pts) -> int:
        pts = sorted(pts)
        p0 = self.points[pts[0]]
        return rank([[a - b for a, b in zip(self.points[k], p0)] for k in pts[1:]]) if len(pts) > 1 else 0

    # lookups
    def face(self, face_id: int) -> Face:
        if not isinstance(face_id, int) or not 0 <= face_id < len(self.faces):
            raise UnknownFace(f"face {face_id!r} does not exist (hull has {len(self.faces)} faces)")
        return self.faces[face_id]

    def face_with_points(self, pts) -> int | None:
        return self._by_points.get(frozenset(pts))

    @property
    def vertices(self) -> list[int]:
        """Face ids of the 0-dimensional faces."""
        return [f.index for f in self.faces if f.dim == 0]

    def vertex_point(self, face_id: int) -> Point:
        f = self.face(face_id)
        if f.dim != 0:
            raise ValueError(f"face {face_id} is not a vertex")
        return self.points[next(iter(f.points))]

    def codim(self, face_id: int) -> int:
        return self.dim - self.face(face_id).dim

    def contains(self, x: Sequence) -> bool:
        return self.span.contains(x) and all(f.value(x) >= 0 for f in self.facets)

    def minimal_face(self, x: Sequence) -> int | None:
        """Smallest closed face containing x, or None when x lies outside."""
        if not self.contains(x):
            return None
        pts = frozenset(range(len(self.points)))
        for f in self.facets:
            if f.value(x) == 0:
                pts &= f.points
        return self._by_points[pts]

    def in_face(self, x: Sequence, face_id: int) -> bool:
        f = self.face(face_id)
        if not self.contains(x):
            return False
        return all(self.facets[i].value(x) == 0 for i in f.facets)

    def in_face_cone(self, vector: Sequence[int], degree: int, face_id: int) -> bool:
        """Whether a monomial lies in the cone over a closed face (degree 0 only at the origin)."""
        if degree == 0:
            return not any(vector)
        return self.in_face([Fraction(v, degree) for v in vector], face_id)

    def faces_below(self, face_id: int) -> list[int]:
        pts = self.face(face_id).points
        return [f.index for f in self.faces if f.points <= pts]


def direction_hull(g: GraphLike, dim_cap: int | None = None) -> DirectionHull:
    view = as_subgraph(g)
    limit = caps.cap("dim") if dim_cap is None else dim_cap
    if view.graph.b > limit:
        raise DimensionCapExceeded(f"ambient dimension {view.graph.b} exceeds cap {limit}")
    core = recurrent_core(view)
    if not core.edges:
        raise EmptyRecurrentCore("the graph has no cycles")
    cycles = simple_cycles(core)
    pts = [direction_point(view, c) for c in cycles]
    return DirectionHull(core, cycles, pts, view.graph.b)


def support_subgraph(h: DirectionHull, face_id: int) -> Subgraph:
    """Union of the simple cycles whose direction point lies in the closed face."""
    f = h.face(face_id)
    edges = set()
    for c in f.cycles:
        edges.update(h.cycles[c].edges)
    return subgraph(h.graph, edges)


def classify_face(h: DirectionHull, face_id: int,
                  exceptional: Sequence[ExceptionalCycleRecord] = ()) -> str:
    f = h.face(face_id)
    resolved = resolve_records(h.graph.graph, exceptional)
    support = support_subgraph(h, face_id)
    listed = {c.edges for cyc in resolved for c in cyc}
    carried = [e for e in listed if set(e) <= support.edges]
    if not carried:
        return "purely_ordinary"
    face_cycles = {h.cycles[c].edges for c in f.cycles}
    if face_cycles <= listed:
        graph = support.graph
        indeg = {v: 0 for v in support.vertices}
        outdeg = {v: 0 for v in support.vertices}
        for i in support.edges:
            outdeg[graph.edges[i].source] += 1
            indeg[graph.edges[i].target] += 1
        if all(indeg[v] == 1 and outdeg[v] == 1 for v in support.vertices):
            return "purely_exceptional"
    return "mixed"


def apply_linear(matrix: Sequence[Sequence[int]], x: Sequence) -> Point:
    return tuple(sum(Fraction(a) * v for a, v in zip(row, x)) for row in matrix)


@dataclass(frozen=True)
class ProjectionMap:
    image_points: tuple[Point, ...]  # image of each cover generating cycle point
    preimage: dict[int, int | None]  # base face id -> cover face id (None if not a face)
    surjective: bool


def polytope_projection(h_cover: DirectionHull, projection: Sequence[Sequence[int]],
                        base: DirectionHull | None = None) -> ProjectionMap:
    """Face-preimage map of a linear projection of the cover hull.

    Without ``base`` the target is the hull of the projected points.
    """
    images = tuple(apply_linear(projection, p) for p in h_cover.cycle_points)
    if base is None:
        target_pts = sorted(set(images))
        base = _hull_of_points(target_pts)
    for k, x in enumerate(images):
        if not base.contains(x):
            raise InconsistentProjection(f"image of cover cycle {k} lies outside the base hull")
    hit_vertices = {base.minimal_face(x) for x in images}
    surjective = all(v in hit_vertices for v in base.vertices)
    if not surjective:
        warnings.warn("projected cover hull does not cover the base hull", NotSurjectiveOntoBaseHull)
    pre: dict[int, int | None] = {}
    for f in base.faces:
        pts = frozenset(
            h_cover.point_of_cycle[c] for c, x in enumerate(images) if base.in_face(x, f.index)
        )
        pre[f.index] = h_cover.face_with_points(pts) if pts else None
    return ProjectionMap(images, pre, surjective)


def _hull_of_points(points: Sequence[Point]) -> DirectionHull:
    """A DirectionHull over bare points (one pseudo-cycle per point)."""
    dummy = as_subgraph(TransitionGraph(0, (), 0))
    pts = list(points)
    return DirectionHull(dummy, [SimpleCycle(()) for _ in pts], pts, len(pts[0]) if pts else 0)


def hull_of_points(points: Sequence[Sequence]) -> DirectionHull:
    pts = [tuple(Fraction(x) for x in p) for p in points]
    return _hull_of_points(pts)

