"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

from hypothesis import strategies as st

from flowtorus.digraph import TransitionGraph
from flowtorus.laurent import GroupRingElement


def mono(vector, degree, coeff=1) -> GroupRingElement:
    return GroupRingElement.monomial(vector, degree, coeff)


def t_power(k: int, b: int = 0, coeff=1) -> GroupRingElement:
    return GroupRingElement.monomial((0,) * b, k, coeff)


def figure_eight(sign_u: int = 1, sign_v: int = 1) -> TransitionGraph:
    return TransitionGraph.build(1, [(0, 0, sign_u, (1, 0)), (0, 0, sign_v, (0, 1))])


def directed_cycle(n: int, hvecs=None, signs=None, weights=None, b: int = 1) -> TransitionGraph:
    hvecs = hvecs or [(1,) + (0,) * (b - 1)] + [(0,) * b] * (n - 1)
    signs = signs or [1] * n
    weights = weights or [1] * n
    return TransitionGraph.build(
        n, [(i, (i + 1) % n, signs[i], hvecs[i], weights[i]) for i in range(n)], b
    )


def complete_digraph(n: int) -> TransitionGraph:
    edges = [(i, j, 1, (0,)) for i in range(n) for j in range(n) if i != j]
    return TransitionGraph.build(n, edges, 1)


def random_graph(rng: random.Random, max_vertices: int = 4, max_edges: int = 6, b: int = 2,
                 max_weight: int = 2, hrange: int = 1) -> TransitionGraph:
    n = rng.randint(1, max_vertices)
    m = rng.randint(1, max_edges)
    edges = []
    for _ in range(m):
        s, t = rng.randrange(n), rng.randrange(n)
        sign = rng.choice((1, -1))
        hvec = tuple(rng.randint(-hrange, hrange) for _ in range(b))
        edges.append((s, t, sign, hvec, rng.randint(1, max_weight)))
    return TransitionGraph.build(n, edges, b)


@st.composite
def graphs(draw, max_vertices: int = 3, max_edges: int = 5, b: int = 2, max_weight: int = 2):
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(1, max_edges))
    edges = []
    for _ in range(m):
        edges.append((
            draw(st.integers(0, n - 1)),
            draw(st.integers(0, n - 1)),
            draw(st.sampled_from((1, -1))),
            tuple(draw(st.integers(-1, 1)) for _ in range(b)),
            draw(st.integers(1, max_weight)),
        ))
    return TransitionGraph.build(n, edges, b)


@st.composite
def elements(draw, b: int = 2, max_terms: int = 4, max_degree: int = 3, unit_constant: bool = False):
    """Random group ring elements with small integer coefficients."""
    k = draw(st.integers(0, max_terms))
    out = GroupRingElement.one(b) if unit_constant else GroupRingElement.zero(b)
    for _ in range(k):
        lo = 1 if unit_constant else 0
        d = draw(st.integers(lo, max_degree))
        v = tuple(draw(st.integers(-2, 2)) for _ in range(b))
        c = draw(st.integers(-3, 3))
        out = out + GroupRingElement.monomial(v, d, c)
    return out


def leibniz_det(rows) -> GroupRingElement:
    """Determinant as the signed sum over all permutations."""
    n = len(rows)
    b = rows[0][0].b if n else 0
    total = GroupRingElement.zero(b)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = GroupRingElement.one(b)
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + (term if inversions % 2 == 0 else -term)
    return total


def power_series_log_oracle(q: GroupRingElement, bound: int) -> GroupRingElement:
    """log(1 + r) = sum (-1)^(k+1) r^k / k, expanded term by term without truncating products."""
    r = q - GroupRingElement.one(q.b)
    out = GroupRingElement.zero(q.b)
    power = GroupRingElement.one(q.b)
    for k in range(1, bound + 1):
        power = power * r
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out.truncate(bound)
