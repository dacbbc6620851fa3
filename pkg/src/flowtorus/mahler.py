"""Mahler measures and the power-sum sequences L_m.

For q with constant term 1, L_m(q) is the sum over the inverse roots of q
(as a polynomial in t) of their m-th powers, so L_m(1 - a t) = a^m.  With the
ordinary logarithm this reads L_m = -m * (degree-m part of log q).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from . import caps
from .errors import (
    BadPrime,
    CapExceeded,
    ConstantTermNotOne,
    DegenerateSpecialization,
    NonIntegerCoefficients,
    NotApplicable,
    ZeroPolynomial,
)
from .laurent import GroupRingElement, ell1_norm, series_log


@dataclass(frozen=True)
class MahlerEstimate:
    value: float
    standard_error: float
    samples: int
    method: str  # "jensen_exact" or "iterated_jensen"
    root_tolerance: float = 0.0
    discarded: int = 0
    log_value: float = field(default=0.0)

    def exceeds_one_by(self, sigmas: float) -> bool:
        return self.value - 1.0 >= sigmas * self.standard_error and self.value > 1.0


def _trim(coeffs: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, int]:
    nz = np.flatnonzero(np.abs(coeffs) > tol)
    if nz.size == 0:
        raise ZeroPolynomial("the polynomial is zero")
    return coeffs[nz[0]: nz[-1] + 1], int(nz[0])


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        k = len(a) - len(b)
        f = a[-1] / b[-1]
        q[k] = f
        for i, x in enumerate(b):
            a[i + k] -= f * x
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [x / a[-1] for x in a]


def _squarefree_parts(c: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: c = lead * prod f_i^i with each f_i squarefree and monic."""
    deriv = [i * x for i, x in enumerate(c)][1:]
    g = _poly_gcd(c, deriv)
    w, _ = _poly_divmod(c, g)
    parts = []
    k = 1
    while len(w) > 1:
        y = _poly_gcd(w, g)
        z, _ = _poly_divmod(w, y)
        if len(z) > 1:
            parts.append((z, k))
        g, _ = _poly_divmod(g, y)
        w = y
        k += 1
    return parts


def _root_log_sum(c: np.ndarray) -> tuple[float, float]:
    """Sum of log max(1, |root|) and a Newton-step accuracy estimate."""
    if len(c) == 1:
        return 0.0, 0.0
    roots = np.roots(c[::-1])
    total = float(np.sum(np.log(np.maximum(1.0, np.abs(roots)))))
    p = np.polynomial.polynomial.polyval(roots, c)
    dp = np.polynomial.polynomial.polyval(roots, np.polynomial.polynomial.polyder(c))
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.abs(p) / np.maximum(np.abs(dp), 1e-300)
    return total, float(np.max(steps)) if steps.size else 0.0


def mahler_univariate(coeffs: Sequence) -> MahlerEstimate:
    """Jensen's formula: |leading| * prod max(1, |root|).

    ``coeffs`` are in ascending order of the power of t.  Exact rational input
    is first split into squarefree factors so that every root is simple.
    """
    exact = all(isinstance(x, Rational) and not isinstance(x, bool) for x in coeffs)
    c = np.asarray([complex(x) for x in coeffs], dtype=complex)
    c, low = _trim(c)
    lead = abs(c[-1])
    log_m = math.log(lead)
    if len(c) == 1:
        return MahlerEstimate(float(lead), 0.0, 1, "jensen_exact", 0.0, 0, log_m)
    if exact and len(c) > 2:
        fr = [Fraction(int(x.numerator), int(x.denominator)) for x in coeffs][low: low + len(c)]
        tol = 0.0
        for part, mult in _squarefree_parts(fr):
            s, e = _root_log_sum(np.asarray([complex(x) for x in part]))
            log_m += mult * s
            tol = max(tol, e)
    else:
        s, tol = _root_log_sum(c)
        log_m += s
    return MahlerEstimate(math.exp(log_m), 0.0, 1, "jensen_exact", tol, 0, log_m)


def _exponent_table(q: GroupRingElement) -> tuple[np.ndarray, np.ndarray]:
    terms = q.terms()
    exps = np.array([list(m.vector) + [m.degree] for m, _ in terms], dtype=np.int64).reshape(len(terms), q.b + 1)
    coef = np.array([complex(float(c)) for _, c in terms], dtype=complex)
    return exps, coef


def _batch_log_measure(cmat: np.ndarray) -> np.ndarray:
    """log Mahler measure of each row of coefficients (ascending), rows with nonzero leading term."""
    n, width = cmat.shape
    deg = width - 1
    lead = cmat[:, -1]
    out = np.log(np.abs(lead))
    if deg == 0:
        return out
    monic = cmat[:, :-1] / lead[:, None]
    comp = np.zeros((n, deg, deg), dtype=complex)
    comp[:, 0, :] = -monic[:, ::-1]
    if deg > 1:
        idx = np.arange(deg - 1)
        comp[:, idx + 1, idx] = 1.0
    roots = np.linalg.eigvals(comp)
    return out + np.sum(np.log(np.maximum(1.0, np.abs(roots))), axis=1)


def mahler_multivariate(q: GroupRingElement, distinguished: int | None = None,
                        samples: int = 10000, seed: int = 0) -> MahlerEstimate:
    """Iterated Jensen: average log-measures of univariate slices over the torus.

    Axes 0..b-1 are the homology variables, axis b is t (the default
    distinguished axis).  The remaining axes are sampled with a scrambled
    Sobol sequence seeded by ``seed``.
    """
    if q.is_zero():
        raise ZeroPolynomial("the polynomial is zero")
    b = q.b
    axis = b if distinguished is None else distinguished
    if not 0 <= axis <= b:
        raise ValueError(f"axis {axis} out of range 0..{b}")
    exps, coef = _exponent_table(q)
    main = exps[:, axis]
    other = np.delete(exps, axis, axis=1)
    other = other - other.min(axis=0, keepdims=True)
    varying = np.flatnonzero(other.max(axis=0) > 0)
    main = main - main.min()
    deg = int(main.max())
    if varying.size == 0:
        # only a monomial factor in the other variables: one exact slice
        c = np.zeros(deg + 1, dtype=complex)
        np.add.at(c, main, coef)
        return mahler_univariate(c)
    if deg == 0:
        raise DegenerateSpecialization(
            f"axis {axis} does not occur; every specialization is constant along it"
        )
    other = other[:, varying]
    dim = other.shape[1]
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = sampler.random(samples)
    indicator = np.zeros((len(coef), deg + 1))
    indicator[np.arange(len(coef)), main] = 1.0
    scale = float(np.sum(np.abs(coef)))
    tol = 1e-12 * scale
    logs = np.empty(samples)
    keep = np.ones(samples, dtype=bool)
    chunk = 8192
    for start in range(0, samples, chunk):
        uu = u[start:start + chunk]
        phase = np.exp(2j * np.pi * (uu @ other.T))
        cmat = (phase * coef) @ indicator
        good = np.abs(cmat[:, -1]) > tol
        part = np.empty(len(uu))
        if good.any():
            part[good] = _batch_log_measure(cmat[good])
        for k in np.flatnonzero(~good):
            row = cmat[k]
            if np.all(np.abs(row) <= tol):
                keep[start + k] = False
                part[k] = 0.0
            else:
                trimmed, _ = _trim(row, tol)
                part[k] = mahler_univariate(trimmed).log_value
        logs[start:start + len(uu)] = part
    discarded = int(samples - keep.sum())
    if discarded > 0.01 * samples:
        raise DegenerateSpecialization(
            f"{discarded} of {samples} specializations vanish identically; is axis {axis} present?"
        )
    vals = logs[keep]
    mean = float(np.mean(vals))
    se_log = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    value = math.exp(mean)
    # a sampled estimate never claims zero error, even when every slice agrees
    se_log = max(se_log, float(np.finfo(float).eps) * max(1.0, abs(mean)))
    return MahlerEstimate(value, value * se_log, int(keep.sum()), "iterated_jensen", 0.0, discarded, mean)


@dataclass(frozen=True)
class LmSequence:
    entries: tuple[GroupRingElement, ...]  # entries[m - 1] = L_m

    def __getitem__(self, m: int) -> GroupRingElement:
        if m < 1:
            raise IndexError("L_m is indexed from m = 1")
        return self.entries[m - 1]

    def __len__(self) -> int:
        return len(self.entries)


def _require_unit_constant(q: GroupRingElement) -> None:
    if q.degree_part(0) != GroupRingElement.one(q.b):
        raise ConstantTermNotOne("the degree-zero part of q must be exactly 1")


def lm_sequence(q: GroupRingElement, upto: int) -> LmSequence:
    """L_1..L_M from the logarithm series."""
    _require_unit_constant(q)
    log_q = series_log(q, upto)
    return LmSequence(tuple(log_q.element.degree_part(m).scale(-m) for m in range(1, upto + 1)))


def lm_recurrence_oracle(q: GroupRingElement, upto: int) -> LmSequence:
    """Newton identities L_m = -(c_1 L_{m-1} + ... + c_d L_{m-d}) with L_0 = d.

    For m < d the last term is m c_m instead of c_m L_0.
    """
    _require_unit_constant(q)
    d = q.max_degree()
    c = [q.degree_part(j) for j in range(d + 1)]
    b = q.b
    seq = [GroupRingElement.constant(d, b)]
    for m in range(1, upto + 1):
        acc = GroupRingElement.zero(b)
        for j in range(1, min(m, d) + 1):
            if j == m:
                acc = acc + c[j].scale(m)
            else:
                acc = acc + c[j] * seq[m - j]
        seq.append(-acc)
    return LmSequence(tuple(seq[1:]))


@dataclass(frozen=True)
class L1BoundReport:
    holds_up_to_M: bool
    first_violation: int | None
    degree: int
    norms: tuple


def check_lemma_l1_bound(q: GroupRingElement, upto: int) -> L1BoundReport:
    """Check ||L_m(q)||_1 <= deg_t(q) for m <= M; a violation certifies M(q) > 1."""
    _require_unit_constant(q)
    if not q.is_integral():
        raise NonIntegerCoefficients("q must have integer coefficients")
    deg = q.max_degree()
    seq = lm_sequence(q, upto)
    norms = tuple(ell1_norm(seq[m]) for m in range(1, upto + 1))
    first = next((m for m, n in enumerate(norms, start=1) if n > deg), None)
    return L1BoundReport(first is None, first, deg, norms)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def _eval_mod(part: GroupRingElement, evaluations: Sequence[int], p: int) -> int:
    total = 0
    for mono, c in part.terms():
        c = Fraction(c)
        val = c.numerator * pow(c.denominator, -1, p)
        for x, e in zip(evaluations, mono.vector):
            val *= pow(x, e, p)  # negative exponents use the inverse mod p
        total += val
    return total % p


def find_mq(q: GroupRingElement, p: int, evaluations: Sequence[int], max_steps: int | None = None) -> int:
    """Period m_q of L_m(q) evaluated at integers and reduced mod p.

    The state (L_m, ..., L_{m+d-1}) mod p returns to (L_0, ..., L_{d-1}) after
    m_q steps, so L_{k m_q} = d mod p is nonzero for every k >= 1.
    """
    _require_unit_constant(q)
    if q.is_one():
        raise NotApplicable("q = 1 has no nonzero L_m")
    if not _is_prime(p):
        raise BadPrime(f"{p} is not prime")
    evaluations = [int(x) for x in evaluations]
    if len(evaluations) != q.b:
        raise BadPrime(f"expected {q.b} evaluation values, got {len(evaluations)}")
    if any(x % p == 0 for x in evaluations):
        raise BadPrime(f"{p} divides an evaluation value")
    if any(Fraction(c).denominator % p == 0 for _, c in q.terms()):
        raise BadPrime(f"{p} divides a coefficient denominator")
    d = q.max_degree()
    if d % p == 0:
        raise BadPrime(f"{p} divides the degree {d}")
    c = [_eval_mod(q.degree_part(j), evaluations, p) for j in range(d + 1)]
    if c[d] == 0:
        raise BadPrime(f"{p} divides the evaluated leading coefficient")
    seq = [d % p]
    for m in range(1, d):
        acc = m * c[m]
        for j in range(1, m):
            acc += c[j] * seq[m - j]
        seq.append(-acc % p)
    start = tuple(seq)
    state = list(seq)
    limit = caps.cap("period") if max_steps is None else max_steps
    for step in range(1, limit + 1):
        nxt = -sum(c[j] * state[d - j] for j in range(1, d + 1)) % p
        state = state[1:] + [nxt]
        if tuple(state) == start:
            return step
    raise CapExceeded(f"no period found within {limit} steps")
