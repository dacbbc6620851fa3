"""Exact arithmetic in the graded group ring Q[Z^b][t].

A monomial is a pair (degree, vector): ``vector`` is an element of Z^b written
multiplicatively in the variables x1..xb and ``degree`` is the power of t.
Elements are immutable dicts from monomials to int or Fraction coefficients.
Terms are always listed in (degree, vector) lexicographic order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from . import caps
from .errors import ConstantTermNotOne, NonzeroConstantTerm, SizeCapExceeded


class Monomial(NamedTuple):
    """Group ring monomial x^vector * t^degree (ordered by degree first)."""

    degree: int
    vector: tuple[int, ...]

    @classmethod
    def make(cls, vector: Iterable[int], degree: int) -> "Monomial":
        if degree < 0:
            raise ValueError("monomial degree must be non-negative")
        return cls(int(degree), tuple(int(v) for v in vector))


def _norm(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficient {c!r} is not an exact rational")


class GroupRingElement:
    """Immutable finitely supported element of Q[Z^b][t]."""

    __slots__ = ("_terms", "_b", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), b: int = 0):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, c in items:
            d, v = key
            v = tuple(v)
            if len(v) != b:
                raise ValueError(f"vector {v} does not have length {b}")
            if d < 0:
                raise ValueError("negative degree")
            k = (d, v)
            acc[k] = acc.get(k, 0) + _norm(c)
        self._terms = {k: _norm(c) for k, c in acc.items() if c != 0}
        self._b = b
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, b: int) -> "GroupRingElement":
        # terms already normalised and free of zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._b = b
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def zero(cls, b: int = 0) -> "GroupRingElement":
        return cls._raw({}, b)

    @classmethod
    def one(cls, b: int = 0) -> "GroupRingElement":
        return cls._raw({(0, (0,) * b): 1}, b)

    @classmethod
    def constant(cls, c, b: int = 0) -> "GroupRingElement":
        c = _norm(c)
        return cls._raw({(0, (0,) * b): c} if c else {}, b)

    @classmethod
    def monomial(cls, vector: Sequence[int], degree: int, coeff=1) -> "GroupRingElement":
        vector = tuple(int(x) for x in vector)
        return cls({(degree, vector): coeff}, len(vector))

    # basic access
    @property
    def b(self) -> int:
        return self._b

    def terms(self) -> list[tuple[Monomial, int | Fraction]]:
        return [(Monomial(d, v), c) for (d, v), c in sorted(self._terms.items())]

    def __iter__(self) -> Iterator[tuple[Monomial, int | Fraction]]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, degree: int, vector: Sequence[int] | None = None):
        if vector is None:
            vector = (0,) * self._b
        return self._terms.get((degree, tuple(vector)), 0)

    def constant_term(self):
        return self._terms.get((0, (0,) * self._b), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return len(self._terms) == 1 and self.constant_term() == 1

    def max_degree(self) -> int:
        if not self._terms:
            raise ValueError("zero element has no degree")
        return max(d for d, _ in self._terms)

    def min_degree(self) -> int:
        if not self._terms:
            raise ValueError("zero element has no degree")
        return min(d for d, _ in self._terms)

    def degree_part(self, m: int) -> "GroupRingElement":
        return GroupRingElement._raw({k: c for k, c in self._terms.items() if k[0] == m}, self._b)

    def truncate(self, bound: int) -> "GroupRingElement":
        return GroupRingElement._raw({k: c for k, c in self._terms.items() if k[0] <= bound}, self._b)

    def filter(self, keep) -> "GroupRingElement":
        """Sub-sum of the terms whose monomial satisfies ``keep(Monomial)``."""
        return GroupRingElement._raw(
            {k: c for k, c in self._terms.items() if keep(Monomial(*k))}, self._b
        )

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def scale(self, c) -> "GroupRingElement":
        c = _norm(c)
        if c == 0:
            return GroupRingElement.zero(self._b)
        return GroupRingElement._raw({k: _norm(v * c) for k, v in self._terms.items()}, self._b)

    def shift(self, vector: Sequence[int], degree: int = 0) -> "GroupRingElement":
        """Multiply by the monomial x^vector t^degree (degree may be negative if the result stays graded)."""
        vector = tuple(vector)
        out = {}
        for (d, v), c in self._terms.items():
            nd = d + degree
            if nd < 0:
                raise ValueError("shift produces a negative degree")
            out[(nd, tuple(a + s for a, s in zip(v, vector)))] = c
        return GroupRingElement._raw(out, self._b)

    # ring operations
    def _check(self, other: "GroupRingElement") -> None:
        if other._b != self._b:
            raise ValueError(f"rank mismatch: {self._b} vs {other._b}")

    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GroupRingElement.constant(other, self._b)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = _norm(s)
            else:
                out.pop(k, None)
        return GroupRingElement._raw(out, self._b)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement._raw({k: -c for k, c in self._terms.items()}, self._b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul_truncated(self, other, None)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = GroupRingElement.one(self._b)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = GroupRingElement.constant(other, self._b)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self._b == other._b and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._b, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"GroupRingElement({render(self)!r}, b={self._b})"

    def __str__(self):
        return render(self)


def mul_truncated(p: GroupRingElement, q: GroupRingElement, bound: int | None) -> GroupRingElement:
    """Product of two elements, dropping every monomial of degree above ``bound``."""
    if p._b != q._b:
        raise ValueError(f"rank mismatch: {p._b} vs {q._b}")
    if not p._terms or not q._terms:
        return GroupRingElement.zero(p._b)
    qs = sorted(q._terms.items())
    out: dict = {}
    get = out.get
    b = p._b
    for (da, va), ca in p._terms.items():
        for (db, vb), cb in qs:
            d = da + db
            if bound is not None and d > bound:
                break
            if b:
                key = (d, tuple([x + y for x, y in zip(va, vb)]))
            else:
                key = (d, ())
            out[key] = get(key, 0) + ca * cb
    return GroupRingElement._raw({k: _norm(c) for k, c in out.items() if c}, b)


def ring_add(p, q):
    return p + q


def ring_mul(p, q):
    return p * q


def render(p: GroupRingElement) -> str:
    """Human readable form using variables x1..xb and t."""
    if p.is_zero():
        return "0"
    pieces = []
    for (d, v), c in sorted(p._terms.items()):
        factors = []
        for i, e in enumerate(v, start=1):
            if e == 1:
                factors.append(f"x{i}")
            elif e:
                factors.append(f"x{i}^{e}")
        if d == 1:
            factors.append("t")
        elif d:
            factors.append(f"t^{d}")
        neg = c < 0
        mag = -c if neg else c
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


class TruncatedSeries(NamedTuple):
    """Element of the graded completion, known up to degree ``bound`` inclusive."""

    element: GroupRingElement
    bound: int

    @classmethod
    def of(cls, element: GroupRingElement, bound: int) -> "TruncatedSeries":
        return cls(element.truncate(bound), bound)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        m = min(self.bound, other.bound)
        return TruncatedSeries(mul_truncated(self.element, other.element, m), m)

    def degree_part(self, m: int) -> GroupRingElement:
        if m > self.bound:
            raise ValueError(f"degree {m} beyond truncation {self.bound}")
        return self.element.degree_part(m)


def series_log(q: GroupRingElement, bound: int) -> TruncatedSeries:
    """log(q) up to degree ``bound`` via the Mercator series in r = q - 1.

    The degree-zero part of q must be exactly 1, so r has positive degree
    and r^k only contributes from degree k on.
    """
    zero_part = q.degree_part(0)
    r = q - zero_part
    if zero_part != GroupRingElement.one(q.b):
        raise ConstantTermNotOne(f"degree-zero part of q is {render(zero_part)}, not 1")
    r = r.truncate(bound)
    # accumulate over the common denominator lcm(1..bound) to stay in integers
    den = 1
    for k in range(2, bound + 1):
        den = den * k // gcd(den, k)
    total: dict = {}
    power = r
    k = 1
    while not power.is_zero() and k <= bound:
        f = den // k if k % 2 else -(den // k)
        for key, c in power._terms.items():
            total[key] = total.get(key, 0) + f * c
        k += 1
        power = mul_truncated(power, r, bound)
    out = {key: _norm(Fraction(c) / den) for key, c in total.items() if c}
    return TruncatedSeries(GroupRingElement._raw(out, q.b), bound)


def series_exp(s: "TruncatedSeries | GroupRingElement", bound: int | None = None) -> TruncatedSeries:
    """exp(s) up to degree ``bound``; s must have no degree-zero part.

    A TruncatedSeries argument carries its own bound.
    """
    if isinstance(s, TruncatedSeries):
        bound = s.bound if bound is None else min(bound, s.bound)
        s = s.element
    if bound is None:
        raise ValueError("a truncation bound is required")
    if not s.degree_part(0).is_zero():
        raise NonzeroConstantTerm(f"degree-zero part of s is {render(s.degree_part(0))}")
    s = s.truncate(bound)
    b = s.b
    # graded recurrence n E_n = sum_{k=1..n} k S_k E_{n-k}, homogeneous pieces only
    parts = [s.degree_part(k).scale(k) for k in range(bound + 1)]
    e = [GroupRingElement.one(b)]
    for n in range(1, bound + 1):
        acc = GroupRingElement.zero(b)
        for k in range(1, n + 1):
            if parts[k]._terms and e[n - k]._terms:
                acc = acc + mul_truncated(parts[k], e[n - k], None)
        e.append(acc.scale(Fraction(1, n)))
    total: dict = {}
    for piece in e:
        total.update(piece._terms)
    return TruncatedSeries(GroupRingElement._raw(total, b), bound)


def ell1_norm(p: GroupRingElement):
    return sum(abs(c) for c in p._terms.values())


class RingMatrix(NamedTuple):
    """Square matrix with group ring entries, stored as a tuple of rows."""

    rows: tuple[tuple[GroupRingElement, ...], ...]
    b: int

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def from_rows(cls, rows, b: int) -> "RingMatrix":
        rows = tuple(
            tuple(x if isinstance(x, GroupRingElement) else GroupRingElement.constant(x, b) for x in r)
            for r in rows
        )
        for r in rows:
            if len(r) != len(rows):
                raise ValueError("matrix is not square")
        return cls(rows, b)

    def identity_minus(self) -> "RingMatrix":
        one = GroupRingElement.one(self.b)
        n = self.size
        return RingMatrix(
            tuple(
                tuple((one if i == j else GroupRingElement.zero(self.b)) - self.rows[i][j] for j in range(n))
                for i in range(n)
            ),
            self.b,
        )

    def matmul(self, other: "RingMatrix", bound: int | None = None) -> "RingMatrix":
        n = self.size
        zero = GroupRingElement.zero(self.b)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    a, c = self.rows[i][k], other.rows[k][j]
                    if a._terms and c._terms:
                        acc = acc + mul_truncated(a, c, bound)
                row.append(acc)
            out.append(tuple(row))
        return RingMatrix(tuple(out), self.b)

    def trace(self) -> GroupRingElement:
        acc = GroupRingElement.zero(self.b)
        for i in range(self.size):
            acc = acc + self.rows[i][i]
        return acc


def charpoly_coefficients(m: RingMatrix) -> list[GroupRingElement]:
    """Coefficients [1, c1, ..., cn] of det(lambda*I - m) by Berkowitz' algorithm.

    Only ring additions and multiplications are used.
    """
    n = m.size
    b = m.b
    zero = GroupRingElement.zero(b)
    one = GroupRingElement.one(b)
    rows = m.rows
    vec = [one]
    for k in range(n - 1, -1, -1):
        s = n - k
        a = rows[k][k]
        row = [rows[k][j] for j in range(k + 1, n)]
        col = [rows[i][k] for i in range(k + 1, n)]
        diags = [one, -a]
        w = col
        for _ in range(s - 1):
            acc = zero
            for x, y in zip(row, w):
                if x._terms and y._terms:
                    acc = acc + x * y
            diags.append(-acc)
            w = [
                _dot([rows[i][j] for j in range(k + 1, n)], w, zero)
                for i in range(k + 1, n)
            ]
        # Toeplitz (s+1) x s times vec (length s)
        new = []
        for i in range(s + 1):
            acc = zero
            for j in range(min(i, s - 1) + 1):
                d = diags[i - j]
                if d._terms and vec[j]._terms:
                    acc = acc + d * vec[j]
            new.append(acc)
        vec = new
    return vec


def _dot(xs, ys, zero):
    acc = zero
    for x, y in zip(xs, ys):
        if x._terms and y._terms:
            acc = acc + x * y
    return acc


def det_division_free(m: RingMatrix, cap: int | None = None) -> GroupRingElement:
    """Determinant over the group ring without any division."""
    limit = caps.cap("det") if cap is None else cap
    if m.size > limit:
        raise SizeCapExceeded(f"matrix size {m.size} exceeds determinant cap {limit}")
    if m.size == 0:
        return GroupRingElement.one(m.b)
    c = charpoly_coefficients(m)[-1]
    return c if m.size % 2 == 0 else -c


def series_inverse(q: GroupRingElement, bound: int) -> GroupRingElement:
    """1/q up to degree ``bound`` for q with degree-zero part 1."""
    zero_part = q.degree_part(0)
    if zero_part != GroupRingElement.one(q.b):
        raise ConstantTermNotOne(f"degree-zero part of q is {render(zero_part)}, not 1")
    r = (q - 1).truncate(bound)
    # 1/(1 + r) = 1 - r(1 - r(1 - ...))
    acc = GroupRingElement.one(q.b)
    for _ in range(bound):
        acc = GroupRingElement.one(q.b) - mul_truncated(r, acc, bound)
    return acc.truncate(bound)


def exact_quotient(p: GroupRingElement, q: GroupRingElement) -> GroupRingElement | None:
    """p / q when q divides p in the group ring (q with degree-zero part 1), else None."""
    if p.is_zero():
        return p
    bound = p.max_degree()
    quot = mul_truncated(p, series_inverse(q, bound), bound)
    if quot * q == p:
        return quot
    return None
