"""Exact arithmetic in cyclotomic fields Q(z) with z a primitive M-th root of unity.

Numbers are stored as coefficient vectors modulo ``x^M - 1``; equality and the
zero test reduce modulo the M-th cyclotomic polynomial.  Pure roots of unity
have their own light type, :class:`RootExp`, because almost every structure
constant in the library is one.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational as _RationalABC

from .errors import IndexOutOfRange, OrderMismatch

Rational = Fraction

_lock = threading.Lock()
_cyclo_cache: dict[int, tuple[int, ...]] = {}
_reduce_cache: dict[int, tuple[tuple[int, ...], ...]] = {}
_root_canon_cache: dict[int, dict[tuple, int]] = {}


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (low degree first); ``den`` monic."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c:
            out[k - dn] = c
            for t in range(dn + 1):
                num[k - dn + t] -= c * den[t]
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the m-th cyclotomic polynomial."""
    cached = _cyclo_cache.get(m)
    if cached is not None:
        return cached
    if m < 1:
        raise ValueError("order must be positive")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    poly = tuple(num)
    with _lock:
        _cyclo_cache.setdefault(m, poly)
    return _cyclo_cache[m]


def _reduction_table(m: int) -> tuple[tuple[int, ...], ...]:
    # row k = coefficients of x^k mod Phi_m, for k < m
    table = _reduce_cache.get(m)
    if table is not None:
        return table
    phi = cyclotomic_poly(m)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    if d:
        cur[0] = 1
    for k in range(m):
        if k < d:
            row = [0] * d
            row[k] = 1
            rows.append(tuple(row))
            cur = row
            continue
        # multiply previous row by x and reduce the overflow with phi (monic)
        top = cur[d - 1]
        nxt = [0] + cur[:-1]
        if top:
            for t in range(d):
                nxt[t] -= top * phi[t]
        rows.append(tuple(nxt))
        cur = nxt
    table = tuple(rows)
    with _lock:
        _reduce_cache.setdefault(m, table)
    return _reduce_cache[m]


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class CycNumber:
    """An element of Q(z_M), z_M = exp(2*pi*i/M)."""

    __slots__ = ("order", "coeffs", "_canon")

    def __init__(self, order: int, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != order:
            raise ValueError(f"expected {order} coefficients, got {len(coeffs)}")
        self.order = order
        self.coeffs = coeffs
        self._canon = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, order: int) -> CycNumber:
        return cls(order, (0,) * order)

    @classmethod
    def one(cls, order: int) -> CycNumber:
        return cls.from_int(order, 1)

    @classmethod
    def from_int(cls, order: int, value) -> CycNumber:
        coeffs = [0] * order
        coeffs[0] = value
        return cls(order, coeffs)

    @classmethod
    def root(cls, order: int, exp: int, coeff=1) -> CycNumber:
        coeffs = [0] * order
        coeffs[exp % order] = coeff
        return cls(order, coeffs)

    # -- canonical form ----------------------------------------------
    @property
    def canon(self) -> tuple:
        """Coefficients of the reduced representative modulo the cyclotomic polynomial."""
        c = self._canon
        if c is None:
            table = _reduction_table(self.order)
            d = len(table[0]) if table else 0
            acc = [0] * d
            for k, ck in enumerate(self.coeffs):
                if ck:
                    row = table[k]
                    for t in range(d):
                        if row[t]:
                            acc[t] += ck * row[t]
            c = tuple(_clean(x) for x in acc)
            self._canon = c
        return c

    def is_zero(self) -> bool:
        return not any(self.canon)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _check(self, other: CycNumber) -> None:
        if other.order != self.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")

    def _coerce(self, other) -> CycNumber | None:
        if isinstance(other, CycNumber):
            self._check(other)
            return other
        if isinstance(other, RootExp):
            return other.to_cyc(self.order)
        if isinstance(other, (int, _RationalABC)):
            return CycNumber.from_int(self.order, other)
        return None

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.canon == o.canon

    def __hash__(self) -> int:
        return hash((self.order, self.canon))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> CycNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNumber(self.order, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycNumber:
        return CycNumber(self.order, [-a for a in self.coeffs])

    def __sub__(self, other) -> CycNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycNumber(self.order, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other) -> CycNumber:
        return (-self) + other

    def __mul__(self, other) -> CycNumber:
        if isinstance(other, RootExp):
            return self.mul_root(other.lift(self.order).exp)
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, bool):
            return CycNumber(self.order, [a * other for a in self.coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self.order
        out = [0] * m
        nz = [(k, b) for k, b in enumerate(o.coeffs) if b]
        for j, a in enumerate(self.coeffs):
            if a:
                for k, b in nz:
                    out[(j + k) % m] += a * b
        return CycNumber(m, out)

    __rmul__ = __mul__

    def mul_root(self, exp: int) -> CycNumber:
        """Multiply by z^exp (a cyclic shift of the coefficient vector)."""
        m = self.order
        s = exp % m
        if s == 0:
            return self
        c = self.coeffs
        return CycNumber(m, c[m - s:] + c[:m - s])

    def inv(self) -> CycNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        phi = [Fraction(x) for x in cyclotomic_poly(self.order)]
        a = _trim([Fraction(x) for x in self.canon])
        # extended Euclid: find s with s*a = 1 mod phi
        r0, r1 = phi, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] == 0:
            q, r = _polydivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(_polysub(s0, _polymul(q, s1)))
        c = r1[0]
        s = [x / c for x in s1]
        coeffs = [0] * self.order
        for k, x in enumerate(s):
            coeffs[k] = _clean(x)
        return CycNumber(self.order, coeffs)

    def __truediv__(self, other) -> CycNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __pow__(self, n: int) -> CycNumber:
        if n < 0:
            return self.inv() ** (-n)
        result = CycNumber.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def lift(self, order: int) -> CycNumber:
        """Embed into Q(z_order) for a multiple ``order`` of the current order."""
        if order == self.order:
            return self
        if order % self.order:
            raise OrderMismatch(f"cannot embed order {self.order} into {order}")
        step = order // self.order
        coeffs = [0] * order
        for k, c in enumerate(self.coeffs):
            coeffs[k * step] = c
        return CycNumber(order, coeffs)

    def as_root(self) -> int | None:
        """Return e when this number equals z^e, otherwise None."""
        table = _root_canon_cache.get(self.order)
        if table is None:
            table = {CycNumber.root(self.order, e).canon: e for e in range(self.order)}
            with _lock:
                _root_canon_cache.setdefault(self.order, table)
        return table.get(self.canon)

    def format(self, name: str = "z") -> str:
        e = self.as_root()
        if e is not None:
            return _fmt_root(name, e)
        neg = (-self).as_root()
        if neg is not None:
            return "-" + _fmt_root(name, neg)
        terms = []
        for k, c in enumerate(self.canon):
            if not c:
                continue
            mono = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __repr__(self) -> str:
        return f"CycNumber({self.order}, {self.format()})"


def _fmt_root(name: str, e: int) -> str:
    if e == 0:
        return "1"
    return name if e == 1 else f"{name}^{e}"


def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _polysub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)]


def _polymul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _polydivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    b = _trim(list(b))
    db = len(b) - 1
    if len(a) - 1 < db:
        return [Fraction(0)], _trim(a)
    q = [Fraction(0)] * (len(a) - db)
    lead = b[-1]
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] / lead
        q[k - db] = c
        if c:
            for t in range(db + 1):
                a[k - db + t] -= c * b[t]
    return _trim(q), _trim(a[:db] if db else [Fraction(0)])


@dataclass(frozen=True, order=True)
class RootExp:
    """The pure root of unity z_order^exp."""

    order: int
    exp: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "exp", self.exp % self.order)

    def __mul__(self, other: RootExp) -> RootExp:
        if not isinstance(other, RootExp):
            return NotImplemented
        if other.order == self.order:
            return RootExp(self.order, self.exp + other.exp)
        m = self.order * other.order // gcd(self.order, other.order)
        return RootExp(m, self.lift(m).exp + other.lift(m).exp)

    def inv(self) -> RootExp:
        return RootExp(self.order, -self.exp)

    def __truediv__(self, other: RootExp) -> RootExp:
        return self * other.inv()

    def __pow__(self, n: int) -> RootExp:
        return RootExp(self.order, self.exp * n)

    def lift(self, order: int) -> RootExp:
        if order == self.order:
            return self
        if order % self.order:
            raise OrderMismatch(f"cannot embed order {self.order} into {order}")
        return RootExp(order, self.exp * (order // self.order))

    def is_one(self) -> bool:
        return self.exp == 0

    def to_cyc(self, order: int | None = None) -> CycNumber:
        r = self if order is None else self.lift(order)
        return CycNumber.root(r.order, r.exp)

    def same_value(self, other: RootExp) -> bool:
        """Equality of the denoted complex numbers across different ambient orders."""
        m = self.order * other.order // gcd(self.order, other.order)
        return self.lift(m).exp == other.lift(m).exp

    def multiplicative_order(self) -> int:
        return self.order // gcd(self.order, self.exp)

    def to_json(self) -> dict:
        return {"order": self.order, "exp": self.exp}

    @classmethod
    def from_json(cls, d: dict) -> RootExp:
        return cls(int(d["order"]), int(d["exp"]))


def root_order(r: RootExp) -> int:
    """Multiplicative order of a root of unity: M / gcd(M, exp)."""
    return r.multiplicative_order()


def cyc_arith(a: CycNumber, b: CycNumber, op: str):
    """Dispatch a binary/unary field operation by name (add, mul, neg, inv, eq)."""
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if a.order != b.order:
        raise OrderMismatch(f"orders {a.order} and {b.order} differ")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown operation {op!r}")


_qbinom_rows: dict[tuple[int, int], list[tuple[tuple, ...]]] = {}


def qbinom(m: int, i: int, q: RootExp) -> CycNumber:
    """Gaussian binomial (m choose i)_q by the q-Pascal recurrence.

    Uses (m choose i) = (m-1 choose i-1) + q^i (m-1 choose i); never divides,
    so it is safe when q-factorials vanish.
    """
    if m < 0 or i < 0 or i > m:
        raise IndexOutOfRange(f"need 0 <= i <= m, got m={m}, i={i}")
    key = (q.order, q.exp)
    order = q.order
    rows = _qbinom_rows.get(key)
    if rows is None:
        rows = [((1,) + (0,) * (order - 1),)]
        with _lock:
            rows = _qbinom_rows.setdefault(key, rows)
    if len(rows) <= m:
        with _lock:
            while len(rows) <= m:
                prev = rows[-1]
                n = len(rows)
                row = []
                for k in range(n + 1):
                    left = prev[k - 1] if k >= 1 else None
                    right = prev[k] if k < n else None
                    acc = [0] * order
                    if left is not None:
                        acc = list(left)
                    if right is not None:
                        s = (k * q.exp) % order
                        shifted = right[order - s:] + right[:order - s] if s else right
                        acc = [x + y for x, y in zip(acc, shifted)]
                    row.append(tuple(acc))
                rows.append(tuple(row))
    return CycNumber(order, rows[m][i])
