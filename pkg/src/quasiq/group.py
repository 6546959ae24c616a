"""Finite abelian groups, the explicit 3-cocycles Phi_a and their induced 2-cocycles.

Group elements are plain tuples of reduced exponents ``(i_1, ..., i_N)`` standing
for ``e_1^{i_1} ... e_N^{i_N}``.  Cocycle values are returned as :class:`RootExp`
in the ambient order ``L = lcm(moduli)``; the vectorized tables store the
exponent of ``z_L`` only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, lcm, prod
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .cyclo import RootExp
from .errors import GroupTooLargeForExhaustive, InvalidCocycle, ModuliMismatch

GroupElem = tuple[int, ...]

EXHAUSTIVE_BOUND = 32


@dataclass(frozen=True)
class AbelianGroup:
    """Z_{m_1} x ... x Z_{m_N} with distinguished generators e_1..e_N."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise ValueError("a group needs at least one cyclic factor")
        if any(m < 2 for m in moduli):
            raise ValueError(f"moduli must be >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return prod(self.moduli)

    @property
    def exponent(self) -> int:
        """L = lcm of the moduli; cocycle values live in mu_L."""
        return lcm(*self.moduli)

    @property
    def ambient(self) -> int:
        """L^2; quasi-character values live in mu_{L^2}."""
        return self.exponent ** 2

    @property
    def identity(self) -> GroupElem:
        return (0,) * self.rank

    def gen(self, l: int) -> GroupElem:
        """The distinguished generator e_{l+1} (0-based index)."""
        out = [0] * self.rank
        out[l] = 1
        return tuple(out)

    @cached_property
    def elements(self) -> tuple[GroupElem, ...]:
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    def index(self, x: GroupElem) -> int:
        idx = 0
        for xi, m in zip(x, self.moduli):
            idx = idx * m + xi
        return idx

    def element(self, x: Iterable[int]) -> GroupElem:
        x = tuple(int(v) for v in x)
        if len(x) != self.rank:
            raise ModuliMismatch(f"element {x} has wrong length for moduli {self.moduli}")
        return tuple(v % m for v, m in zip(x, self.moduli))

    def mul(self, x: GroupElem, y: GroupElem) -> GroupElem:
        if len(x) != self.rank or len(y) != self.rank:
            raise ModuliMismatch("element length does not match the group")
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def pow(self, x: GroupElem, k: int) -> GroupElem:
        return tuple((a * k) % m for a, m in zip(x, self.moduli))

    def inverse(self, x: GroupElem) -> GroupElem:
        return tuple((-a) % m for a, m in zip(x, self.moduli))

    def elem_order(self, x: GroupElem) -> int:
        return lcm(*(m // gcd(m, a) for a, m in zip(x, self.moduli)))

    def generates(self, elems: Iterable[GroupElem]) -> bool:
        return len(self.span(elems)) == self.order

    def span(self, elems: Iterable[GroupElem]) -> set[GroupElem]:
        """Subgroup generated by ``elems``, by breadth-first closure."""
        gens = [tuple(e) for e in elems]
        for g in gens:
            if len(g) != self.rank:
                raise ModuliMismatch("element length does not match the group")
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    @cached_property
    def exps_array(self) -> np.ndarray:
        """(|G|, N) array of exponent vectors in element order."""
        return np.array(self.elements, dtype=np.int64).reshape(self.order, self.rank)

    @cached_property
    def mul_table(self) -> np.ndarray:
        X = self.exps_array
        S = (X[:, None, :] + X[None, :, :]) % np.array(self.moduli)
        weights = np.array([prod(self.moduli[l + 1:]) for l in range(self.rank)], dtype=np.int64)
        return S @ weights

    def to_json(self) -> list[int]:
        return list(self.moduli)


def group_ops(G: AbelianGroup, op: str, *args):
    """Name-dispatched group operation: mul, inverse, elem_order, generates."""
    if op == "mul":
        return G.mul(*args)
    if op == "inverse":
        return G.inverse(*args)
    if op == "elem_order":
        return G.elem_order(*args)
    if op == "generates":
        return G.generates(*args)
    raise ValueError(f"unknown group operation {op!r}")


def _pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def _triples(n: int) -> list[tuple[int, int, int]]:
    return list(itertools.combinations(range(n), 3))


@dataclass(frozen=True)
class CocycleData:
    """The parameter sequence a = (a_l, a_st, a_rst) selecting Phi_a.

    Indices are 0-based internally; ``a2`` and ``a3`` keep only nonzero entries,
    as sorted tuples ``((s, t, v), ...)`` and ``((r, s, t, v), ...)``.
    """

    a: tuple[int, ...]
    a2: tuple[tuple[int, int, int], ...] = ()
    a3: tuple[tuple[int, int, int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "a2", tuple(sorted((int(s), int(t), int(v)) for s, t, v in self.a2 if v)))
        object.__setattr__(self, "a3", tuple(sorted((int(r), int(s), int(t), int(v)) for r, s, t, v in self.a3 if v)))

    @classmethod
    def make(cls, a: Sequence[int], a2: dict | None = None, a3: dict | None = None) -> CocycleData:
        """Build from dicts keyed by 0-based index tuples."""
        a2 = a2 or {}
        a3 = a3 or {}
        return cls(tuple(a), tuple((s, t, v) for (s, t), v in a2.items()),
                   tuple((r, s, t, v) for (r, s, t), v in a3.items()))

    @classmethod
    def trivial(cls, G: AbelianGroup) -> CocycleData:
        return cls((0,) * G.rank)

    @property
    def a2_map(self) -> dict[tuple[int, int], int]:
        return {(s, t): v for s, t, v in self.a2}

    @property
    def a3_map(self) -> dict[tuple[int, int, int], int]:
        return {(r, s, t): v for r, s, t, v in self.a3}

    @property
    def is_reduced(self) -> bool:
        return not self.a3

    @property
    def is_trivial(self) -> bool:
        return not any(self.a) and not self.a2 and not self.a3

    def validate(self, G: AbelianGroup) -> None:
        m = G.moduli
        if len(self.a) != G.rank:
            raise InvalidCocycle(f"a has length {len(self.a)}, group rank is {G.rank}")
        for l, v in enumerate(self.a):
            if not 0 <= v < m[l]:
                raise InvalidCocycle(f"a_{l + 1} = {v} outside [0, {m[l]})")
        for s, t, v in self.a2:
            if not 0 <= s < t < G.rank:
                raise InvalidCocycle(f"bad index pair ({s + 1},{t + 1})")
            if not 0 <= v < gcd(m[s], m[t]):
                raise InvalidCocycle(f"a_{s + 1}{t + 1} = {v} outside [0, {gcd(m[s], m[t])})")
        for r, s, t, v in self.a3:
            if not 0 <= r < s < t < G.rank:
                raise InvalidCocycle(f"bad index triple ({r + 1},{s + 1},{t + 1})")
            g = gcd(m[r], m[s], m[t])
            if not 0 <= v < g:
                raise InvalidCocycle(f"a_{r + 1}{s + 1}{t + 1} = {v} outside [0, {g})")

    def to_json(self) -> dict:
        return {
            "a": list(self.a),
            "a2": [{"s": s + 1, "t": t + 1, "v": v} for s, t, v in self.a2],
            "a3": [{"r": r + 1, "s": s + 1, "t": t + 1, "v": v} for r, s, t, v in self.a3],
        }

    @classmethod
    def from_json(cls, d: dict, rank: int | None = None) -> CocycleData:
        a = d.get("a")
        if a is None:
            if rank is None:
                raise InvalidCocycle("cocycle JSON lacks 'a' and no rank given")
            a = [0] * rank
        try:
            a2 = tuple((int(e["s"]) - 1, int(e["t"]) - 1, int(e.get("v", 0))) for e in d.get("a2", []))
            a3 = tuple((int(e["r"]) - 1, int(e["s"]) - 1, int(e["t"]) - 1, int(e.get("v", 0)))
                       for e in d.get("a3", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidCocycle(f"malformed cocycle entry: {exc}") from None
        return cls(tuple(int(v) for v in a), a2, a3)


def system_to_json(G: AbelianGroup, c: CocycleData) -> dict:
    out = {"moduli": G.to_json()}
    out.update(c.to_json())
    return out


def system_from_json(d: dict) -> tuple[AbelianGroup, CocycleData]:
    try:
        G = AbelianGroup(tuple(int(m) for m in d["moduli"]))
    except (KeyError, TypeError) as exc:
        raise InvalidCocycle(f"missing or malformed 'moduli': {exc}") from None
    c = CocycleData.from_json(d, rank=G.rank)
    c.validate(G)
    return G, c


def parameter_slots(G: AbelianGroup) -> list[tuple[tuple, int]]:
    """All parameter positions with their ranges: (('a', l) | ('a2', s, t) | ('a3', r, s, t), size)."""
    m = G.moduli
    slots: list[tuple[tuple, int]] = [(("a", l), m[l]) for l in range(G.rank)]
    slots += [(("a2", s, t), gcd(m[s], m[t])) for s, t in _pairs(G.rank)]
    slots += [(("a3", r, s, t), gcd(m[r], m[s], m[t])) for r, s, t in _triples(G.rank)]
    return slots


def cocycle_from_params(G: AbelianGroup, values: Sequence[int]) -> CocycleData:
    a = [0] * G.rank
    a2, a3 = [], []
    for (key, _), v in zip(parameter_slots(G), values):
        if key[0] == "a":
            a[key[1]] = v
        elif key[0] == "a2":
            a2.append((key[1], key[2], v))
        else:
            a3.append((key[1], key[2], key[3], v))
    return CocycleData(tuple(a), tuple(a2), tuple(a3))


def all_cocycles(G: AbelianGroup, reduced_only: bool = False) -> Iterator[CocycleData]:
    """Every CocycleData on G, lexicographic in the parameter slots."""
    slots = parameter_slots(G)
    ranges = [range(size) if not (reduced_only and key[0] == "a3") else range(1) for key, size in slots]
    for values in itertools.product(*ranges):
        yield cocycle_from_params(G, values)


def phi_exponent(G: AbelianGroup, c: CocycleData, x: GroupElem, y: GroupElem, z: GroupElem) -> int:
    """Exponent e with Phi_a(x, y, z) = z_L^e, by the three-product formula."""
    m = G.moduli
    L = G.exponent
    e = 0
    for l, al in enumerate(c.a):
        if al:
            e += al * x[l] * ((y[l] + z[l]) // m[l]) * (L // m[l])
    for s, t, v in c.a2:
        e += v * x[t] * ((y[s] + z[s]) // m[s]) * (L // m[t])
    for r, s, t, v in c.a3:
        e += v * z[r] * y[s] * x[t] * (L // gcd(m[r], m[s], m[t]))
    return e % L


def phi_eval(G: AbelianGroup, c: CocycleData, x: GroupElem, y: GroupElem, z: GroupElem) -> RootExp:
    return RootExp(G.exponent, phi_exponent(G, c, x, y, z))


def phi_tilde_eval(G: AbelianGroup, c: CocycleData, g: GroupElem, e: GroupElem, f: GroupElem) -> RootExp:
    """Induced 2-cocycle Phi(g,e,f) Phi(e,f,g) / Phi(e,g,f)."""
    return RootExp(
        G.exponent,
        phi_exponent(G, c, g, e, f) + phi_exponent(G, c, e, f, g) - phi_exponent(G, c, e, g, f),
    )


def _phi_table_raw(G: AbelianGroup, c: CocycleData) -> np.ndarray:
    m = G.moduli
    L = G.exponent
    X = G.exps_array
    n = G.order
    T = np.zeros((n, n, n), dtype=np.int64)
    xi = X[:, None, None, :]
    yj = X[None, :, None, :]
    zk = X[None, None, :, :]
    for l, al in enumerate(c.a):
        if al:
            T += al * xi[..., l] * ((yj[..., l] + zk[..., l]) // m[l]) * (L // m[l])
    for s, t, v in c.a2:
        T += v * xi[..., t] * ((yj[..., s] + zk[..., s]) // m[s]) * (L // m[t])
    for r, s, t, v in c.a3:
        T += v * zk[..., r] * yj[..., s] * xi[..., t] * (L // gcd(m[r], m[s], m[t]))
    return T % L


@dataclass(frozen=True, eq=False)
class PhiTable:
    """Tabulated Phi_a: ``table[ix, iy, iz]`` is the exponent of z_L.

    ``tilde[ig, ix, iy]`` tabulates the induced 2-cocycle.
    """

    G: AbelianGroup
    c: CocycleData
    table: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, G: AbelianGroup, c: CocycleData) -> PhiTable:
        c.validate(G)
        return cls(G, c, _phi_table_raw(G, c))

    @property
    def order(self) -> int:
        return self.G.exponent

    @cached_property
    def tilde(self) -> np.ndarray:
        T = self.table
        return (T + np.transpose(T, (2, 0, 1)) - np.transpose(T, (1, 0, 2))) % self.order

    def __call__(self, x: GroupElem, y: GroupElem, z: GroupElem) -> RootExp:
        G = self.G
        return RootExp(self.order, int(self.table[G.index(x), G.index(y), G.index(z)]))

    def exp(self, x: GroupElem, y: GroupElem, z: GroupElem) -> int:
        G = self.G
        return int(self.table[G.index(x), G.index(y), G.index(z)])


@dataclass
class CocycleCheck:
    ok: bool
    checked: int
    witness: tuple | None = None
    exhaustive: bool = True

    def __bool__(self) -> bool:
        return self.ok


def _tabulate(G: AbelianGroup, f: Callable, arity: int) -> tuple[np.ndarray, int]:
    if isinstance(f, PhiTable) and arity == 3:
        return f.table, f.order
    els = G.elements
    vals = {}
    order = 1
    for args in itertools.product(els, repeat=arity):
        r = f(*args)
        vals[args] = r
        order = lcm(order, r.order)
    T = np.empty((G.order,) * arity, dtype=np.int64)
    for args, r in vals.items():
        T[tuple(G.index(a) for a in args)] = r.lift(order).exp
    return T, order


def _first_violation(bad: np.ndarray) -> tuple | None:
    hits = np.argwhere(bad)
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in hits[0])


def _coboundary3(T: np.ndarray, M: np.ndarray) -> np.ndarray:
    # d(Phi)(e,f,g,h) = Phi(f,g,h) Phi(e,fg,h) Phi(e,f,g) / (Phi(ef,g,h) Phi(e,f,gh))
    n = T.shape[0]
    e = np.arange(n)[:, None, None, None]
    f = np.arange(n)[None, :, None, None]
    g = np.arange(n)[None, None, :, None]
    h = np.arange(n)[None, None, None, :]
    return (T[f, g, h] + T[e, M[f, g], h] + T[e, f, g] - T[M[e, f], g, h] - T[e, f, M[g, h]])


def _coboundary2(W: np.ndarray, M: np.ndarray) -> np.ndarray:
    # d(w)(e,f,g) = w(e,f) w(ef,g) / (w(e,fg) w(f,g)); W may carry leading batch axes
    n = W.shape[-1]
    e = np.arange(n)[:, None, None]
    f = np.arange(n)[None, :, None]
    g = np.arange(n)[None, None, :]
    return W[..., e, f] + W[..., M[e, f], g] - W[..., e, M[f, g]] - W[..., f, g]


def verify_cocycle(
    G: AbelianGroup,
    f: Callable,
    arity: int,
    *,
    bound: int = EXHAUSTIVE_BOUND,
    exhaustive: bool | None = None,
    samples: int = 10000,
    seed: int = 0,
) -> CocycleCheck:
    """Check the 2- or 3-cocycle identity for ``f`` (returning RootExp values).

    Exhaustive over G^3 resp. G^4 when |G| <= bound (or when forced), otherwise
    on ``samples`` seeded random tuples.  Reports the first failing tuple.
    """
    if arity not in (2, 3):
        raise ValueError("arity must be 2 or 3")
    if exhaustive is None:
        exhaustive = G.order <= bound
    elif exhaustive and G.order > bound:
        raise GroupTooLargeForExhaustive(f"|G| = {G.order} exceeds bound {bound}")
    if exhaustive:
        T, order = _tabulate(G, f, arity)
        M = G.mul_table
        D = _coboundary3(T, M) if arity == 3 else _coboundary2(T, M)
        idx = _first_violation(D % order != 0)
        witness = None if idx is None else tuple(G.elements[i] for i in idx)
        return CocycleCheck(idx is None, G.order ** (arity + 1), witness, True)
    rng = random.Random(seed)
    els = G.elements
    mul = G.mul
    for _ in range(samples):
        t = [rng.choice(els) for _ in range(arity + 1)]
        if arity == 3:
            e, a, b, h = t
            lhs = f(mul(e, a), b, h) * f(e, a, mul(b, h))
            rhs = f(e, a, b) * f(e, mul(a, b), h) * f(a, b, h)
        else:
            e, a, b = t
            lhs = f(e, a) * f(mul(e, a), b)
            rhs = f(e, mul(a, b)) * f(a, b)
        if not lhs.same_value(rhs):
            return CocycleCheck(False, samples, tuple(t), False)
    return CocycleCheck(True, samples, None, False)


def elementary_tables(G: AbelianGroup) -> tuple[list[tuple], np.ndarray]:
    """Phi exponent tables for each parameter slot set to 1 (others 0).

    Phi_a is linear in its parameters: table(a) = sum_p a_p * E_p mod L.
    """
    slots = parameter_slots(G)
    tabs = []
    for key, _ in slots:
        if key[0] == "a":
            a = [0] * G.rank
            a[key[1]] = 1
            c = CocycleData(tuple(a))
        elif key[0] == "a2":
            c = CocycleData((0,) * G.rank, ((key[1], key[2], 1),))
        else:
            c = CocycleData((0,) * G.rank, (), ((key[1], key[2], key[3], 1),))
        tabs.append(_phi_table_raw(G, c))
    return [k for k, _ in slots], np.stack(tabs) if tabs else np.zeros((0,) + (G.order,) * 3, dtype=np.int64)


@dataclass
class FamilyCheck:
    group: tuple[int, ...]
    cocycles: int
    tuples_per_cocycle: int
    ok3: bool
    ok2: bool
    failure: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.ok3 and self.ok2


def verify_all_cocycles(G: AbelianGroup, chunk: int = 64) -> FamilyCheck:
    """Exhaustively check every CocycleData on G at once.

    For each cocycle, evaluates the 3-cocycle coboundary on all of G^4 and the
    2-cocycle coboundary of every induced Phi~_g on G x G^3.  Linearity in the
    parameters turns the per-cocycle evaluation into one integer matrix product
    (exact in float64 since all entries are tiny).
    """
    L = G.exponent
    M = G.mul_table
    n = G.order
    keys, E = elementary_tables(G)
    P = len(keys)
    D3 = np.stack([_coboundary3(E[p], M).reshape(-1) % L for p in range(P)]).astype(np.float64)
    tilde = (E + np.transpose(E, (0, 3, 1, 2)) - np.transpose(E, (0, 2, 1, 3))) % L
    D2 = np.stack([_coboundary2(tilde[p], M).reshape(-1) % L for p in range(P)]).astype(np.float64)
    # tuples sharing a coboundary column behave identically for every cocycle,
    # so evaluate each distinct column once and map failures back
    D3, inv3 = np.unique(D3, axis=1, return_inverse=True)
    D2, inv2 = np.unique(D2, axis=1, return_inverse=True)
    inv3, inv2 = inv3.reshape(-1), inv2.reshape(-1)
    sizes = [s for _, s in parameter_slots(G)]
    params = np.array(list(itertools.product(*(range(s) for s in sizes))), dtype=np.float64).reshape(-1, P)
    ok3 = ok2 = True
    failure = None
    for start in range(0, len(params), chunk):
        A = params[start:start + chunk]
        R3 = np.mod(A @ D3, L)
        R2 = np.mod(A @ D2, L)
        if ok3 and R3.any():
            ok3 = False
            i, col = np.argwhere(R3)[0]
            j = int(np.flatnonzero(inv3 == col)[0])
            failure = ("3-cocycle", tuple(int(v) for v in A[i]), np.unravel_index(j, (n,) * 4))
        if ok2 and R2.any():
            ok2 = False
            i, col = np.argwhere(R2)[0]
            j = int(np.flatnonzero(inv2 == col)[0])
            failure = failure or ("2-cocycle", tuple(int(v) for v in A[i]), np.unravel_index(j, (n,) * 4))
    return FamilyCheck(G.moduli, len(params), n ** 4, ok3, ok2, failure)


def groups_up_to(order: int) -> list[AbelianGroup]:
    """All moduli tuples (non-decreasing, entries >= 2) with product <= order."""
    out = []

    def rec(prefix: list[int], lo: int, rem: int):
        if prefix:
            out.append(AbelianGroup(tuple(prefix)))
        for m in range(lo, rem + 1):
            if m <= rem:
                rec(prefix + [m], m, rem // m)

    rec([], 2, order)
    return sorted(out, key=lambda G: (G.order, G.moduli))
