"""Quasi-characters attached to the induced 2-cocycles, and admissible series."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cyclo import RootExp
from .errors import InvalidSeries, NonSymmetricCocycle
from .group import AbelianGroup, CocycleData, GroupElem, PhiTable


@lru_cache(maxsize=256)
def phi_table(G: AbelianGroup, c: CocycleData) -> PhiTable:
    """Memoized Phi table per (group, cocycle)."""
    return PhiTable.build(G, c)


@dataclass(frozen=True)
class QuasiCharacter:
    """chi with chi(e_l) = z_order^exps[l], attached to the degree ``g``.

    ``table`` is only set for cocycles outside the reduced form, where chi is
    not the multiplicative extension of its generator values; it then lists
    chi(h) exponents in group-element order.
    """

    g: GroupElem
    exps: tuple[int, ...]
    order: int
    table: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def vals(self) -> tuple[RootExp, ...]:
        return tuple(RootExp(self.order, e) for e in self.exps)

    def value_exp(self, h: GroupElem, G: AbelianGroup | None = None) -> int:
        if self.table is not None:
            if G is None:
                raise ValueError("a tabulated quasi-character needs its group to evaluate")
            return self.table[G.index(h)]
        return sum(e * k for e, k in zip(self.exps, h)) % self.order

    def to_json(self) -> dict:
        return {"degree": list(self.g), "values": [{"order": self.order, "exp": e} for e in self.exps]}


def char_value(chi: QuasiCharacter, h: GroupElem, G: AbelianGroup | None = None) -> RootExp:
    """chi(h) = prod_l chi(e_l)^{h_l} on reduced exponents."""
    return RootExp(chi.order, chi.value_exp(h, G))


def lemma_base_exponents(G: AbelianGroup, c: CocycleData, g: GroupElem) -> tuple[int, ...]:
    """Principal m_l-th root exponents (in mu_{L^2}) of the generator constraint.

    chi(e_l)^{m_l} = z_{m_l}^{a_l i_l} prod_{t>l} z_{m_t}^{a_lt i_t}, with g = (i).
    The returned exponents are reduced modulo L^2/m_l, the branch spacing.
    """
    m = G.moduli
    L2 = G.ambient
    a2 = c.a2_map
    out = []
    for l in range(G.rank):
        e = c.a[l] * g[l] * (L2 // (m[l] * m[l]))
        for t in range(l + 1, G.rank):
            v = a2.get((l, t), 0)
            if v:
                e += v * g[t] * (L2 // (m[t] * m[l]))
        out.append(e % (L2 // m[l]))
    return tuple(out)


def symmetry_witness(G: AbelianGroup, c: CocycleData, g: GroupElem) -> tuple | None:
    """First pair (e, f) with Phi~_g(e, f) != Phi~_g(f, e), or None."""
    W = phi_table(G, c).tilde[G.index(g)]
    bad = np.argwhere(W != W.T)
    if len(bad) == 0:
        return None
    i, j = bad[0]
    return G.elements[int(i)], G.elements[int(j)]


def _general_solutions(G: AbelianGroup, c: CocycleData, g: GroupElem) -> list[QuasiCharacter]:
    # symmetric Phi~_g outside reduced form: build chi by walking e_1^{h_1}...e_N^{h_N}
    # with chi(x e_l) = chi(x) chi(e_l) / w(x, e_l); chi(e_l)^{m_l} = prod_{j<m_l} w(e_l^j, e_l)
    m = G.moduli
    L = G.exponent
    L2 = G.ambient
    W = phi_table(G, c).tilde[G.index(g)]
    bases = []
    for l in range(G.rank):
        el = G.gen(l)
        rhs = sum(int(W[G.index(G.pow(el, j)), G.index(el)]) for j in range(1, m[l])) % L
        bases.append((rhs * L // m[l]) % (L2 // m[l]))
    out = []
    for ks in itertools.product(*(range(ml) for ml in m)):
        exps = tuple(b + k * (L2 // ml) for b, k, ml in zip(bases, ks, m))
        table = [0] * G.order
        for h in G.elements:
            if h == G.identity:
                continue
            l = max(i for i, v in enumerate(h) if v)
            prev = list(h)
            prev[l] -= 1
            prev = tuple(prev)
            w = int(W[G.index(prev), G.index(G.gen(l))])
            table[G.index(h)] = (table[G.index(prev)] + exps[l] - w * L) % L2
        out.append(QuasiCharacter(tuple(g), exps, L2, tuple(table)))
    return out


def solve_quasicharacters(G: AbelianGroup, c: CocycleData, g: GroupElem) -> list[QuasiCharacter]:
    """All quasi-characters attached to Phi~_g, branch-lexicographic.

    Raises NonSymmetricCocycle when Phi~_g is not symmetric (no solution exists).
    """
    g = G.element(g)
    if not c.is_reduced:
        witness = symmetry_witness(G, c, g)
        if witness is not None:
            raise NonSymmetricCocycle(g, witness)
        return _general_solutions(G, c, g)
    m = G.moduli
    L2 = G.ambient
    bases = lemma_base_exponents(G, c, g)
    return [
        QuasiCharacter(g, tuple(b + k * (L2 // ml) for b, k, ml in zip(bases, ks, m)), L2)
        for ks in itertools.product(*(range(ml) for ml in m))
    ]


@dataclass(frozen=True)
class AdmissibleSeries:
    """(chi_1..chi_n) with degrees g_i = chars[i].g over (G, Phi_c)."""

    G: AbelianGroup
    c: CocycleData
    chars: tuple[QuasiCharacter, ...]

    def __post_init__(self):
        object.__setattr__(self, "chars", tuple(self.chars))
        if not self.chars:
            raise InvalidSeries("an admissible series needs at least one character")

    @property
    def n(self) -> int:
        return len(self.chars)

    @property
    def degrees(self) -> tuple[GroupElem, ...]:
        return tuple(ch.g for ch in self.chars)

    @property
    def alpha(self) -> tuple[tuple[int, ...], ...]:
        return self.degrees

    def value_exp(self, i: int, h: GroupElem) -> int:
        """Exponent (in mu_{L^2}) of chi_i(h)."""
        return self.chars[i].value_exp(h, self.G)

    def value(self, i: int, h: GroupElem) -> RootExp:
        return RootExp(self.G.ambient, self.value_exp(i, h))

    def q_exp(self, i: int, j: int) -> int:
        """Exponent of chi_j(g_i)."""
        return self.value_exp(j, self.chars[i].g)

    @property
    def nilpotency(self) -> tuple[int, ...]:
        return tuple(RootExp(self.G.ambient, self.q_exp(i, i)).multiplicative_order() for i in range(self.n))

    @property
    def branches(self) -> tuple[tuple[int, ...], ...]:
        """Per character, the branch index k_l with chi(e_l) = base_l * z^{k_l L^2/m_l}."""
        m = self.G.moduli
        L2 = self.G.ambient
        return tuple(tuple(e // (L2 // ml) for e, ml in zip(ch.exps, m)) for ch in self.chars)

    def to_json(self) -> dict:
        return {"degrees": [list(g) for g in self.degrees], "chars": [ch.to_json()["values"] for ch in self.chars]}

    @classmethod
    def from_json(cls, G: AbelianGroup, c: CocycleData, d: dict) -> AdmissibleSeries:
        chars = []
        for deg, vals in zip(d["degrees"], d["chars"]):
            g = G.element(deg)
            exps = tuple(RootExp(int(v["order"]), int(v["exp"])).lift(G.ambient).exp for v in vals)
            if c.is_reduced:
                chars.append(QuasiCharacter(g, exps, G.ambient))
            else:
                match = [ch for ch in solve_quasicharacters(G, c, g) if ch.exps == exps]
                if not match:
                    raise InvalidSeries(f"values {exps} are not a quasi-character at degree {g}")
                chars.append(match[0])
        return cls(G, c, tuple(chars))


@dataclass
class AdmissibilityReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def is_quasicharacter(G: AbelianGroup, c: CocycleData, chi: QuasiCharacter) -> tuple | None:
    """First (f, h) violating chi(f)chi(h) = Phi~_g(f,h) chi(fh), or None."""
    W = phi_table(G, c).tilde[G.index(chi.g)]
    L = G.exponent
    scale = chi.order // L
    vals = np.array([chi.value_exp(h, G) for h in G.elements], dtype=np.int64)
    M = G.mul_table
    lhs = vals[:, None] + vals[None, :]
    rhs = W * scale + vals[M]
    bad = np.argwhere((lhs - rhs) % chi.order != 0)
    if vals[G.index(G.identity)] % chi.order:
        return (G.identity, G.identity)
    if len(bad) == 0:
        return None
    i, j = bad[0]
    return G.elements[int(i)], G.elements[int(j)]


def check_admissible(series: AdmissibleSeries, check_association: bool = True) -> AdmissibilityReport:
    """Check non-identity degrees, generation, pairing and diagonal non-triviality."""
    G = series.G
    L2 = G.ambient
    viol = []
    for i, g in enumerate(series.degrees):
        if g == G.identity:
            viol.append(f"degree g_{i + 1} is the identity")
    if not G.generates(series.degrees):
        viol.append("degrees do not generate the group")
    n = series.n
    for i in range(n):
        if series.q_exp(i, i) % L2 == 0:
            viol.append(f"chi_{i + 1}(g_{i + 1}) = 1")
        for j in range(i + 1, n):
            if (series.q_exp(j, i) + series.q_exp(i, j)) % L2:
                viol.append(f"chi_{i + 1}(g_{j + 1}) chi_{j + 1}(g_{i + 1}) != 1")
    if check_association:
        for i, ch in enumerate(series.chars):
            w = is_quasicharacter(G, series.c, ch)
            if w is not None:
                viol.append(f"chi_{i + 1} is not attached to its degree (fails at {w})")
    return AdmissibilityReport(not viol, viol)


def matrix_admissible(G: AbelianGroup, c: CocycleData, alpha: Sequence[Sequence[int]]) -> bool:
    """Whether some admissible series has degree matrix ``alpha``.

    Evaluates the two closed-form conditions on alpha (pairing products equal 1,
    diagonal products differ from 1) where every bracketed m_l-th root ranges
    over all of its branches, plus generation.  Rows are assigned branches by
    backtracking so pairing constraints prune early.
    """
    m = G.moduli
    N = G.rank
    L2 = G.ambient
    rows = [tuple(int(v) % ml for v, ml in zip(r, m)) for r in alpha]
    if not rows or any(len(r) != N for r in rows):
        return False
    if any(r == G.identity for r in rows) or not G.generates(rows):
        return False
    if not c.is_reduced:
        return False
    a2 = c.a2_map
    n = len(rows)
    # root of z_{m_l}^{a_l alpha_il} prod_{t>l} z_{m_t}^{a_lt alpha_it}: exponent in mu_{L^2}
    base = [
        [
            (c.a[l] * r[l] * (L2 // (m[l] * m[l]))
             + sum(a2.get((l, t), 0) * r[t] * (L2 // (m[t] * m[l])) for t in range(l + 1, N)))
            for l in range(N)
        ]
        for r in rows
    ]
    step = [L2 // ml for ml in m]
    options = []
    for i in range(n):
        opts = []
        for ks in itertools.product(*(range(ml) for ml in m)):
            root = [base[i][l] + ks[l] * step[l] for l in range(N)]
            diag = sum(root[l] * rows[i][l] for l in range(N)) % L2
            if diag:
                opts.append(root)
        options.append(opts)

    def pair_ok(ri, i, rj, j) -> bool:
        return (sum(ri[l] * rows[j][l] + rj[l] * rows[i][l] for l in range(N))) % L2 == 0

    chosen: list[list[int]] = []

    def search(i: int) -> bool:
        if i == n:
            return True
        for r in options[i]:
            if all(pair_ok(r, i, chosen[j], j) for j in range(i)):
                chosen.append(r)
                if search(i + 1):
                    return True
                chosen.pop()
        return False

    return search(0)
