"""The bosonization M = S(V) # kG as an explicit Majid algebra.

Basis elements are pairs X (x) g of a basis monomial of S(V) and a group
element; index ``b * |G| + g``.  Product, coproduct, quasi-antipode and the
extended associator follow the smash-product formulas:

    (X(x)g)(Y(x)h) = Phi(xg,y,h)Phi(x,y,g) / (Phi(x,g,y)Phi(xy,g,h)) X(g|>Y) (x) gh
    Delta(X(x)g)   = Phi(x1,x2,g)^-1 (X1 (x) x2 g) (x) (X2 (x) g)
    S(X(x)g)       = Phi(g',g,g') / (Phi(x'g',xg,g')Phi(x,g,g')) (1(x)x'g')(S(X)(x)1),  ' = inverse
    alpha(1(x)g) = 1,  beta(1(x)g) = Phi(g,g',g)^-1,  both 0 on positive length

where lowercase letters are G-degrees.  As in S(V), every product of two
basis elements is a root of unity times a basis element, so the kernels work
with exponents of z = z_{L^2} and integer coefficient vectors mod x^M - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._kernels import coalgebra_mult_first_failure
from .cyclo import CycNumber
from .errors import AlgebraMismatch
from .group import GroupElem
from .nichols import BraidedSpace, CheckResult, Monomial, SpaceTables, _as_cyc
from .qchar import AdmissibleSeries

Basis = tuple[Monomial, GroupElem]


class MajidElement:
    """Sparse combination of basis elements X (x) g with CycNumber coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: MajidAlgebra, terms: Mapping[Basis, CycNumber]):
        self.algebra = algebra
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def _check(self, other) -> None:
        if not isinstance(other, MajidElement) or other.algebra is not self.algebra:
            raise AlgebraMismatch("operands belong to different Majid algebras")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc[k] + v if k in acc else v
        return MajidElement(self.algebra, acc)

    def __neg__(self):
        return MajidElement(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MajidElement):
            return self.algebra.multiply(self, other)
        c = _as_cyc(other, self.algebra.M)
        return MajidElement(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, MajidElement):
            return NotImplemented
        self._check(other)
        return not (self - other).terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"MajidElement({self.algebra.format(self)})"


class MajidAlgebra:
    """S(V) # kG for an admissible series, with dense structure tables."""

    def __init__(self, S: BraidedSpace, tables: SpaceTables | None = None):
        self.S = S
        self.G = S.G
        self.M = S.M
        self.nG = S.G.order
        self.T = tables if tables is not None else SpaceTables(S)
        self.basis: tuple[Basis, ...] = tuple((m, g) for m in S.monomials for g in self.G.elements)
        self.index = {k: i for i, k in enumerate(self.basis)}
        self.dim = len(self.basis)
        T = self.T
        nG = self.nG
        self.gidx = np.tile(np.arange(nG), S.dim)           # group part
        self.bidx = np.repeat(np.arange(S.dim), nG)         # S(V) part
        self.sdeg = T.deg[self.bidx]                         # x
        self.tdeg = T.gmul[self.sdeg, self.gidx]             # xg
        self.length = T.E.sum(axis=1)[self.bidx]
        self.inv = np.array([self.G.index(self.G.inverse(g)) for g in self.G.elements], dtype=np.int64)
        self._mul = None
        self._cop = None
        self._ant = None

    @classmethod
    def build(cls, series: AdmissibleSeries, twist: int = 1) -> MajidAlgebra:
        return cls(BraidedSpace(series, twist=twist))

    # -- structure tables ------------------------------------------------
    def unit_index(self) -> int:
        return self.index[(self.S.unit, self.G.identity)]

    def group_like(self, g: int) -> int:
        return g  # 1 (x) g sits at index 0 * |G| + g

    def mul_exp_pairs(self, a, b):
        """(index, exponent) arrays of the basis products a_k b_k (index -1 for zero)."""
        T = self.T
        phi, gm = T.phi, T.gmul
        X, g = self.bidx[a], self.gidx[a]
        Y, h = self.bidx[b], self.gidx[b]
        x, y = T.deg[X], T.deg[Y]
        w = T.mul_idx[X, Y]
        e = (phi[gm[x, g], y, h] + phi[x, y, g] - phi[x, g, y] - phi[gm[x, y], g, h]
             + T.act[g, Y] + T.mul_exp[X, Y])
        idx = np.where(w >= 0, w * self.nG + gm[g, h], -1)
        return idx, np.where(w >= 0, e % self.M, 0)

    @property
    def mul_table(self):
        """Dense (dim x dim) product table of basis elements: (index, exponent)."""
        if self._mul is None:
            a, b = (x.reshape(-1) for x in np.meshgrid(np.arange(self.dim), np.arange(self.dim), indexing="ij"))
            idx, e = self.mul_exp_pairs(a, b)
            self._mul = (idx.reshape(self.dim, self.dim), e.reshape(self.dim, self.dim))
        return self._mul

    @property
    def coproduct_terms(self):
        """CSR coproduct of every basis element: (starts, left, right, coefficient vectors)."""
        if self._cop is None:
            T = self.T
            own, A, B, C = T.terms
            nG = self.nG
            counts = np.diff(np.searchsorted(own, np.arange(self.S.dim + 1)))
            # element (b, g) repeats the terms of b once per g
            s_start = np.searchsorted(own, np.arange(self.S.dim + 1))
            reps = counts[self.bidx]
            t = np.repeat(s_start[self.bidx], reps) + np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
            g = np.repeat(self.gidx, reps)
            a, b = A[t], B[t]
            x1, x2 = T.deg[a], T.deg[b]
            e = -T.phi[x1, x2, g]
            left = a * nG + T.gmul[x2, g]
            right = b * nG + g
            s = np.arange(self.M)
            coef = np.take_along_axis(C[t], (s[None, :] - e[:, None]) % self.M, axis=1)
            starts = np.concatenate([[0], np.cumsum(reps)])
            self._cop = (starts, left, right, coef)
        return self._cop

    @property
    def antipode_rows(self):
        """Dense quasi-antipode: ``rows[a, c]`` is the coefficient vector of basis c in S(a)."""
        if self._ant is None:
            T = self.T
            phi, gm, inv = T.phi, T.gmul, self.inv
            Sd = T.antipode  # (D, D, M)
            nG, M = self.nG, self.M
            out = np.zeros((self.dim, self.dim, M), dtype=np.int64)
            s_ = np.arange(M)
            for a in range(self.dim):
                X, g = int(self.bidx[a]), int(self.gidx[a])
                x = int(T.deg[X])
                gi = int(inv[g])
                k = int(inv[gm[x, g]])  # x^-1 g^-1
                e0 = phi[gi, g, gi] - phi[k, gm[x, g], gi] - phi[x, g, gi]
                for s in np.flatnonzero(Sd[X].any(axis=1)):
                    # (1 (x) k)(s (x) 1) = (k |> s) (x) k
                    e = (e0 + T.act[k, s]) % M
                    out[a, s * nG + k] = np.take_along_axis(Sd[X, s][None, :], ((s_ - e) % M)[None, :], axis=1)[0]
            self._ant = out
        return self._ant

    def alpha_exp(self, a: int) -> int | None:
        """Exponent of alpha on a basis element, None when alpha vanishes."""
        return 0 if self.length[a] == 0 else None

    def beta_exp(self, a: int) -> int | None:
        if self.length[a]:
            return None
        g = int(self.gidx[a])
        return int(-self.T.phi[g, self.inv[g], g]) % self.M

    def associator_exp(self, a: int, b: int, c: int) -> int | None:
        """Exponent of Phi_M on basis elements: Phi(g,h,e) on 1(x)g etc., None (zero) otherwise."""
        if self.length[a] or self.length[b] or self.length[c]:
            return None
        return int(self.T.phi[self.gidx[a], self.gidx[b], self.gidx[c]])

    # -- element level -------------------------------------------------------
    def element(self, terms: Mapping) -> MajidElement:
        return MajidElement(self, {(tuple(m), self.G.element(g)): _as_cyc(c, self.M) for (m, g), c in terms.items()})

    def basis_element(self, mono, g, coeff=1) -> MajidElement:
        return self.element({(mono, g): coeff})

    def generator(self, i: int) -> MajidElement:
        mono = [0] * self.S.n
        mono[i] = 1
        return self.basis_element(tuple(mono), self.G.identity)

    def group_element(self, g) -> MajidElement:
        return self.basis_element(self.S.unit, g)

    def one(self) -> MajidElement:
        return self.group_element(self.G.identity)

    def _vec_to_cyc(self, v) -> CycNumber:
        return CycNumber(self.M, [int(x) for x in v])

    def multiply(self, u: MajidElement, v: MajidElement) -> MajidElement:
        u._check(v)
        acc: dict = {}
        keys_u = list(u.terms)
        keys_v = list(v.terms)
        if not keys_u or not keys_v:
            return MajidElement(self, {})
        a = np.array([self.index[k] for k in keys_u for _ in keys_v], dtype=np.int64)
        b = np.array([self.index[k] for _ in keys_u for k in keys_v], dtype=np.int64)
        idx, e = self.mul_exp_pairs(a, b)
        for n, (i, ex) in enumerate(zip(idx.tolist(), e.tolist())):
            if i < 0:
                continue
            cu = u.terms[keys_u[n // len(keys_v)]]
            cv = v.terms[keys_v[n % len(keys_v)]]
            key = self.basis[i]
            val = (cu * cv).mul_root(ex)
            acc[key] = acc[key] + val if key in acc else val
        return MajidElement(self, acc)

    def coproduct(self, u: MajidElement) -> dict[tuple[Basis, Basis], CycNumber]:
        starts, left, right, coef = self.coproduct_terms
        acc: dict = {}
        for k, c in u.terms.items():
            a = self.index[k]
            for t in range(starts[a], starts[a + 1]):
                key = (self.basis[left[t]], self.basis[right[t]])
                val = c * self._vec_to_cyc(coef[t])
                acc[key] = acc[key] + val if key in acc else val
        return {k: v for k, v in acc.items() if not v.is_zero()}

    def antipode(self, u: MajidElement) -> MajidElement:
        rows = self.antipode_rows
        acc: dict = {}
        for k, c in u.terms.items():
            a = self.index[k]
            for t in np.flatnonzero(rows[a].any(axis=1)):
                key = self.basis[t]
                val = c * self._vec_to_cyc(rows[a, t])
                acc[key] = acc[key] + val if key in acc else val
        return MajidElement(self, acc)

    def counit(self, u: MajidElement) -> CycNumber:
        zero = CycNumber.zero(self.M)
        return sum((c for (m, _), c in u.terms.items() if m == self.S.unit), zero)

    def _functional(self, u: MajidElement, which) -> CycNumber:
        out = CycNumber.zero(self.M)
        for k, c in u.terms.items():
            e = which(self.index[k])
            if e is not None:
                out = out + c.mul_root(e)
        return out

    def alpha(self, u: MajidElement) -> CycNumber:
        return self._functional(u, self.alpha_exp)

    def beta(self, u: MajidElement) -> CycNumber:
        return self._functional(u, self.beta_exp)

    def format(self, u: MajidElement, name: str = "z") -> str:
        if not u.terms:
            return "0"
        parts = []
        for (m, g) in sorted(u.terms):
            mono = " ".join(f"X{i + 1}^{k}" if k > 1 else f"X{i + 1}" for i, k in enumerate(m) if k) or "1"
            grp = " ".join(f"e{l + 1}^{k}" if k > 1 else f"e{l + 1}" for l, k in enumerate(g) if k) or "1"
            parts.append(f"{u.terms[(m, g)].format(name)} * {mono} (x) {grp}")
        return " + ".join(parts)


def smash_multiply(M: MajidAlgebra, u: MajidElement, v: MajidElement) -> MajidElement:
    return M.multiply(u, v)


def smash_coproduct(M: MajidAlgebra, u: MajidElement) -> dict:
    return M.coproduct(u)


def smash_antipode(M: MajidAlgebra, u: MajidElement) -> MajidElement:
    return M.antipode(u)


# -- axiom verification ------------------------------------------------------


@dataclass
class MajidReport:
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.checks.values())

    def summary(self) -> str:
        return ", ".join(f"{k}={'ok' if r.ok else 'FAIL'}({r.checked})" for k, r in self.checks.items())

    def first_failure(self):
        for k, r in self.checks.items():
            if not r.ok:
                return k, r.witness
        return None


def _zero_rows(M: MajidAlgebra, vecs):
    return ~(vecs @ M.T.R).any(axis=-1) if len(vecs) else np.zeros(0, dtype=bool)


def _residual(M: MajidAlgebra, keys, vecs):
    """Keys whose accumulated coefficient vector is nonzero in Q(z_M)."""
    if not len(keys):
        return keys
    uk, inv = np.unique(keys, return_inverse=True)
    acc = np.zeros((len(uk), M.M), dtype=np.int64)
    np.add.at(acc, inv.reshape(-1), vecs)
    return uk[~_zero_rows(M, acc)]


def _rotate(vecs, e, M):
    s = np.arange(M)
    return np.take_along_axis(vecs, (s[None, :] - np.asarray(e)[:, None]) % M, axis=1)


def _conv(cu, dv, M):
    from .nichols import _rotate_conv

    return _rotate_conv(cu, dv, np.zeros(len(cu), dtype=np.int64), M)


def generator_indices(M: MajidAlgebra) -> np.ndarray:
    """Basis indices of the generators X_i (x) 1 and all group-likes 1 (x) g."""
    gens = [M.index[(tuple(1 if j == i else 0 for j in range(M.S.n)), M.G.identity)] for i in range(M.S.n)]
    gens += [M.index[(M.S.unit, g)] for g in M.G.elements]
    return np.array(sorted(gens), dtype=np.int64)


def verify_majid_axioms(
    M: MajidAlgebra,
    mode: str = "auto",
    seed: int = 0,
    samples: int = 10000,
    element_samples: int | None = None,
) -> MajidReport:
    """Check the Majid-algebra axioms of M on basis tuples.

    ``exhaustive`` covers all basis triples and pairs; ``sampled`` draws
    ``samples`` seeded triples and pairs and additionally runs every triple of
    generators.  The per-element identities (coassociativity, counit, the
    quasi-antipode laws) run on all basis elements unless ``element_samples``
    limits them.  ``auto`` is exhaustive up to dimension 64.
    """
    if mode == "auto":
        mode = "exhaustive" if M.dim <= 64 else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    n = M.dim
    Mo = M.M
    T = M.T
    checks = {k: CheckResult() for k in (
        "quasi_assoc", "coassoc", "counit", "delta_mult",
        "antipode_alpha", "antipode_beta", "antipode_phi", "antipode_phi_inv",
    )}
    mi, me = M.mul_table

    # quasi-associativity [(ab)c] = Phi(g,h,e)/Phi(xg,yh,ze) a(bc)
    if mode == "exhaustive":
        a, b, c = (x.reshape(-1) for x in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    else:
        gens = generator_indices(M)
        ga, gb, gc = (x.reshape(-1) for x in np.meshgrid(gens, gens, gens, indexing="ij"))
        ra, rb, rc = rng.integers(0, n, size=(3, samples))
        a, b, c = np.concatenate([ga, ra]), np.concatenate([gb, rb]), np.concatenate([gc, rc])
    ab, bc = mi[a, b], mi[b, c]
    lhs_i = np.where(ab >= 0, mi[np.maximum(ab, 0), c], -1)
    rhs_i = np.where(bc >= 0, mi[a, np.maximum(bc, 0)], -1)
    lhs_e = me[a, b] + me[np.maximum(ab, 0), c]
    rhs_e = (me[b, c] + me[a, np.maximum(bc, 0)] + T.phi[M.gidx[a], M.gidx[b], M.gidx[c]]
             - T.phi[M.tdeg[a], M.tdeg[b], M.tdeg[c]])
    bad = (lhs_i != rhs_i) | ((lhs_i >= 0) & ((lhs_e - rhs_e) % Mo != 0))
    checks["quasi_assoc"].checked = len(a)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        checks["quasi_assoc"].fail(tuple(M.basis[int(x[k])] for x in (a, b, c)))

    # Delta(ab) = Delta(a) Delta(b) with the componentwise product on M (x) M
    starts, left, right, coef = M.coproduct_terms
    if mode == "exhaustive":
        pu, pv = (x.reshape(-1) for x in np.meshgrid(np.arange(n), np.arange(n), indexing="ij"))
    else:
        pu, pv = rng.integers(0, n, size=(2, samples))
    k = coalgebra_mult_first_failure(pu.astype(np.int64), pv.astype(np.int64), starts.astype(np.int64),
                                     left, right, np.ascontiguousarray(coef), mi, me, T.R, Mo, n)
    checks["delta_mult"].checked = len(pu)
    if k >= 0:
        checks["delta_mult"].fail((M.basis[int(pu[k])], M.basis[int(pv[k])]))

    elems = np.arange(n)
    if element_samples is not None and element_samples < n:
        elems = np.sort(rng.choice(n, size=element_samples, replace=False))
    _check_coalgebra(M, elems, checks)
    _check_quasi_antipode(M, elems, checks)
    return MajidReport(checks)


def _expand(starts, parents):
    cnt = starts[parents + 1] - starts[parents]
    rep = np.repeat(np.arange(len(parents)), cnt)
    offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return rep, starts[parents][rep] + offs


def _check_coalgebra(M: MajidAlgebra, elems, checks) -> None:
    starts, left, right, coef = M.coproduct_terms
    n, Mo = M.dim, M.M
    r0, t0 = _expand(starts, elems)
    own, L1, R1, C1 = elems[r0], left[t0], right[t0], coef[t0]
    # strict coassociativity (Delta (x) id)Delta = (id (x) Delta)Delta
    r, t = _expand(starts, L1)
    lk = ((own[r] * n + left[t]) * n + right[t]) * n + R1[r]
    lv = _conv(C1[r], coef[t], Mo)
    r2, t2 = _expand(starts, R1)
    rk = ((own[r2] * n + L1[r2]) * n + left[t2]) * n + right[t2]
    rv = _conv(C1[r2], coef[t2], Mo)
    bad = _residual(M, np.concatenate([lk, rk]), np.concatenate([lv, -rv]))
    checks["coassoc"].checked = len(elems)
    if len(bad):
        checks["coassoc"].fail(M.basis[int(bad[0] // n ** 3)])
    # counit: eps(X (x) g) = eps(X)
    ident = np.zeros((len(elems), Mo), dtype=np.int64)
    ident[:, 0] = 1
    for side, leg, other in (("left", L1, R1), ("right", R1, L1)):
        mask = M.length[leg] == 0
        keys = np.concatenate([own[mask] * n + other[mask], elems * n + elems])
        vecs = np.concatenate([C1[mask], -ident])
        bad = _residual(M, keys, vecs)
        if len(bad):
            checks["counit"].fail(M.basis[int(bad[0] // n)])
    checks["counit"].checked = len(elems)


def _check_quasi_antipode(M: MajidAlgebra, elems, checks) -> None:
    """The zig-zag identities with alpha, beta and the associator.

    Iterated coproducts are left-nested, Delta^2 = (Delta (x) id)Delta; terms
    are pruned as soon as a leg that must meet alpha, beta or the associator has
    positive length, since those vanish there and S preserves length.
    """
    starts, left, right, coef = M.coproduct_terms
    rows = M.antipode_rows
    mi, me = M.mul_table
    n, Mo = M.dim, M.M
    unit = M.unit_index()
    s_own, s_idx = np.nonzero(rows.any(axis=2))
    s_coef = rows[s_own, s_idx]
    s_start = np.searchsorted(s_own, np.arange(n + 1))

    # Delta^2 terms (a1, a2, a3) with a2 group-like
    r0, t0 = _expand(starts, elems)
    r1, t1 = _expand(starts, left[t0])
    keep = M.length[right[t1]] == 0
    r1, t1 = r1[keep], t1[keep]
    owner = elems[r0][r1]
    a1, a2, a3 = left[t1], right[t1], right[t0][r1]
    c12 = _conv(coef[t0][r1], coef[t1], Mo)

    for name, sided in (("antipode_alpha", 0), ("antipode_beta", 1)):
        if sided == 0:
            # S(a1) alpha(a2) a3 = alpha(a) 1
            scal = np.zeros(len(a2), dtype=np.int64)  # alpha(1 (x) g) = 1
            src, other = a1, a3
        else:
            # a1 beta(a2) S(a3) = beta(a) 1
            scal = np.array([M.beta_exp(int(x)) for x in a2], dtype=np.int64)
            src, other = a3, a1
        rr, st = _expand(s_start, src)
        s_terms = s_idx[st]
        if sided == 0:
            pi, pe = mi[s_terms, other[rr]], me[s_terms, other[rr]]
        else:
            pi, pe = mi[other[rr], s_terms], me[other[rr], s_terms]
        ok = pi >= 0
        vecs = _conv(_rotate(c12[rr][ok], (scal[rr] + pe)[ok], Mo), s_coef[st][ok], Mo)
        keys = owner[rr][ok] * n + pi[ok]
        # right-hand side alpha(a) 1 or beta(a) 1
        expect = np.zeros((len(elems), Mo), dtype=np.int64)
        for i, a in enumerate(elems):
            e = M.alpha_exp(int(a)) if sided == 0 else M.beta_exp(int(a))
            if e is not None:
                expect[i, e % Mo] = 1
        bad = _residual(M, np.concatenate([keys, elems * n + unit]), np.concatenate([vecs, -expect]))
        checks[name].checked = len(elems)
        if len(bad):
            checks[name].fail(M.basis[int(bad[0] // n)])

    # Phi(a1,S(a3),a5) beta(a2) alpha(a4) = eps(a) = Phi^-1(S(a1),a3,S(a5)) alpha(a2) beta(a4)
    for name, inverse in (("antipode_phi", False), ("antipode_phi_inv", True)):
        checks[name].checked = len(elems)
        for a in elems.tolist():
            total = CycNumber.zero(Mo)
            for legs, c in _pruned_iterated(M, a, 4):
                g = [int(M.gidx[x]) for x in legs]
                gi = [int(M.inv[x]) for x in g]
                if not inverse:
                    e = M.T.phi[g[0], gi[2], g[4]] + M.beta_exp(legs[1]) + M.alpha_exp(legs[3])
                else:
                    e = -M.T.phi[gi[0], g[2], gi[4]] + M.alpha_exp(legs[1]) + M.beta_exp(legs[3])
                total = total + c.mul_root(int(e))
            want = CycNumber.one(Mo) if M.length[a] == 0 else CycNumber.zero(Mo)
            if total != want:
                checks[name].fail(M.basis[a])
                break


def _pruned_iterated(M: MajidAlgebra, a: int, times: int):
    """Left-nested Delta^times of a basis element, keeping only all-group-like legs.

    A positive-length leg never splits into group-likes only, so such terms are
    dropped at every stage; S of a group-like is a group-like (up to scalar).
    """
    starts, left, right, coef = M.coproduct_terms
    terms = [((a,), CycNumber.one(M.M))]
    for _ in range(times):
        nxt = []
        for legs, c in terms:
            head = legs[0]
            for t in range(starts[head], starts[head + 1]):
                if M.length[left[t]] or M.length[right[t]]:
                    continue
                nxt.append(((int(left[t]), int(right[t])) + legs[1:], c * M._vec_to_cyc(coef[t])))
        terms = nxt
    return terms


def verify_hopf_axioms(M: MajidAlgebra, dim_limit: int = 64) -> MajidReport:
    """Ordinary Hopf-algebra axioms on all basis elements, with no associator.

    Meant for the trivial-cocycle case, where M must be strictly associative
    with an honest antipode.  Uses the element-level API only.
    """
    if M.dim > dim_limit:
        from .errors import DimensionLimitExceeded

        raise DimensionLimitExceeded(f"dim {M.dim} exceeds {dim_limit}")
    checks = {k: CheckResult() for k in ("assoc", "unit", "coassoc", "counit", "delta_mult", "antipode")}
    basis = [M.basis_element(m, g) for m, g in M.basis]
    one = M.one()
    zero = CycNumber.zero(M.M)

    def tensor_eq(x: dict, y: dict) -> bool:
        return all((x.get(k, zero) - y.get(k, zero)).is_zero() for k in set(x) | set(y))

    def add(acc: dict, k, v) -> None:
        acc[k] = acc[k] + v if k in acc else v

    def elt(k) -> MajidElement:
        return M.basis_element(*k)

    for a, b, c in ((a, b, c) for a in basis for b in basis for c in basis):
        checks["assoc"].checked += 1
        if (a * b) * c != a * (b * c):
            checks["assoc"].fail((list(a.terms)[0], list(b.terms)[0], list(c.terms)[0]))
    for a in basis:
        key = list(a.terms)[0]
        checks["unit"].checked += 1
        if one * a != a or a * one != a:
            checks["unit"].fail(key)
        d = M.coproduct(a)
        # (Delta (x) id) Delta = (id (x) Delta) Delta
        left: dict = {}
        right: dict = {}
        for (k1, k2), c in d.items():
            for (l1, l2), c2 in M.coproduct(elt(k1)).items():
                add(left, (l1, l2, k2), c * c2)
            for (r1, r2), c2 in M.coproduct(elt(k2)).items():
                add(right, (k1, r1, r2), c * c2)
        checks["coassoc"].checked += 1
        if not tensor_eq(left, right):
            checks["coassoc"].fail(key)
        # (eps (x) id) Delta = id = (id (x) eps) Delta
        e_left = M.element({})
        e_right = M.element({})
        anti_l = M.element({})
        anti_r = M.element({})
        for (k1, k2), c in d.items():
            e_left = e_left + elt(k2) * (c * M.counit(elt(k1)))
            e_right = e_right + elt(k1) * (c * M.counit(elt(k2)))
            anti_l = anti_l + (M.antipode(elt(k1)) * elt(k2)) * c
            anti_r = anti_r + (elt(k1) * M.antipode(elt(k2))) * c
        checks["counit"].checked += 1
        if e_left != a or e_right != a:
            checks["counit"].fail(key)
        checks["antipode"].checked += 1
        target = one * M.counit(a)
        if anti_l != target or anti_r != target:
            checks["antipode"].fail(key)
    for a in basis:
        for b in basis:
            checks["delta_mult"].checked += 1
            prod_: dict = {}
            for (k1, k2), c in M.coproduct(a).items():
                for (l1, l2), c2 in M.coproduct(b).items():
                    x = elt(k1) * elt(l1)
                    y = elt(k2) * elt(l2)
                    for kx, vx in x.terms.items():
                        for ky, vy in y.terms.items():
                            add(prod_, (kx, ky), c * c2 * vx * vy)
            if not tensor_eq(M.coproduct(a * b), prod_) or M.counit(a * b) != M.counit(a) * M.counit(b):
                checks["delta_mult"].fail((list(a.terms)[0], list(b.terms)[0]))
    return MajidReport(checks)


# -- coinvariants -----------------------------------------------------------


@dataclass
class RoundtripReport:
    ok: bool
    dim_R: int
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _nullspace(columns: list[dict], size: int) -> list[dict]:
    """Exact kernel of a sparse linear map given by its images of basis vectors.

    ``columns[j]`` maps output keys to CycNumber; returns kernel vectors as
    {basis index: coefficient}.  Gaussian elimination over Q(z) on the
    connected components of the incidence graph between inputs and outputs.
    """
    parent = list(range(size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    for j, col in enumerate(columns):
        for key in col:
            if key in owner:
                ri, rj = find(owner[key]), find(j)
                if ri != rj:
                    parent[ri] = rj
            else:
                owner[key] = j
    blocks: dict[int, list[int]] = {}
    for j in range(size):
        blocks.setdefault(find(j), []).append(j)
    kernel = []
    for cols in blocks.values():
        keys = sorted({k for j in cols for k in columns[j]})
        # rows = keys, columns = cols; reduce to echelon form
        mat = [[columns[j].get(k) for j in cols] for k in keys]
        pivots = []
        row = 0
        for cidx in range(len(cols)):
            piv = next((r for r in range(row, len(mat)) if mat[r][cidx] is not None and not mat[r][cidx].is_zero()), None)
            if piv is None:
                continue
            mat[row], mat[piv] = mat[piv], mat[row]
            inv = mat[row][cidx].inv()
            mat[row] = [None if v is None else v * inv for v in mat[row]]
            for r in range(len(mat)):
                if r != row and mat[r][cidx] is not None and not mat[r][cidx].is_zero():
                    f = mat[r][cidx]
                    mat[r] = [_sub(mat[r][q], f, mat[row][q]) for q in range(len(cols))]
            pivots.append(cidx)
            row += 1
        one = CycNumber.one(columns_order(columns, cols))
        for fq in (q for q in range(len(cols)) if q not in pivots):
            vec = {cols[fq]: one}
            for r, pq in enumerate(pivots):
                v = mat[r][fq]
                if v is not None and not v.is_zero():
                    vec[cols[pq]] = -v
            kernel.append(vec)
    return kernel


def columns_order(columns: list[dict], cols: list[int]) -> int:
    for j in cols:
        for v in columns[j].values():
            return v.order
    return 1


def _sub(a, f, b):
    if b is None or b.is_zero():
        return a
    prod = f * b
    return -prod if a is None else a - prod


def coinvariants(M: MajidAlgebra) -> list[dict[int, CycNumber]]:
    """Basis of R = {u : (id (x) pi) Delta(u) = u (x) 1} as sparse vectors over basis indices."""
    starts, left, right, coef = M.coproduct_terms
    unit = M.unit_index()
    one = CycNumber.one(M.M)
    columns = []
    for a in range(M.dim):
        col: dict = {}
        for t in range(starts[a], starts[a + 1]):
            if M.length[right[t]] == 0:
                key = (int(left[t]), int(right[t]))
                col[key] = col.get(key, CycNumber.zero(M.M)) + M._vec_to_cyc(coef[t])
        key = (a, unit)
        col[key] = col.get(key, CycNumber.zero(M.M)) - one
        columns.append({k: v for k, v in col.items() if not v.is_zero()})
    return _nullspace(columns, M.dim)


def coinvariants_roundtrip(M: MajidAlgebra) -> RoundtripReport:
    """Rebuild S(V) from the coinvariants of M and compare every structure map.

    R must be spanned by the X (x) 1.  On R: the G-grading from the left
    coaction, the action f |> X = Phi(fx,f',f)/Phi(f,f',f) (f X) f', the
    inherited product, Delta_R(X) = Phi(x1,x2,x2') X1 x2' (x) X2, the counit
    and S_R(X) = Phi(x,x',x)^-1 x S(X), with ' = inverse, all compared
    exactly against S(V).
    """
    S, T = M.S, M.T
    nG, Mo = M.nG, M.M
    fails: list[str] = []
    R = coinvariants(M)
    # each kernel vector must be a single X (x) 1 up to scalar; normalize it
    ident = M.G.index(M.G.identity)
    rmap: dict[int, int] = {}
    for v in R:
        if len(v) != 1:
            fails.append(f"coinvariant vector with {len(v)} terms")
            continue
        (j,) = v
        if M.gidx[j] != ident:
            fails.append(f"coinvariant {M.basis[j]} has a nontrivial group part")
            continue
        rmap[int(M.bidx[j])] = j
    if len(R) != S.dim or sorted(rmap) != list(range(S.dim)):
        fails.append(f"dim R = {len(R)} but S(V) has dimension {S.dim}")
        return RoundtripReport(False, len(R), fails)

    mi, me = M.mul_table
    starts, left, right, coef = M.coproduct_terms
    phi, gm, inv = T.phi, T.gmul, M.inv

    group_like = M.group_like

    # G-grading from the left coaction (pi (x) id)Delta
    for b, j in rmap.items():
        degs = {int(M.tdeg[left[t]]) for t in range(starts[j], starts[j + 1])
                if M.length[left[t]] == 0 and right[t] == j}
        if degs != {int(T.deg[b])}:
            fails.append(f"grading of {S.monomials[b]}: {degs}")
    # product
    for b1, j1 in rmap.items():
        for b2, j2 in rmap.items():
            w, e = int(mi[j1, j2]), int(me[j1, j2])
            ws, es = int(T.mul_idx[b1, b2]), int(T.mul_exp[b1, b2])
            if (w < 0) != (ws < 0) or (w >= 0 and (M.bidx[w] != ws or M.gidx[w] != ident or (e - es) % Mo)):
                fails.append(f"product {S.monomials[b1]} * {S.monomials[b2]}")
    # action f |> X
    for b, j in rmap.items():
        x = int(T.deg[b])
        for f in range(nG):
            fi = int(inv[f])
            fx = int(mi[group_like(f), j])
            if fx < 0:
                fails.append("f . X vanished")
                continue
            w = int(mi[fx, group_like(fi)])
            e = int(me[group_like(f), j] + me[fx, group_like(fi)]) + phi[gm[f, x], fi, f] - phi[f, fi, f]
            if w != j or (e - T.act[f, b]) % Mo:
                fails.append(f"action of {M.G.elements[f]} on {S.monomials[b]}")
    # counit
    for b, j in rmap.items():
        if (M.length[j] == 0) != (b == 0):
            fails.append("counit")
    # Delta_R against Delta_S
    own, TA, TB, TC = T.terms
    s_start = np.searchsorted(own, np.arange(S.dim + 1))
    for b, j in rmap.items():
        got: dict = {}
        for t in range(starts[j], starts[j + 1]):
            m1, m2 = int(left[t]), int(right[t])
            if M.gidx[m2] != ident:
                fails.append("second coproduct leg leaves R")
                continue
            x2 = int(M.sdeg[m2])
            x1 = int(M.sdeg[m1])  # R-degree of X1 = left degree * right degree^-1
            w = int(mi[m1, group_like(int(inv[x2]))])
            if w < 0:
                continue
            e = int(me[m1, group_like(int(inv[x2]))]) + phi[x1, x2, inv[x2]]
            key = (int(M.bidx[w]), int(M.bidx[m2]))
            if M.gidx[w] != ident:
                fails.append("first coproduct leg leaves R")
            got[key] = got.get(key, CycNumber.zero(Mo)) + M._vec_to_cyc(coef[t]).mul_root(e)
        want = {(int(TA[t]), int(TB[t])): M._vec_to_cyc(TC[t]) for t in range(s_start[b], s_start[b + 1])}
        keys = set(got) | set(want)
        z = CycNumber.zero(Mo)
        if any(got.get(k, z) != want.get(k, z) for k in keys):
            fails.append(f"Delta_R of {S.monomials[b]}")
    # S_R against the antipode of S(V)
    rows = M.antipode_rows
    Sd = T.antipode
    for b, j in rmap.items():
        x = int(T.deg[b])
        xi = int(inv[x])
        got: dict = {}
        for c in np.flatnonzero(rows[j].any(axis=1)):
            w = int(mi[group_like(x), c])
            if w < 0:
                continue
            e = int(me[group_like(x), c]) - phi[x, xi, x]
            got[w] = got.get(w, CycNumber.zero(Mo)) + M._vec_to_cyc(rows[j, c]).mul_root(e)
        z = CycNumber.zero(Mo)
        for w, v in got.items():
            if M.gidx[w] != ident and not v.is_zero():
                fails.append("S_R leaves R")
        for s in range(S.dim):
            if got.get(rmap[s], z) != M._vec_to_cyc(Sd[b, s]):
                fails.append(f"S_R of {S.monomials[b]}")
                break
    return RoundtripReport(not fails, len(R), fails)


# -- presentation ---------------------------------------------------------


def present(M: MajidAlgebra) -> dict:
    """Presentation of M, with every relation coefficient re-derived from M itself."""
    from .classify import present_majid

    doc = present_majid(M.G, M.S.c, M.S.series)
    S = M.S
    L2 = M.M
    for rel in doc["relations"]:
        if rel["kind"] == "group":
            l, j = (int(t[1:]) - 1 for t in rel["lhs"].split())
            e_l = M.group_element(M.G.gen(l))
            X = M.generator(j)
            lhs = M.multiply(e_l, X)
            rhs = M.multiply(X, e_l)
        elif rel["kind"] == "swap":
            i, j = (int(t[1:]) - 1 for t in rel["lhs"].split())
            lhs = M.multiply(M.generator(i), M.generator(j))
            rhs = M.multiply(M.generator(j), M.generator(i))
        else:
            continue
        want = rhs * CycNumber.root(L2, rel["coeff"]["exp"] * (L2 // rel["coeff"]["order"]))
        if lhs != want:
            raise AssertionError(f"relation {rel['lhs']} = c {rel['rhs']} fails in the constructed algebra")
    # nilpotency: X^{->N} vanishes and X^{->N-1} does not
    for i, N in enumerate(doc["N"]):
        p = M.generator(i)
        for _ in range(N - 2):
            p = M.multiply(p, M.generator(i))
        if p.is_zero() or not M.multiply(p, M.generator(i)).is_zero():
            raise AssertionError(f"X{i + 1} does not have nilpotency order {N}")
    doc["dim"] = M.dim
    return doc
