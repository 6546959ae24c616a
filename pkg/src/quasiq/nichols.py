"""The braided linear space S(V) attached to an admissible series.

S(V) is the quasi-associative algebra generated by X_1..X_n with
X_i X_j = chi_j(g_i) X_j X_i and left-normed powers X_i^{->N_i} = 0.  Its
basis is the left-normed ordered monomials X_1^{->k_1} ... X_n^{->k_n}
(fully left-bracketed words), with k_i < N_i.

Every structure constant between basis elements is a root of unity, so the
kernels work with integer exponents of z = z_{L^2}; public results are
sparse maps with :class:`CycNumber` coefficients.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping

from ._kernels import antipode_table, coproduct_tables, delta_mult_first_failure, quasi_assoc_first_failure
from .cyclo import CycNumber, RootExp, qbinom
from .errors import InvalidSeries, NonReducedCocycle, SpaceMismatch
from .group import AbelianGroup, CocycleData, GroupElem
from .qchar import AdmissibleSeries, check_admissible, phi_table

Monomial = tuple[int, ...]


class BraidedSpace:
    """S(V) for an admissible series, with memoized structure constants.

    ``nilpotency`` may override the truncation orders N_i (e.g. to compute in
    the tensor algebra of a single generator); ``twist`` selects the exponent
    of Phi~_g in the product rule for the action (+1 is the convention forced
    by the Yetter-Drinfeld module structure of the product).
    """

    def __init__(
        self,
        series: AdmissibleSeries,
        nilpotency: Iterable[int] | None = None,
        check: bool = True,
        twist: int = 1,
    ):
        if check:
            report = check_admissible(series)
            if not report.ok:
                raise InvalidSeries("; ".join(report.violations))
        if twist not in (1, -1):
            raise ValueError("twist must be +1 or -1")
        self.series = series
        self.G: AbelianGroup = series.G
        self.c: CocycleData = series.c
        if not self.c.is_reduced:
            raise NonReducedCocycle("S(V) is only built for reduced cocycles (a3 = 0)")
        self.n = series.n
        self.twist = twist
        G = self.G
        self.L = G.exponent
        self.M = G.ambient
        natural = series.nilpotency
        self.N = tuple(nilpotency) if nilpotency is not None else natural
        if len(self.N) != self.n or any(k < 1 for k in self.N):
            raise ValueError(f"bad nilpotency vector {self.N}")
        self.gidx = tuple(G.index(g) for g in series.degrees)
        scale = self.M // self.L
        table = phi_table(G, self.c)
        self._phi = (table.table * scale).tolist()
        self._tilde = (table.tilde * scale).tolist()
        self._mul = G.mul_table.tolist()
        self._inv = [G.index(G.inverse(x)) for x in G.elements]
        # chi[i][h] = exponent of chi_i(h)
        self._chi = [[series.value_exp(i, h) for h in G.elements] for i in range(self.n)]
        self.monomials: tuple[Monomial, ...] = tuple(itertools.product(*(range(k) for k in self.N)))
        self._deg: dict[Monomial, int] = {}
        for mono in self.monomials:
            d = 0
            for i, k in enumerate(mono):
                for _ in range(k):
                    d = self._mul[d][self.gidx[i]]
            self._deg[mono] = d
        self.unit: Monomial = (0,) * self.n
        self._lock = threading.Lock()
        self._mul_memo: dict = {}
        self._act_memo: dict = {}
        self._cop_memo: dict = {}
        self._ant_memo: dict = {}
        self.swap_checks = 0

    # -- basic data ------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.monomials)

    def deg(self, mono: Monomial) -> int:
        """Group-element index of the G-degree of a basis monomial."""
        d = self._deg.get(mono)
        if d is None:
            d = 0
            for i, k in enumerate(mono):
                for _ in range(k):
                    d = self._mul[d][self.gidx[i]]
        return d

    def degree(self, mono: Monomial) -> GroupElem:
        return self.G.elements[self.deg(mono)]

    def phi(self, x: int, y: int, z: int) -> int:
        return self._phi[x][y][z]

    def q_exp(self, i: int, j: int) -> int:
        """Exponent of chi_j(g_i)."""
        return self._chi[j][self.gidx[i]]

    def valid(self, mono: Monomial) -> bool:
        return all(0 <= k < N for k, N in zip(mono, self.N))

    @staticmethod
    def word(mono: Monomial) -> list[int]:
        return [i for i, k in enumerate(mono) for _ in range(k)]

    # -- kernels on exponents ----------------------------------------------
    def basis_mul(self, u: Monomial, v: Monomial) -> tuple[Monomial, int] | None:
        """L(u) * L(v) = z^e L(w); returns (w, e) or None for zero."""
        key = (u, v)
        hit = self._mul_memo.get(key, False)
        if hit is not False:
            return hit
        res = self._basis_mul(u, v)
        self._mul_memo[key] = res
        return res

    def _basis_mul(self, u: Monomial, v: Monomial) -> tuple[Monomial, int] | None:
        # Peel the right factor one letter at a time: with v = v' X_j,
        #   L(u) L(v) = Phi(u, v', g_j) (L(u) L(v')) X_j,
        # then move X_j left past every larger letter of the sorted word; a swap
        #   ((p X_k) X_j) -> Phi(p,k,j)^-1 chi_j(g_k) Phi(p,j,k) ((p X_j) X_k)
        # costs chi_j(g_k) once the two reassociation factors cancel.
        if v == self.unit:
            return u, 0
        j = max(i for i, k in enumerate(v) if k)
        vp = list(v)
        vp[j] -= 1
        vp = tuple(vp)
        r = self.basis_mul(u, vp)
        if r is None:
            return None
        w, e = r
        phi = self._phi
        mul = self._mul
        gj = self.gidx[j]
        e += phi[self.deg(u)][self.deg(vp)][gj]
        # prefix degree before the block of letters > j
        p = 0
        for i in range(j + 1):
            for _ in range(w[i]):
                p = mul[p][self.gidx[i]]
        # walk the letters > j from left to right; X_j passes each of them
        for k in range(j + 1, self.n):
            gk = self.gidx[k]
            for _ in range(w[k]):
                if phi[p][gk][gj] != phi[p][gj][gk]:
                    raise AssertionError(f"swap factors fail to cancel at {(p, gk, gj)}")
                e += self._chi[j][gk]
                p = mul[p][gk]
        out = list(w)
        out[j] += 1
        if out[j] >= self.N[j]:
            return None
        return tuple(out), e % self.M

    def act_exp(self, g: int, mono: Monomial) -> int:
        """g |> L(w) = z^e L(w), with g a group-element index."""
        key = (g, mono)
        hit = self._act_memo.get(key)
        if hit is not None:
            return hit
        tilde = self._tilde[g]
        e = 0
        d = 0
        for t, letter in enumerate(self.word(mono)):
            gl = self.gidx[letter]
            e += self._chi[letter][g]
            if t:
                e += self.twist * tilde[d][gl]
            d = self._mul[d][gl]
        e %= self.M
        self._act_memo[key] = e
        return e

    def tensor_basis_mul(
        self, ab: tuple[Monomial, Monomial], cd: tuple[Monomial, Monomial]
    ) -> tuple[tuple[Monomial, Monomial], int] | None:
        """(A (x) B)(C (x) D) in the braided tensor product S (x) S.

        The scalar is Phi(ab,c,d) Phi(a,b,c)^-1 kappa Phi(a,c,b) Phi(ac,b,d)^-1
        times the two factor products, where b |> C = kappa C.
        """
        A, B = ab
        C, D = cd
        left = self.basis_mul(A, C)
        if left is None:
            return None
        right = self.basis_mul(B, D)
        if right is None:
            return None
        a, b, c, d = self.deg(A), self.deg(B), self.deg(C), self.deg(D)
        mul = self._mul
        phi = self._phi
        lam = (phi[mul[a][b]][c][d] - phi[a][b][c] + self.act_exp(b, C)
               + phi[a][c][b] - phi[mul[a][c]][b][d])
        return (left[0], right[0]), (lam + left[1] + right[1]) % self.M

    # -- public element-level operations -------------------------------------
    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def one(self) -> AlgebraElement:
        return self.monomial(self.unit)

    def monomial(self, exps: Iterable[int], coeff=None) -> AlgebraElement:
        exps = tuple(exps)
        if len(exps) != self.n:
            raise ValueError(f"monomial needs {self.n} exponents")
        if not self.valid(exps):
            return self.zero()
        coeff = CycNumber.one(self.M) if coeff is None else _as_cyc(coeff, self.M)
        return AlgebraElement(self, {exps: coeff})

    def generator(self, i: int) -> AlgebraElement:
        exps = [0] * self.n
        exps[i] = 1
        return self.monomial(exps)

    def _own(self, u) -> None:
        if u.space is not self:
            raise SpaceMismatch("operands belong to different braided spaces")

    def multiply(self, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
        self._own(u)
        self._own(v)
        acc: dict[Monomial, CycNumber] = {}
        for mu, cu in u.terms.items():
            for mv, cv in v.terms.items():
                r = self.basis_mul(mu, mv)
                if r is not None:
                    _accumulate(acc, r[0], (cu * cv).mul_root(r[1]))
        return AlgebraElement(self, acc)

    def act(self, g: GroupElem, u: AlgebraElement) -> AlgebraElement:
        self._own(u)
        gi = self.G.index(self.G.element(g))
        return AlgebraElement(self, {m: c.mul_root(self.act_exp(gi, m)) for m, c in u.terms.items()})

    def tensor_multiply(self, x: TensorSquareElement, y: TensorSquareElement) -> TensorSquareElement:
        self._own(x)
        self._own(y)
        acc: dict = {}
        for k1, c1 in x.terms.items():
            for k2, c2 in y.terms.items():
                r = self.tensor_basis_mul(k1, k2)
                if r is not None:
                    _accumulate(acc, r[0], (c1 * c2).mul_root(r[1]))
        return TensorSquareElement(self, acc)

    def coproduct_basis(self, mono: Monomial) -> dict[tuple[Monomial, Monomial], CycNumber]:
        """Delta of a basis monomial, folded letter by letter through the braided tensor product."""
        hit = self._cop_memo.get(mono)
        if hit is not None:
            return hit
        if mono == self.unit:
            res = {(self.unit, self.unit): CycNumber.one(self.M)}
        else:
            last = max(i for i, k in enumerate(mono) if k)
            prefix = list(mono)
            prefix[last] -= 1
            prefix = tuple(prefix)
            x = [0] * self.n
            x[last] = 1
            x = tuple(x)
            gen = ((x, self.unit), (self.unit, x))
            res = {}
            for key, c in self.coproduct_basis(prefix).items():
                for k2 in gen:
                    r = self.tensor_basis_mul(key, k2)
                    if r is not None:
                        _accumulate(res, r[0], c.mul_root(r[1]))
        with self._lock:
            self._cop_memo.setdefault(mono, res)
        return self._cop_memo[mono]

    def coproduct(self, u: AlgebraElement) -> TensorSquareElement:
        self._own(u)
        acc: dict = {}
        for m, c in u.terms.items():
            for key, v in self.coproduct_basis(m).items():
                _accumulate(acc, key, c * v)
        return TensorSquareElement(self, acc)

    def counit(self, u: AlgebraElement) -> CycNumber:
        return u.terms.get(self.unit, CycNumber.zero(self.M))

    def antipode_basis(self, mono: Monomial) -> dict[Monomial, CycNumber]:
        """S(b) from m(S (x) id)Delta(b) = eps(b) 1, recursively in the N-degree."""
        hit = self._ant_memo.get(mono)
        if hit is not None:
            return hit
        if mono == self.unit:
            res = {self.unit: CycNumber.one(self.M)}
        else:
            acc: dict = {}
            lead = None
            for (b1, b2), c in self.coproduct_basis(mono).items():
                if b1 == mono:
                    lead = c
                    continue
                for s, cs in self.antipode_basis(b1).items():
                    r = self.basis_mul(s, b2)
                    if r is not None:
                        _accumulate(acc, r[0], (c * cs).mul_root(r[1]))
            if lead is None:
                raise ArithmeticError(f"coproduct of {mono} lacks the b (x) 1 term")
            inv = (-lead).inv()
            res = {m: v * inv for m, v in acc.items()}
        with self._lock:
            self._ant_memo.setdefault(mono, res)
        return self._ant_memo[mono]

    def antipode_n(self, u: AlgebraElement) -> AlgebraElement:
        self._own(u)
        acc: dict = {}
        for m, c in u.terms.items():
            for k, v in self.antipode_basis(m).items():
                _accumulate(acc, k, c * v)
        return AlgebraElement(self, acc)

    # -- closed forms used as oracles ----------------------------------------
    def lemma_power_coproduct(self, i: int, m: int) -> dict[tuple[Monomial, Monomial], CycNumber]:
        """Closed form for Delta(X_i^{->m}) in the tensor algebra of one generator:

        sum_k (m choose k)_q prod_{j=1}^{m-1-k} Phi(g^k, g^j, g)^-1  X^{->k} (x) X^{->m-k}.
        """
        g = self.gidx[i]
        q = RootExp(self.M, self.q_exp(i, i))
        pw = [0]
        for _ in range(m):
            pw.append(self._mul[pw[-1]][g])
        out = {}
        for k in range(m + 1):
            e = -sum(self._phi[pw[k]][pw[j]][g] for j in range(1, m - k))
            coeff = qbinom(m, k, q).mul_root(e)
            if coeff.is_zero():
                continue
            a = [0] * self.n
            b = [0] * self.n
            a[i], b[i] = k, m - k
            a, b = tuple(a), tuple(b)
            if self.valid(a) and self.valid(b):
                out[(a, b)] = coeff
        return out

    def format(self, u: AlgebraElement, name: str = "z") -> str:
        if not u.terms:
            return "0"
        parts = []
        for m in sorted(u.terms):
            mono = " ".join(f"X{i + 1}^{k}" if k > 1 else f"X{i + 1}" for i, k in enumerate(m) if k) or "1"
            parts.append(f"{u.terms[m].format(name)} * {mono}")
        return " + ".join(parts)


def _as_cyc(c, order: int) -> CycNumber:
    if isinstance(c, CycNumber):
        return c.lift(order) if c.order != order else c
    if isinstance(c, RootExp):
        return c.to_cyc(order)
    return CycNumber.from_int(order, c)


def _accumulate(acc: dict, key, value: CycNumber) -> None:
    cur = acc.get(key)
    acc[key] = value if cur is None else cur + value


class _Sparse:
    __slots__ = ("space", "terms")

    def __init__(self, space, terms: Mapping):
        self.space = space
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def _same(self, other):
        if type(other) is not type(self):
            return False
        if other.space is not self.space:
            raise SpaceMismatch("operands belong to different spaces")
        return True

    def __add__(self, other):
        if not self._same(other):
            return NotImplemented
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _accumulate(acc, k, v)
        return type(self)(self.space, acc)

    def __neg__(self):
        return type(self)(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _as_cyc(c, self.space.M)
        return type(self)(self.space, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not self._same(other):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms


class AlgebraElement(_Sparse):
    """Sparse combination of basis monomials of a BraidedSpace."""

    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.space.multiply(self, other)
        return self.scale(other)

    def __repr__(self) -> str:
        return f"AlgebraElement({self.space.format(self)})"


class TensorSquareElement(_Sparse):
    """Sparse combination of pairs of basis monomials in S (x) S."""

    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, TensorSquareElement):
            return self.space.tensor_multiply(self, other)
        return self.scale(other)

    @classmethod
    def basis(cls, space: BraidedSpace, a: Monomial, b: Monomial) -> TensorSquareElement:
        return cls(space, {(a, b): CycNumber.one(space.M)})

    def __repr__(self) -> str:
        return f"TensorSquareElement({len(self.terms)} terms)"


def act(S: BraidedSpace, g: GroupElem, u: AlgebraElement) -> AlgebraElement:
    return S.act(g, u)


def multiply(S: BraidedSpace, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    return S.multiply(u, v)


def tensor_multiply(S: BraidedSpace, x: TensorSquareElement, y: TensorSquareElement) -> TensorSquareElement:
    return S.tensor_multiply(x, y)


def coproduct(S: BraidedSpace, u: AlgebraElement) -> TensorSquareElement:
    return S.coproduct(u)


def antipode_n(S: BraidedSpace, u: AlgebraElement) -> AlgebraElement:
    return S.antipode_n(u)


def single_generator_space(
    G: AbelianGroup, c: CocycleData, g: GroupElem, chi_exps: Iterable[int], nilpotency: int | None = None
) -> BraidedSpace:
    """S(V) with one generator of degree g; ``nilpotency`` overrides N (tensor-algebra level)."""
    from .qchar import QuasiCharacter

    chi = QuasiCharacter(G.element(g), tuple(chi_exps), G.ambient)
    series = AdmissibleSeries(G, c, (chi,))
    return BraidedSpace(series, nilpotency=None if nilpotency is None else (nilpotency,), check=False)


# -- vectorized structure tables and the axiom suite -------------------------------


class SpaceTables:
    """Dense numpy structure constants of a BraidedSpace.

    ``mul_idx[u, v]`` is the basis index of L(u)L(v) (-1 for zero) and
    ``mul_exp`` its root exponent.  With ``literal=True`` the table is filled
    from :meth:`BraidedSpace.basis_mul`; otherwise from the closed form valid
    for reduced cocycles (peel scalars are linear in deg u, swap scalars reduce
    to chi_i(g_j)), which the suite cross-checks against the literal algorithm.
    """

    def __init__(self, S: BraidedSpace, literal: bool | None = None):
        import numpy as np

        self.S = S
        self.M = S.M
        D = S.dim
        self.D = D
        self.E = np.array(S.monomials, dtype=np.int64).reshape(D, S.n)
        self.index = {m: k for k, m in enumerate(S.monomials)}
        self.deg = np.array([S.deg(m) for m in S.monomials], dtype=np.int64)
        self.phi = np.array(S._phi, dtype=np.int64)
        self.gmul = np.array(S._mul, dtype=np.int64)
        # last letter and parent (monomial minus its last letter) of every basis element
        self.strides = np.array([int(np.prod(S.N[i + 1:])) for i in range(S.n)], dtype=np.int64)
        nz = self.E > 0
        self.last = np.where(nz.any(axis=1), S.n - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
        self.parent = np.where(self.last >= 0, np.arange(D) - self.strides[np.maximum(self.last, 0)], -1)
        self.act = self._action_table()
        if literal is None:
            literal = D <= 64
        self.literal = literal
        if literal:
            mi = np.full((D, D), -1, dtype=np.int64)
            me = np.zeros((D, D), dtype=np.int64)
            for a, u in enumerate(S.monomials):
                for b, v in enumerate(S.monomials):
                    r = S.basis_mul(u, v)
                    if r is not None:
                        mi[a, b] = self.index[r[0]]
                        me[a, b] = r[1]
            self.mul_idx, self.mul_exp = mi, me
        else:
            self.mul_idx, self.mul_exp = self._closed_form()
        # reduction x^k mod Phi_M for the zero test
        from .cyclo import _reduction_table

        self.R = np.array(_reduction_table(self.M), dtype=np.int64)
        self._terms = None
        self._antipode = None

    def _prefix_sum(self, table):
        """out[x, v] = sum over letters t of v of table[x, deg v_<t, g_{v_t}]."""
        import numpy as np

        gid = np.array(self.S.gidx, dtype=np.int64)
        out = np.zeros((table.shape[0], self.D), dtype=np.int64)
        for b in range(1, self.D):
            p = self.parent[b]
            out[:, b] = out[:, p] + table[:, self.deg[p], gid[self.last[b]]]
        return out

    def _action_table(self):
        """act[g, v]: g |> L(v) = z^act L(v), matching :meth:`BraidedSpace.act_exp`."""
        import numpy as np

        S = self.S
        chi = np.array(S._chi, dtype=np.int64)  # (n, |G|)
        tilde = np.array(S._tilde, dtype=np.int64)
        return (chi.T @ self.E.T + S.twist * self._prefix_sum(tilde)) % self.M

    def _closed_form(self):
        import numpy as np

        S = self.S
        D, n, M = self.D, S.n, self.M
        E = self.E
        # peel[x, v] = sum_{t>=2} Phi(x, deg v_<t, g_{v_t}); the t = 1 term is Phi(x, 1, .) = 1
        peel = self._prefix_sum(self.phi)
        Q = np.array([[S.q_exp(j, i) if j > i else 0 for i in range(n)] for j in range(n)], dtype=np.int64)
        swaps = E @ Q @ E.T
        exp = (peel[self.deg, :] + swaps) % M
        tot = E[:, None, :] + E[None, :, :]
        ok = (tot < np.array(S.N)).all(axis=2)
        idx = np.where(ok, tot @ self.strides, -1)
        return idx, np.where(ok, exp, 0)

    def coef_vec(self, c: CycNumber):
        import numpy as np

        v = np.array([int(x) for x in c.coeffs], dtype=np.int64)
        if any(not isinstance(x, int) and getattr(x, "denominator", 1) != 1 for x in c.coeffs):
            raise ArithmeticError("non-integral structure constant")
        return v

    @property
    def terms(self):
        """Coproducts of all basis monomials as CSR arrays: owner, left, right, coefficient vectors."""
        import numpy as np

        if self._terms is None:
            starts, A, B, C = coproduct_tables(
                self.E, self.strides, self.mul_idx, self.mul_exp, self.deg, self.phi, self.gmul, self.act, self.M
            )
            own = np.repeat(np.arange(self.D, dtype=np.int64), np.diff(starts))
            self._terms = (own, A, B, C)
        return self._terms

    @property
    def antipode(self):
        """Dense antipode: ``antipode[b, s]`` is the coefficient vector of s in S(b)."""
        if self._antipode is None:
            own, A, B, C = self.terms
            import numpy as np

            starts = np.searchsorted(own, np.arange(self.D + 1))
            table, bad = antipode_table(starts, A, B, C, self.mul_idx, self.mul_exp, self.M)
            if bad >= 0:
                raise ArithmeticError(f"coproduct of {self.S.monomials[bad]} has no unit b (x) 1 coefficient")
            self._antipode = table
        return self._antipode

    def is_zero_vecs(self, vecs):
        import numpy as np

        return ~(vecs @ self.R).any(axis=-1) if len(vecs) else np.zeros(0, dtype=bool)


def _rotate_conv(cu, dv, e, M):
    """out[k] = (cu[k] * dv[k]) * z^e[k] for rows of coefficient vectors mod x^M - 1."""
    import numpy as np

    out = np.zeros((len(e), M), dtype=np.int64)
    s = np.arange(M)
    for p in np.flatnonzero(cu.any(axis=0)):
        idx = (s[None, :] - p - e[:, None]) % M
        out += cu[:, p, None] * np.take_along_axis(dv, idx, axis=1)
    return out


@dataclass
class CheckResult:
    ok: bool = True
    checked: int = 0
    witness: object = None

    def fail(self, witness) -> None:
        if self.ok:
            self.ok = False
            self.witness = witness


@dataclass
class HopfReport:
    checks: dict

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.checks.values())

    def summary(self) -> str:
        return ", ".join(f"{k}={'ok' if r.ok else 'FAIL'}({r.checked})" for k, r in self.checks.items())


def verify_braided_hopf(
    S: BraidedSpace,
    exhaustive: bool | None = None,
    samples: int = 10000,
    seed: int = 0,
) -> HopfReport:
    """Check the braided Hopf algebra axioms of S(V) on basis tuples.

    Quasi-associativity (uv)w = Phi(u,v,w)^-1 u(vw), Delta(uv) = Delta(u)Delta(v),
    coassociativity with the associator, both counit laws, both antipode laws,
    and the projective action law.  Exhaustive when dim <= 64 unless overridden;
    otherwise ``samples`` seeded random tuples per check.
    """
    import numpy as np

    if exhaustive is None:
        exhaustive = S.dim <= 64
    rng = np.random.default_rng(seed)
    T = SpaceTables(S, literal=exhaustive)
    D, M = T.D, T.M
    checks = {k: CheckResult() for k in
              ("table", "quasi_assoc", "delta_mult", "coassoc", "counit", "antipode_left", "antipode_right", "action")}

    # closed-form table against the literal algorithm on sampled pairs
    if not T.literal:
        pairs = rng.integers(0, D, size=(min(samples, D * D), 2))
        for a, b in pairs:
            r = S.basis_mul(S.monomials[a], S.monomials[b])
            got = (int(T.mul_idx[a, b]), int(T.mul_exp[a, b]) % M)
            want = (-1, 0) if r is None else (T.index[r[0]], r[1])
            checks["table"].checked += 1
            if got != want:
                checks["table"].fail((S.monomials[a], S.monomials[b]))

    # quasi-associativity
    if exhaustive:
        u, v, w = (x.reshape(-1) for x in np.meshgrid(np.arange(D), np.arange(D), np.arange(D), indexing="ij"))
    else:
        u, v, w = rng.integers(0, D, size=(3, samples))
    mi, me = T.mul_idx, T.mul_exp
    k = quasi_assoc_first_failure(u, v, w, mi, me, T.phi, T.deg, M)
    checks["quasi_assoc"].checked = len(u)
    if k >= 0:
        checks["quasi_assoc"].fail(tuple(S.monomials[int(x[k])] for x in (u, v, w)))

    # Delta-multiplicativity
    if exhaustive:
        pu, pv = (x.reshape(-1) for x in np.meshgrid(np.arange(D), np.arange(D), indexing="ij"))
        elems = np.arange(D)
    else:
        pu, pv = rng.integers(0, D, size=(2, samples))
        elems = np.unique(rng.integers(0, D, size=min(samples, D)))
    own, TA, TB, TC = T.terms
    starts = np.searchsorted(own, np.arange(D + 1))
    k = delta_mult_first_failure(
        pu.astype(np.int64), pv.astype(np.int64), starts.astype(np.int64), TA.astype(np.int64),
        TB.astype(np.int64), np.ascontiguousarray(TC), mi, me, T.deg, T.phi, T.gmul, T.act, T.R, M, D,
    )
    if k >= 0:
        checks["delta_mult"].fail((S.monomials[int(pu[k])], S.monomials[int(pv[k])]))
    checks["delta_mult"].checked = len(pu)

    # per-element checks, vectorized over the coproduct terms of the chosen elements
    deg = T.deg
    gels = S.G.elements
    sel = np.concatenate([np.arange(starts[b], starts[b + 1]) for b in elems])
    own_s, A1, B1, C1 = own[sel], TA[sel], TB[sel], TC[sel]
    unit = T.index[S.unit]

    def expand(parents):
        # for each selected term, all coproduct terms of ``parents``
        cnt = starts[parents + 1] - starts[parents]
        rep = np.repeat(np.arange(len(parents)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        return rep, starts[parents][rep] + offs

    def residual(keys, vecs):
        uk, inv = np.unique(keys, return_inverse=True)
        acc = np.zeros((len(uk), M), dtype=np.int64)
        np.add.at(acc, inv.reshape(-1), vecs)
        nz = ~T.is_zero_vecs(acc)
        return uk[nz]

    # coassociativity
    r, t = expand(A1)
    x, y, z = TA[t], TB[t], B1[r]
    lk = ((own_s[r] * D + x) * D + y) * D + z
    lv = _rotate_conv(C1[r], TC[t], -T.phi[deg[x], deg[y], deg[z]], M)
    r2, t2 = expand(B1)
    rk = ((own_s[r2] * D + A1[r2]) * D + TA[t2]) * D + TB[t2]
    rv = _rotate_conv(C1[r2], TC[t2], np.zeros(len(t2), dtype=np.int64), M)
    bad = residual(np.concatenate([lk, rk]), np.concatenate([lv, -rv]))
    checks["coassoc"].checked = len(elems)
    if len(bad):
        checks["coassoc"].fail(S.monomials[int(bad[0] // D ** 3)])

    # counit laws: (eps (x) id)Delta = id = (id (x) eps)Delta
    ident = np.zeros((len(elems), M), dtype=np.int64)
    ident[:, 0] = 1
    for side, mask, other in (("left", A1 == unit, B1), ("right", B1 == unit, A1)):
        keys = np.concatenate([own_s[mask] * D + other[mask], elems * D + elems])
        vecs = np.concatenate([C1[mask], -ident])
        bad = residual(keys, vecs)
        if len(bad):
            checks["counit"].fail(S.monomials[int(bad[0] // D)])
    checks["counit"].checked = len(elems)

    # antipode laws on both sides
    Sd = T.antipode
    s_own, s_idx = np.nonzero(Sd.any(axis=2))
    s_coef = Sd[s_own, s_idx]
    s_start = np.searchsorted(s_own, np.arange(D + 1))
    eps = np.zeros((len(elems), M), dtype=np.int64)
    eps[elems == unit, 0] = 1
    for side, leg, keep in (("antipode_left", A1, B1), ("antipode_right", B1, A1)):
        cnt = s_start[leg + 1] - s_start[leg]
        rep = np.repeat(np.arange(len(leg)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        st = s_start[leg][rep] + offs
        if side == "antipode_left":
            pi, pe = mi[s_idx[st], keep[rep]], me[s_idx[st], keep[rep]]
        else:
            pi, pe = mi[keep[rep], s_idx[st]], me[keep[rep], s_idx[st]]
        ok_ = pi >= 0
        vecs = _rotate_conv(C1[rep][ok_], s_coef[st][ok_], pe[ok_], M)
        keys = own_s[rep][ok_] * D + pi[ok_]
        keys = np.concatenate([keys, elems * D + unit])
        vecs = np.concatenate([vecs, -eps])
        bad = residual(keys, vecs)
        checks[side].checked = len(elems)
        if len(bad):
            checks[side].fail(S.monomials[int(bad[0] // D)])

    # e |> (f |> u) = Phi~_{deg u}(e, f) (ef) |> u, vectorized over (e, f, u)
    tilde = np.array(S._tilde, dtype=np.int64)
    bs = np.fromiter((int(b) for b in elems), dtype=np.int64)
    A_ = T.act[:, bs]
    lhs = A_[:, None, :] + A_[None, :, :]
    rhs = np.transpose(tilde[T.deg[bs]], (1, 2, 0)) + T.act[T.gmul][:, :, bs]
    bad = (lhs - rhs) % M != 0
    checks["action"].checked = int(bad.size)
    if bad.any():
        e_, f_, k = np.argwhere(bad)[0]
        checks["action"].fail((S.monomials[int(bs[k])], gels[int(e_)], gels[int(f_)]))
    return HopfReport(checks)
