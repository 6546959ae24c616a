"""Compiled inner loops for the exhaustive axiom suites.

Coefficients are integer vectors modulo x^M - 1; a vector is zero in Q(z_M)
exactly when its product with the reduction table vanishes.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _flush(buf, touched, ntouched, R, M):
    # zero-test and clear every touched cell; returns True when all vanish
    ok = True
    width = R.shape[1]
    for t in range(ntouched):
        cell = touched[t]
        base = cell * M
        if ok:
            for j in range(width):
                s = 0
                for k in range(M):
                    s += buf[base + k] * R[k, j]
                if s != 0:
                    ok = False
                    break
        for k in range(M):
            buf[base + k] = 0
    return ok


@njit(cache=True)
def delta_mult_first_failure(pu, pv, starts, TA, TB, TC, mi, me, deg, phi, gm, act, R, M, D):
    """First k with Delta(u_k v_k) != Delta(u_k) Delta(v_k), or -1."""
    buf = np.zeros(D * D * M, dtype=np.int64)
    seen = np.zeros(D * D, dtype=np.bool_)
    touched = np.zeros(D * D, dtype=np.int64)
    for k in range(pu.shape[0]):
        u = pu[k]
        v = pv[k]
        nt = 0
        for tu in range(starts[u], starts[u + 1]):
            A = TA[tu]
            B = TB[tu]
            da = deg[A]
            db = deg[B]
            for tv in range(starts[v], starts[v + 1]):
                C = TA[tv]
                Dd = TB[tv]
                AC = mi[A, C]
                BD = mi[B, Dd]
                if AC < 0 or BD < 0:
                    continue
                dc = deg[C]
                dd = deg[Dd]
                e = (phi[gm[da, db], dc, dd] - phi[da, db, dc] + act[db, C]
                     + phi[da, dc, db] - phi[gm[da, dc], db, dd] + me[A, C] + me[B, Dd])
                e %= M
                cell = AC * D + BD
                if not seen[cell]:
                    seen[cell] = True
                    touched[nt] = cell
                    nt += 1
                base = cell * M
                for p in range(M):
                    cp = TC[tu, p]
                    if cp == 0:
                        continue
                    for q in range(M):
                        cq = TC[tv, q]
                        if cq != 0:
                            buf[base + (p + q + e) % M] += cp * cq
        w = mi[u, v]
        if w >= 0:
            e = me[u, v]
            for t in range(starts[w], starts[w + 1]):
                cell = TA[t] * D + TB[t]
                if not seen[cell]:
                    seen[cell] = True
                    touched[nt] = cell
                    nt += 1
                base = cell * M
                for q in range(M):
                    buf[base + (q + e) % M] -= TC[t, q]
        for t in range(nt):
            seen[touched[t]] = False
        if not _flush(buf, touched, nt, R, M):
            return k
    return -1


@njit(cache=True)
def coproduct_tables(E, strides, mi, me, deg, phi, gm, act, M):
    """Delta of every basis monomial by folding the last letter through S (x) S.

    Returns CSR arrays (starts, left, right, coeffs); monomials are processed in
    index order, and dropping the last letter always lowers the index.
    """
    D, n = E.shape
    cap = 1
    for b in range(D):
        t = 1
        for i in range(n):
            t *= E[b, i] + 1
        cap += t
    starts = np.zeros(D + 1, dtype=np.int64)
    TA = np.zeros(cap, dtype=np.int64)
    TB = np.zeros(cap, dtype=np.int64)
    TC = np.zeros((cap, M), dtype=np.int64)
    buf = np.zeros(D * D * M, dtype=np.int64)
    seen = np.zeros(D * D, dtype=np.bool_)
    touched = np.zeros(D * D, dtype=np.int64)
    # Delta(1) = 1 (x) 1
    TA[0] = 0
    TB[0] = 0
    TC[0, 0] = 1
    starts[1] = 1
    fill = 1
    for b in range(1, D):
        j = n - 1
        while E[b, j] == 0:
            j -= 1
        bp = b - strides[j]
        x = strides[j]
        nt = 0
        for t in range(starts[bp], starts[bp + 1]):
            A = TA[t]
            B = TB[t]
            da = deg[A]
            db = deg[B]
            for side in range(2):
                if side == 0:
                    C, Dd = x, 0
                else:
                    C, Dd = 0, x
                AC = mi[A, C]
                BD = mi[B, Dd]
                if AC < 0 or BD < 0:
                    continue
                dc = deg[C]
                dd = deg[Dd]
                e = (phi[gm[da, db], dc, dd] - phi[da, db, dc] + act[db, C]
                     + phi[da, dc, db] - phi[gm[da, dc], db, dd] + me[A, C] + me[B, Dd])
                e %= M
                cell = AC * D + BD
                if not seen[cell]:
                    seen[cell] = True
                    touched[nt] = cell
                    nt += 1
                base = cell * M
                for q in range(M):
                    buf[base + (q + e) % M] += TC[t, q]
        # emit in cell order for determinism
        cells = np.sort(touched[:nt])
        for i in range(nt):
            cell = cells[i]
            seen[cell] = False
            base = cell * M
            nz = False
            for q in range(M):
                if buf[base + q] != 0:
                    nz = True
            if nz:
                TA[fill] = cell // D
                TB[fill] = cell % D
                for q in range(M):
                    TC[fill, q] = buf[base + q]
                fill += 1
            for q in range(M):
                buf[base + q] = 0
        starts[b + 1] = fill
    return starts, TA[:fill], TB[:fill], TC[:fill]


@njit(cache=True)
def antipode_table(starts, TA, TB, TC, mi, me, M):
    """Dense S(b)[s] coefficient vectors from m(S (x) id)Delta(b) = eps(b) 1.

    The coefficient of b (x) 1 in Delta(b) must be a pure root z^e; returns
    (table, -1) or (partial, b) for the first b where it is not.
    """
    D = starts.shape[0] - 1
    Sd = np.zeros((D, D, M), dtype=np.int64)
    Sd[0, 0, 0] = 1
    # support of each S(b) row, to skip its zero entries
    supp = np.zeros((D, D), dtype=np.int64)
    nsupp = np.zeros(D, dtype=np.int64)
    nsupp[0] = 1
    acc = np.zeros((D, M), dtype=np.int64)
    for b in range(1, D):
        lead = -1
        for t in range(starts[b], starts[b + 1]):
            A = TA[t]
            B = TB[t]
            if A == b and B == 0:
                # must be a monomial with coefficient 1
                cnt = 0
                for q in range(M):
                    if TC[t, q] != 0:
                        cnt += 1
                        if TC[t, q] == 1:
                            lead = q
                        else:
                            return Sd, b
                if cnt != 1:
                    return Sd, b
                continue
            for r in range(nsupp[A]):
                s = supp[A, r]
                w = mi[s, B]
                if w < 0:
                    continue
                e = me[s, B]
                for p in range(M):
                    cp = Sd[A, s, p]
                    if cp == 0:
                        continue
                    for q in range(M):
                        cq = TC[t, q]
                        if cq != 0:
                            acc[w, (p + q + e) % M] += cp * cq
        if lead < 0:
            return Sd, b
        # S(b) = -z^-lead * acc
        for w in range(D):
            hit = False
            for q in range(M):
                v = acc[w, q]
                if v != 0:
                    Sd[b, w, (q - lead) % M] -= v
                    acc[w, q] = 0
                    hit = True
            if hit:
                supp[b, nsupp[b]] = w
                nsupp[b] += 1
    return Sd, -1


@njit(cache=True)
def quasi_assoc_first_failure(u, v, w, mi, me, phi, deg, M):
    """First k with (u v) w != Phi(u, v, w)^-1 u (v w) on basis triples, or -1."""
    for k in range(u.shape[0]):
        a = u[k]
        b = v[k]
        c = w[k]
        ab = mi[a, b]
        bc = mi[b, c]
        li = -1
        le = 0
        if ab >= 0:
            li = mi[ab, c]
            le = me[a, b] + me[ab, c]
        ri = -1
        re = 0
        if bc >= 0:
            ri = mi[a, bc]
            re = me[b, c] + me[a, bc] - phi[deg[a], deg[b], deg[c]]
        if li != ri:
            return k
        if li >= 0 and (le - re) % M != 0:
            return k
    return -1


@njit(cache=True)
def coalgebra_mult_first_failure(pu, pv, starts, TA, TB, TC, mi, me, R, M, D):
    """First k with Delta(u_k v_k) != Delta(u_k) Delta(v_k) for the componentwise
    product on the tensor square (no braiding, no reassociation), or -1."""
    buf = np.zeros(D * D * M, dtype=np.int64)
    seen = np.zeros(D * D, dtype=np.bool_)
    touched = np.zeros(D * D, dtype=np.int64)
    for k in range(pu.shape[0]):
        u = pu[k]
        v = pv[k]
        nt = 0
        for tu in range(starts[u], starts[u + 1]):
            A = TA[tu]
            B = TB[tu]
            for tv in range(starts[v], starts[v + 1]):
                C = TA[tv]
                Dd = TB[tv]
                AC = mi[A, C]
                BD = mi[B, Dd]
                if AC < 0 or BD < 0:
                    continue
                e = (me[A, C] + me[B, Dd]) % M
                cell = AC * D + BD
                if not seen[cell]:
                    seen[cell] = True
                    touched[nt] = cell
                    nt += 1
                base = cell * M
                for p in range(M):
                    cp = TC[tu, p]
                    if cp == 0:
                        continue
                    for q in range(M):
                        cq = TC[tv, q]
                        if cq != 0:
                            buf[base + (p + q + e) % M] += cp * cq
        w = mi[u, v]
        if w >= 0:
            e = me[u, v]
            for t in range(starts[w], starts[w + 1]):
                cell = TA[t] * D + TB[t]
                if not seen[cell]:
                    seen[cell] = True
                    touched[nt] = cell
                    nt += 1
                base = cell * M
                for q in range(M):
                    buf[base + (q + e) % M] -= TC[t, q]
        for t in range(nt):
            seen[touched[t]] = False
        if not _flush(buf, touched, nt, R, M):
            return k
    return -1
