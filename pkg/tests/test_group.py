from __future__ import annotations

import itertools
import json
from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiq.cyclo import RootExp
from quasiq.errors import GroupTooLargeForExhaustive, InvalidCocycle
from quasiq.group import (
    AbelianGroup,
    CocycleData,
    PhiTable,
    all_cocycles,
    group_ops,
    groups_up_to,
    parameter_slots,
    phi_eval,
    phi_exponent,
    phi_tilde_eval,
    system_from_json,
    system_to_json,
    verify_all_cocycles,
    verify_cocycle,
)


def phase(G: AbelianGroup, c: CocycleData, x, y, z) -> Fraction:
    """Phi_a(x, y, z) as a fraction of a full turn, straight from the product formula."""
    m = G.moduli
    t = Fraction(0)
    for l, al in enumerate(c.a):
        t += Fraction(al * x[l] * ((y[l] + z[l]) // m[l]), m[l])
    for s, tt, v in c.a2:
        t += Fraction(v * x[tt] * ((y[s] + z[s]) // m[s]), m[tt])
    for r, s, tt, v in c.a3:
        t += Fraction(v * z[r] * y[s] * x[tt], gcd(m[r], m[s], m[tt]))
    return t % 1


def turn(r: RootExp) -> Fraction:
    return Fraction(r.exp, r.order) % 1


def mul(G, x, y):
    return tuple((a + b) % m for a, b, m in zip(x, y, G.moduli))


def coboundary_ok(G, f) -> bool:
    els = G.elements
    for e, a, b, h in itertools.product(els, repeat=4):
        lhs = f(mul(G, e, a), b, h) + f(e, a, mul(G, b, h))
        rhs = f(e, a, b) + f(e, mul(G, a, b), h) + f(a, b, h)
        if (lhs - rhs) % 1:
            return False
    return True


SMALL = [(2,), (3,), (4,), (2, 2), (6,), (2, 4), (3, 3), (2, 2, 2)]


# -- groups -----------------------------------------------------------------


def test_groups_up_to_16_count():
    # oracle: count non-decreasing factor tuples by brute force
    def count(rem, lo):
        return sum(1 + count(rem // m, m) for m in range(lo, rem + 1))

    gs = groups_up_to(16)
    assert len(gs) == count(16, 2)
    assert len({G.moduli for G in gs}) == len(gs)
    assert all(G.order <= 16 for G in gs)


@pytest.mark.parametrize("moduli", SMALL)
def test_group_laws(moduli):
    G = AbelianGroup(moduli)
    els = G.elements
    assert len(els) == G.order
    for x in els:
        assert G.mul(x, G.inverse(x)) == G.identity
        assert G.pow(x, G.elem_order(x)) == G.identity
    for x, y in itertools.product(els, repeat=2):
        assert G.mul(x, y) == G.mul(y, x) == mul(G, x, y)
    T = G.mul_table
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            assert els[T[i, j]] == mul(G, x, y)
    assert G.generates([G.gen(l) for l in range(G.rank)])


def test_group_ops_dispatch():
    G = AbelianGroup((2, 4))
    assert group_ops(G, "mul", (1, 3), (1, 2)) == (0, 1)
    assert group_ops(G, "inverse", (1, 3)) == (1, 1)
    assert group_ops(G, "elem_order", (0, 2)) == 2
    assert group_ops(G, "generates", [(1, 0), (0, 1)])
    with pytest.raises(ValueError):
        group_ops(G, "inv", (1, 3))


def test_exponent_and_ambient():
    G = AbelianGroup((2, 6))
    assert G.exponent == 6
    assert G.ambient == 36


# -- the cocycle formula --------------------------------------------------


@pytest.mark.parametrize("moduli", [(2,), (4,), (2, 2), (2, 4), (3, 3), (2, 2, 2)])
def test_phi_matches_formula(moduli):
    G = AbelianGroup(moduli)
    rng = np.random.default_rng(sum(moduli))
    cocycles = list(all_cocycles(G))
    picks = cocycles if len(cocycles) <= 40 else [cocycles[i] for i in rng.choice(len(cocycles), 40, replace=False)]
    for c in picks:
        T = PhiTable.build(G, c)
        for x, y, z in itertools.product(G.elements, repeat=3):
            assert turn(phi_eval(G, c, x, y, z)) == phase(G, c, x, y, z)
            assert Fraction(T.exp(x, y, z), T.order) == phase(G, c, x, y, z)


def test_phi_z2_value():
    # on Z2 with a = 1, Phi(x, y, z) = (-1)^{xyz}
    G = AbelianGroup((2,))
    c = CocycleData((1,))
    for x, y, z in itertools.product(G.elements, repeat=3):
        assert turn(phi_eval(G, c, x, y, z)) == Fraction(x[0] * y[0] * z[0], 2)


def test_phi_a3_term():
    G = AbelianGroup((2, 2, 2))
    c = CocycleData.make((0, 0, 0), a3={(0, 1, 2): 1})
    assert turn(phi_eval(G, c, (0, 0, 1), (0, 1, 0), (1, 0, 0))) == Fraction(1, 2)
    assert turn(phi_eval(G, c, (1, 0, 0), (0, 1, 0), (0, 0, 1))) == 0


@pytest.mark.parametrize("moduli", [(2,), (3,), (4,), (2, 2), (2, 2, 2)])
def test_coboundary_oracle_agrees(moduli):
    # slow pure-fraction coboundary on a few cocycles versus the library check
    G = AbelianGroup(moduli)
    for c in list(all_cocycles(G))[:6]:
        assert coboundary_ok(G, lambda x, y, z: phase(G, c, x, y, z))
        assert verify_cocycle(G, PhiTable.build(G, c), 3).ok


def test_verify_cocycle_count_and_message_shape():
    G = AbelianGroup((2, 2, 2))
    r = verify_cocycle(G, PhiTable.build(G, CocycleData((1, 1, 1))), 3)
    assert r.ok and r.checked == 8 ** 4 and r.exhaustive


def test_verify_cocycle_detects_mutation():
    G = AbelianGroup((2, 2, 2))
    c = CocycleData((1, 1, 1))
    target = ((1, 0, 0), (0, 1, 0), (1, 1, 0))

    def bad(x, y, z):
        r = phi_eval(G, c, x, y, z)
        return r * RootExp(2, 1) if (x, y, z) == target else r

    res = verify_cocycle(G, bad, 3)
    assert not res.ok
    assert res.witness is not None
    # the witness really violates the identity
    e, a, b, h = res.witness
    lhs = bad(G.mul(e, a), b, h) * bad(e, a, G.mul(b, h))
    rhs = bad(e, a, b) * bad(e, G.mul(a, b), h) * bad(a, b, h)
    assert not lhs.same_value(rhs)


def test_verify_cocycle_sampled_and_bounds():
    G = AbelianGroup((4, 4, 4))
    c = CocycleData((1, 2, 3), ((0, 1, 1),))
    with pytest.raises(GroupTooLargeForExhaustive):
        verify_cocycle(G, PhiTable.build(G, c), 3, exhaustive=True)
    r = verify_cocycle(G, PhiTable.build(G, c), 3, samples=500, seed=7)
    assert r.ok and not r.exhaustive and r.checked == 500
    with pytest.raises(ValueError):
        verify_cocycle(G, PhiTable.build(G, c), 4)


@pytest.mark.parametrize("moduli", [(2,), (4,), (2, 2), (2, 4), (3, 3)])
def test_tilde_is_two_cocycle(moduli):
    G = AbelianGroup(moduli)
    for c in list(all_cocycles(G))[:8]:
        for g in G.elements:
            assert verify_cocycle(G, lambda e, f, g=g: phi_tilde_eval(G, c, g, e, f), 2).ok


def test_tilde_table_matches_eval():
    G = AbelianGroup((2, 4))
    c = CocycleData((1, 3), ((0, 1, 1),))
    W = PhiTable.build(G, c).tilde
    for g, e, f in itertools.product(G.elements, repeat=3):
        r = phi_tilde_eval(G, c, g, e, f)
        assert Fraction(int(W[G.index(g), G.index(e), G.index(f)]), G.exponent) == turn(r)


@pytest.mark.parametrize("moduli", [(2,), (4,), (2, 2), (2, 2, 2), (2, 6)])
def test_verify_all_cocycles_matches_individual(moduli):
    G = AbelianGroup(moduli)
    fam = verify_all_cocycles(G)
    assert fam.ok
    assert fam.cocycles == len(list(all_cocycles(G)))


def test_verify_all_cocycles_reports_failure(monkeypatch):
    # corrupt one elementary table; the batched verifier must notice
    import quasiq.group as grp

    real = grp.elementary_tables

    def broken(G):
        keys, E = real(G)
        E = E.copy()
        E[0, 1, 1, 1] = (E[0, 1, 1, 1] + 1) % G.exponent
        return keys, E

    monkeypatch.setattr(grp, "elementary_tables", broken)
    fam = grp.verify_all_cocycles(AbelianGroup((4,)))
    assert not fam.ok and fam.failure is not None


# -- reduced-form identities ---------------------------------------------


@pytest.mark.parametrize("moduli", [(2,), (4,), (2, 2), (2, 4), (3, 3), (2, 2, 2), (2, 2, 4)])
def test_reduced_identities(moduli):
    G = AbelianGroup(moduli)
    M = G.mul_table
    n = G.order
    for c in all_cocycles(G, reduced_only=True):
        T = PhiTable.build(G, c)
        P, L = T.table, T.order
        assert np.array_equal(P, np.transpose(P, (0, 2, 1)))  # symmetric in the last two
        e = np.arange(n)[:, None, None, None]
        f = np.arange(n)[None, :, None, None]
        g = np.arange(n)[None, None, :, None]
        h = np.arange(n)[None, None, None, :]
        assert not ((P[M[e, f], g, h] - P[e, g, h] - P[f, g, h]) % L).any()  # multiplicative in the first
        assert np.array_equal(T.tilde, P % L)  # the induced cocycle is Phi itself


def test_reduced_identities_fail_with_a3():
    G = AbelianGroup((2, 2, 2))
    T = PhiTable.build(G, CocycleData.make((0, 0, 0), a3={(0, 1, 2): 1}))
    assert not np.array_equal(T.table, np.transpose(T.table, (0, 2, 1)))


# -- cocycle data ------------------------------------------------------------


def test_parameter_slots_z2cubed():
    slots = parameter_slots(AbelianGroup((2, 2, 2)))
    assert len(slots) == 3 + 3 + 1
    assert all(size == 2 for _, size in slots)
    assert len(list(all_cocycles(AbelianGroup((2, 2, 2))))) == 2 ** 7
    assert len(list(all_cocycles(AbelianGroup((2, 2, 2)), reduced_only=True))) == 2 ** 6


@pytest.mark.parametrize("moduli,a,a2,a3", [
    ((2, 2), (2, 0), {}, {}),
    ((2, 2), (1,), {}, {}),
    ((2, 4), (1, 1), {(0, 1): 2}, {}),
    ((2, 2, 2), (1, 1, 1), {(1, 0): 1}, {}),
    ((2, 2, 2), (1, 1, 1), {}, {(0, 1, 2): 2}),
])
def test_validate_rejects(moduli, a, a2, a3):
    with pytest.raises(InvalidCocycle):
        CocycleData.make(a, a2, a3).validate(AbelianGroup(moduli))


@st.composite
def systems(draw):
    moduli = tuple(sorted(draw(st.lists(st.sampled_from([2, 3, 4, 6]), min_size=1, max_size=3))))
    G = AbelianGroup(moduli)
    values = [draw(st.integers(0, size - 1)) for _, size in parameter_slots(G)]
    from quasiq.group import cocycle_from_params

    return G, cocycle_from_params(G, values)


@settings(max_examples=100, deadline=None)
@given(systems())
def test_system_json_roundtrip(sys_):
    G, c = sys_
    doc = system_to_json(G, c)
    G2, c2 = system_from_json(json.loads(json.dumps(doc)))
    assert G2 == G and c2 == c


def test_system_json_defaults_and_errors():
    G, c = system_from_json({"moduli": [2, 2, 2], "a": [1, 1, 1], "a2": [{"s": 1, "t": 2}]})
    assert c == CocycleData((1, 1, 1))
    G, c = system_from_json({"moduli": [4]})
    assert c.is_trivial
    with pytest.raises(InvalidCocycle):
        system_from_json({"a": [1]})
    with pytest.raises(InvalidCocycle):
        system_from_json({"moduli": [2], "a2": [{"s": "x"}]})


def test_phi_exponent_normalized():
    G = AbelianGroup((2, 4))
    for c in all_cocycles(G):
        for x, z in itertools.product(G.elements, repeat=2):
            assert phi_exponent(G, c, x, G.identity, z) == 0
