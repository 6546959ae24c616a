from __future__ import annotations

import cmath
import itertools
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiq.cyclo import CycNumber, RootExp, cyc_arith, cyclotomic_poly, qbinom, root_order
from quasiq.errors import IndexOutOfRange, OrderMismatch


def value(x: CycNumber) -> complex:
    """Numerical oracle: evaluate the coefficient vector at exp(2 pi i / M)."""
    z = cmath.exp(2j * cmath.pi / x.order)
    return sum(c * z ** k for k, c in enumerate(x.coeffs))


def close(a: complex, b: complex) -> bool:
    return abs(a - b) < 1e-7


ORDERS = [1, 2, 3, 4, 6, 8, 9, 12, 16]


@st.composite
def cyc(draw, order=None):
    M = order if order is not None else draw(st.sampled_from(ORDERS))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=M, max_size=M))
    return CycNumber(M, coeffs)


@st.composite
def cyc_pair(draw):
    M = draw(st.sampled_from(ORDERS))
    return draw(cyc(M)), draw(cyc(M))


@st.composite
def cyc_triple(draw):
    M = draw(st.sampled_from(ORDERS))
    return draw(cyc(M)), draw(cyc(M)), draw(cyc(M))


@pytest.mark.parametrize("m", range(1, 31))
def test_cyclotomic_poly_roots_are_primitive(m):
    # oracle: Phi_m vanishes exactly at the primitive m-th roots and has degree phi(m)
    p = cyclotomic_poly(m)
    totient = sum(1 for k in range(1, m + 1) if gcd(k, m) == 1)
    assert len(p) - 1 == totient
    assert p[-1] == 1
    for k in range(m):
        r = cmath.exp(2j * cmath.pi * k / m)
        val = sum(c * r ** i for i, c in enumerate(p))
        assert (abs(val) < 1e-8) == (gcd(k, m) == 1)


def test_cyclotomic_poly_small_values():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(8) == (1, 0, 0, 0, 1)


@settings(max_examples=150, deadline=None)
@given(cyc_pair())
def test_eq_matches_numeric(pair):
    a, b = pair
    assert (a == b) == close(value(a), value(b))


@settings(max_examples=150, deadline=None)
@given(cyc_triple())
def test_ring_axioms(t):
    a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == CycNumber.zero(a.order)
    assert a * CycNumber.one(a.order) == a
    assert close(value(a * b), value(a) * value(b))


@settings(max_examples=150, deadline=None)
@given(cyc())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inv()
        return
    assert a * a.inv() == CycNumber.one(a.order)
    assert close(value(a.inv()), 1 / value(a))


@settings(max_examples=100, deadline=None)
@given(cyc())
def test_hash_consistent_with_eq(a):
    shifted = CycNumber(a.order, [c + 1 for c in a.coeffs])
    # 1 + z + ... + z^{M-1} = 0 for M > 1, so adding it changes nothing
    if a.order > 1:
        assert shifted == a
        assert hash(shifted) == hash(a)


@settings(max_examples=100, deadline=None)
@given(cyc(), st.sampled_from([2, 3]))
def test_lift_preserves_value(a, k):
    b = a.lift(a.order * k)
    assert close(value(a), value(b))


def test_mismatched_orders_raise():
    with pytest.raises(OrderMismatch):
        CycNumber.one(4) + CycNumber.one(6)


def test_root_and_powers():
    z = CycNumber.root(8, 1)
    assert z ** 8 == CycNumber.one(8)
    assert z ** 4 == CycNumber.from_int(8, -1)
    assert z ** -1 == CycNumber.root(8, 7)
    assert (z ** 2).as_root() == 2
    assert CycNumber.from_int(8, 2).as_root() is None


@pytest.mark.parametrize("op", ["add", "mul", "neg", "inv", "eq"])
def test_cyc_arith_dispatch(op):
    a, b = CycNumber.root(12, 5), CycNumber.from_int(12, 3) + CycNumber.root(12, 2)
    r = cyc_arith(a, b, op)
    ref = {"add": value(a) + value(b), "mul": value(a) * value(b), "neg": -value(a),
           "inv": 1 / value(a), "eq": False}[op]
    if op == "eq":
        assert r is False
    else:
        assert close(value(r), ref)


@pytest.mark.parametrize("a,b,expected", [
    (CycNumber.root(4, 2), CycNumber.from_int(4, -1), True),
    (CycNumber.one(3) + CycNumber.root(3, 1) + CycNumber.root(3, 2), CycNumber.zero(3), True),
    (CycNumber.root(8, 1) + CycNumber.root(8, 7), CycNumber.zero(8), False),
])
def test_cyc_arith_eq_examples(a, b, expected):
    assert cyc_arith(a, b, "eq") is expected
    assert close(value(a), value(b)) is expected


def test_cyc_arith_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        cyc_arith(CycNumber.zero(4), CycNumber.zero(4), "inv")


def test_cyc_arith_unknown_op():
    with pytest.raises(ValueError):
        cyc_arith(CycNumber.one(2), CycNumber.one(2), "pow")


@pytest.mark.parametrize("order,exp,expected", [(4, 1, 4), (4, 2, 2), (12, 8, 3), (6, 0, 1), (8, 6, 4)])
def test_root_order(order, exp, expected):
    assert root_order(RootExp(order, exp)) == expected


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ORDERS), st.integers(-50, 50), st.integers(-50, 50))
def test_rootexp_group_law(order, i, j):
    a, b = RootExp(order, i), RootExp(order, j)
    assert close(value((a * b).to_cyc()), value(a.to_cyc()) * value(b.to_cyc()))
    assert (a / a).is_one()
    assert a.same_value(a.lift(order * 3))
    assert RootExp.from_json(a.to_json()).same_value(a)


def qbinom_oracle(m: int, i: int, q: RootExp) -> CycNumber:
    """Subset-sum definition: sum over i-subsets S of {0..m-1} of q^{sum S - i(i-1)/2}."""
    acc = CycNumber.zero(q.order)
    for S in itertools.combinations(range(m), i):
        acc = acc + CycNumber.root(q.order, q.exp * (sum(S) - i * (i - 1) // 2))
    return acc


@pytest.mark.parametrize("order,exp", [(4, 1), (4, 2), (6, 1), (8, 3), (3, 1), (12, 5), (1, 0)])
def test_qbinom_against_subset_sums(order, exp):
    q = RootExp(order, exp)
    for m in range(0, 9):
        for i in range(m + 1):
            assert qbinom(m, i, q) == qbinom_oracle(m, i, q), (m, i)


def test_qbinom_vanishes_at_root_order():
    # (l choose k)_q = 0 for 0 < k < l when q is a primitive l-th root
    for order, exp in [(4, 1), (6, 1), (8, 3), (12, 5)]:
        q = RootExp(order, exp)
        ell = root_order(q)
        for k in range(1, ell):
            assert qbinom(ell, k, q).is_zero()


def test_qbinom_out_of_range():
    with pytest.raises(IndexOutOfRange):
        qbinom(3, 4, RootExp(4, 1))


def test_qbinom_at_one_is_binomial():
    from math import comb

    for m in range(7):
        for i in range(m + 1):
            assert qbinom(m, i, RootExp(1, 0)) == CycNumber.from_int(1, comb(m, i))


def test_format_legend():
    x = CycNumber.root(4, 1) + CycNumber.from_int(4, 2)
    s = x.format()
    assert "z" in s


def test_canon_against_numpy_polydiv():
    # independent reduction: numpy polynomial remainder by Phi_M
    rng = np.random.default_rng(3)
    for M in [5, 8, 9, 12, 15]:
        p = np.array(cyclotomic_poly(M), dtype=float)
        for _ in range(20):
            c = rng.integers(-4, 5, size=M)
            x = CycNumber(M, c.tolist())
            _, r = np.polydiv(c[::-1].astype(float), p[::-1])
            r = np.round(r[::-1]).astype(int).tolist()
            r += [0] * (len(p) - 1 - len(r))
            canon = list(x.canon) + [0] * (len(p) - 1 - len(x.canon))
            assert canon == r
