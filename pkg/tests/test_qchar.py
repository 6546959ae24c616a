from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from quasiq.classify import iter_admissible
from quasiq.cyclo import RootExp
from quasiq.errors import InvalidSeries, NonSymmetricCocycle
from quasiq.group import AbelianGroup, CocycleData, all_cocycles
from quasiq.qchar import (
    AdmissibleSeries,
    QuasiCharacter,
    check_admissible,
    is_quasicharacter,
    lemma_base_exponents,
    matrix_admissible,
    solve_quasicharacters,
    symmetry_witness,
)

from test_group import phase


def tilde(G, c, g, e, f) -> Fraction:
    return (phase(G, c, g, e, f) + phase(G, c, e, f, g) - phase(G, c, e, g, f)) % 1


def brute_chars(G: AbelianGroup, c: CocycleData, g) -> set[tuple[Fraction, ...]]:
    """Every quasi-character for Phi~_g with values in mu_{L^2}, as value tables.

    Generator values range over mu_{L^2}; the table is propagated by
    chi(x e_l) = chi(x) chi(e_l) / Phi~_g(x, e_l) and kept only if the
    defining identity holds on every pair.
    """
    L2 = G.ambient
    els = G.elements
    found = set()
    for vals in itertools.product(range(L2), repeat=G.rank):
        chi = {G.identity: Fraction(0)}
        frontier = [G.identity]
        while frontier:
            x = frontier.pop()
            for l in range(G.rank):
                y = G.mul(x, G.gen(l))
                if y not in chi:
                    chi[y] = (chi[x] + Fraction(vals[l], L2) - tilde(G, c, g, x, G.gen(l))) % 1
                    frontier.append(y)
        if all((chi[f] + chi[h] - tilde(G, c, g, f, h) - chi[G.mul(f, h)]) % 1 == 0
               for f, h in itertools.product(els, repeat=2)):
            found.add(tuple(chi[h] for h in els))
    return found


def table_of(G, ch: QuasiCharacter):
    return tuple(Fraction(ch.value_exp(h, G), ch.order) % 1 for h in G.elements)


CASES = [
    ((2,), (1,), (), ()),
    ((4,), (1,), (), ()),
    ((4,), (2,), (), ()),
    ((3,), (1,), (), ()),
    ((2, 2), (1, 1), ((0, 1, 1),), ()),
    ((2, 4), (1, 3), ((0, 1, 1),), ()),
    ((2, 2, 2), (1, 1, 1), (), ()),
    ((2, 2, 2), (1, 0, 1), ((0, 2, 1),), ()),
]


@pytest.mark.parametrize("moduli,a,a2,a3", CASES)
def test_solutions_match_brute_force(moduli, a, a2, a3):
    G = AbelianGroup(moduli)
    c = CocycleData(a, a2, a3)
    for g in G.elements:
        want = brute_chars(G, c, g)
        if not want:
            with pytest.raises(NonSymmetricCocycle):
                solve_quasicharacters(G, c, g)
            continue
        got = solve_quasicharacters(G, c, g)
        tables = [table_of(G, ch) for ch in got]
        assert len(set(tables)) == len(tables)
        assert set(tables) == want
        for ch in got:
            assert is_quasicharacter(G, c, ch) is None


def test_nonreduced_symmetric_cocycles_are_solved():
    # a3 != 0: some degrees still carry quasi-characters; those must be genuine
    G = AbelianGroup((2, 2, 2))
    c = CocycleData.make((1, 0, 0), a3={(0, 1, 2): 1})
    ok_degrees = 0
    for g in G.elements:
        want = brute_chars(G, c, g)
        try:
            got = solve_quasicharacters(G, c, g)
        except NonSymmetricCocycle as exc:
            assert not want
            assert exc.witness is not None
            continue
        ok_degrees += 1
        assert {table_of(G, ch) for ch in got} == want
    assert ok_degrees >= 1


def test_z2cubed_generator_values_are_plus_minus_i():
    # chi_1(x_1) = +-i for the standard cocycle a = (1,1,1)
    G = AbelianGroup((2, 2, 2))
    c = CocycleData((1, 1, 1))
    vals = {RootExp(ch.order, ch.value_exp((1, 0, 0), G)).lift(4).exp for ch in solve_quasicharacters(G, c, (1, 0, 0))}
    assert vals == {1, 3}


def test_lemma_base_exponents_square_to_constraint():
    G = AbelianGroup((2, 4))
    c = CocycleData((1, 1), ((0, 1, 1),))
    L2 = G.ambient
    for g in G.elements:
        base = lemma_base_exponents(G, c, g)
        for ch in solve_quasicharacters(G, c, g):
            for l, ml in enumerate(G.moduli):
                # every solution differs from the base root by an m_l-th root of unity
                assert ((ch.exps[l] - base[l]) * ml) % L2 == 0


def test_symmetry_witness():
    G = AbelianGroup((2, 2, 2))
    assert symmetry_witness(G, CocycleData((1, 1, 1)), (1, 1, 0)) is None
    c = CocycleData.make((0, 0, 0), a3={(0, 1, 2): 1})
    assert any(symmetry_witness(G, c, g) is not None for g in G.elements)


def test_check_admissible_reports_each_violation():
    G = AbelianGroup((2, 2, 2))
    c = CocycleData((1, 1, 1))
    s = next(iter_admissible(G, c, 3))
    assert check_admissible(s).ok
    # degrees that do not generate
    bad = AdmissibleSeries(G, c, s.chars[:2])
    assert any("generate" in v for v in check_admissible(bad).violations)
    # chi attached to the wrong degree
    wrong = QuasiCharacter((0, 1, 0), s.chars[0].exps, s.chars[0].order)
    r = check_admissible(AdmissibleSeries(G, c, (wrong,) + s.chars[1:]))
    assert not r.ok
    with pytest.raises(InvalidSeries):
        AdmissibleSeries(G, c, ())


def test_series_json_roundtrip():
    G = AbelianGroup((2, 4))
    c = CocycleData((1, 1))
    for s in itertools.islice(iter_admissible(G, c, 2), 20):
        assert AdmissibleSeries.from_json(G, c, s.to_json()) == s


def _exists_by_enumeration(G, c, rows) -> bool:
    return next(iter_admissible(G, c, len(rows), degrees=rows), None) is not None


@pytest.mark.parametrize("moduli", [(2,), (4,), (2, 2), (3,)])
def test_matrix_admissible_agrees_with_enumeration(moduli):
    G = AbelianGroup(moduli)
    nonid = [g for g in G.elements if g != G.identity]
    for c in all_cocycles(G, reduced_only=True):
        for n in (1, 2, 3):
            for rows in itertools.product(nonid, repeat=n):
                assert matrix_admissible(G, c, rows) == _exists_by_enumeration(G, c, rows), (c, rows)


def test_matrix_admissible_rejects_malformed():
    G = AbelianGroup((2, 2))
    c = CocycleData((1, 1))
    assert not matrix_admissible(G, c, [])
    assert not matrix_admissible(G, c, [(1, 0)])          # does not generate
    assert not matrix_admissible(G, c, [(0, 0), (1, 0), (0, 1)])  # identity degree
    assert not matrix_admissible(G, c, [(1, 0, 0)])


def test_trivial_cocycle_on_z2_has_sign_character():
    G = AbelianGroup((2,))
    chars = solve_quasicharacters(G, CocycleData((0,)), (1,))
    vals = sorted(Fraction(ch.value_exp((1,), G), ch.order) for ch in chars)
    assert vals == [0, Fraction(1, 2)]
