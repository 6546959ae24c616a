"""Enumeration of admissible series, presentations, and the Z2^3 census."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterator, Sequence

import numpy as np

from .cyclo import RootExp
from .errors import DimensionLimitExceeded, NonReducedCocycle, NonSymmetricCocycle, UnclassifiedSeries
from .group import AbelianGroup, CocycleData, GroupElem, all_cocycles
from .qchar import AdmissibleSeries, QuasiCharacter, check_admissible, solve_quasicharacters


@dataclass
class _Candidates:
    """All (degree, quasi-character) pairs with nontrivial diagonal value."""

    G: AbelianGroup
    c: CocycleData
    by_degree: dict[GroupElem, list[QuasiCharacter]]
    obstructed: set[GroupElem]
    index: dict[tuple, int]
    chars: list[QuasiCharacter]
    compat: np.ndarray  # compat[a, b]: chi_a(g_b) chi_b(g_a) = 1


def _candidates(G: AbelianGroup, c: CocycleData, obstruction_scan: bool) -> _Candidates:
    if not c.is_reduced and not obstruction_scan:
        raise NonReducedCocycle("enumeration needs a reduced cocycle unless scanning for obstructions")
    L2 = G.ambient
    by_degree: dict[GroupElem, list[QuasiCharacter]] = {}
    obstructed: set[GroupElem] = set()
    chars: list[QuasiCharacter] = []
    for g in G.elements:
        if g == G.identity:
            continue
        try:
            sols = solve_quasicharacters(G, c, g)
        except NonSymmetricCocycle:
            obstructed.add(g)
            by_degree[g] = []
            continue
        keep = [ch for ch in sols if ch.value_exp(g, G) % L2]
        by_degree[g] = keep
        chars.extend(keep)
    index = {(ch.g, ch.exps): k for k, ch in enumerate(chars)}
    vals = np.array([[ch.value_exp(o.g, G) for o in chars] for ch in chars], dtype=np.int64).reshape(len(chars), len(chars))
    compat = (vals + vals.T) % L2 == 0
    return _Candidates(G, c, by_degree, obstructed, index, chars, compat)


def iter_admissible(
    G: AbelianGroup,
    c: CocycleData,
    n: int,
    *,
    frame: bool = True,
    up_to_perm: bool = False,
    obstruction_scan: bool = False,
    degrees: Sequence[GroupElem] | None = None,
) -> Iterator[AdmissibleSeries]:
    """Yield admissible series of rank n, degree tuples lexicographic then branches.

    ``frame`` pins g_l = e_l for l <= rank(G) when n >= rank(G), the normal
    form in which the first generators are the distinguished basis of G.
    ``up_to_perm`` keeps one representative per multiset of (degree, character)
    pairs on the unpinned positions.  ``degrees`` restricts to one degree tuple.
    """
    if n < 1:
        raise ValueError("rank must be positive")
    cand = _candidates(G, c, obstruction_scan)
    nonid = [g for g in G.elements if g != G.identity]
    pinned = G.rank if (frame and n >= G.rank and degrees is None) else 0
    if degrees is not None:
        degree_tuples: Iterator = iter([tuple(G.element(g) for g in degrees)])
    else:
        head = tuple(G.gen(l) for l in range(pinned))
        if up_to_perm:
            tails = itertools.combinations_with_replacement(nonid, n - pinned)
        else:
            tails = itertools.product(nonid, repeat=n - pinned)
        degree_tuples = (head + t for t in tails)
    for degs in degree_tuples:
        if len(degs) != n or any(g == G.identity for g in degs):
            continue
        if not G.generates(degs):
            continue
        pools = [cand.by_degree[g] for g in degs]
        if any(not p for p in pools):
            continue
        yield from _branches(cand, degs, pools, pinned if up_to_perm else n)


def _branches(cand: _Candidates, degs, pools, free_from: int) -> Iterator[AdmissibleSeries]:
    n = len(degs)
    idx_pools = [[cand.index[(ch.g, ch.exps)] for ch in p] for p in pools]
    compat = cand.compat
    chosen: list[int] = []

    def rec(i: int):
        if i == n:
            yield AdmissibleSeries(cand.G, cand.c, tuple(cand.chars[k] for k in chosen))
            return
        lo = -1
        if i > free_from and degs[i] == degs[i - 1]:
            lo = chosen[-1]
        for k in idx_pools[i]:
            if k < lo:
                continue
            if all(compat[k, j] for j in chosen):
                chosen.append(k)
                yield from rec(i + 1)
                chosen.pop()

    yield from rec(0)


@dataclass
class ClassificationReport:
    group: tuple[int, ...]
    cocycle: CocycleData
    rank: int | None
    entries: list[dict] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.entries:
            if e.get("family") is not None:
                out[str(e["family"])] = out.get(str(e["family"]), 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "schema": "quasiq/1",
            "group": list(self.group),
            "cocycle": self.cocycle.to_json(),
            "rank": self.rank,
            "count": self.count,
            "entries": self.entries,
        }

    @classmethod
    def from_json(cls, d: dict) -> ClassificationReport:
        return cls(tuple(d["group"]), CocycleData.from_json(d["cocycle"], rank=len(d["group"])),
                   d.get("rank"), list(d.get("entries", [])))


def series_entry(series: AdmissibleSeries, family=None, dim_limit: int | None = None) -> dict:
    N = list(series.nilpotency)
    dim = series.G.order * prod(N)
    entry = {
        "alpha": [list(g) for g in series.degrees],
        "branches": [list(b) for b in series.branches],
        "chars": [[{"order": ch.order, "exp": e} for e in ch.exps] for ch in series.chars],
        "N": N,
        "dim": dim,
        "family": family,
    }
    if dim_limit is not None and dim > dim_limit:
        entry["over_limit"] = True
    return entry


def enumerate_admissible(
    G: AbelianGroup,
    c: CocycleData,
    n: int,
    *,
    up_to_perm: bool = False,
    dim_limit: int | None = None,
    frame: bool = True,
    obstruction_scan: bool = False,
    tag: bool = False,
) -> ClassificationReport:
    """Report of all admissible series of rank n (see :func:`iter_admissible`)."""
    c.validate(G)
    report = ClassificationReport(G.moduli, c, n)
    for s in iter_admissible(G, c, n, frame=frame, up_to_perm=up_to_perm, obstruction_scan=obstruction_scan):
        fam = family_tag(s) if tag else None
        report.entries.append(series_entry(s, fam, dim_limit))
    return report


def series_from_entry(G: AbelianGroup, c: CocycleData, entry: dict) -> AdmissibleSeries:
    return AdmissibleSeries.from_json(G, c, {"degrees": entry["alpha"], "chars": entry["chars"]})


def construct(series: AdmissibleSeries, dim_limit: int | None = None):
    """Build the bosonization of a series, refusing anything above ``dim_limit``."""
    from .bosonize import MajidAlgebra

    dim = series.G.order * prod(series.nilpotency)
    if dim_limit is not None and dim > dim_limit:
        raise DimensionLimitExceeded(f"dimension {dim} exceeds limit {dim_limit}")
    return MajidAlgebra.build(series)


# -- Z2^3 families ---------------------------------------------------------

_Z2CUBED = AbelianGroup((2, 2, 2))


def _is_z2cubed_standard(series: AdmissibleSeries) -> bool:
    return (series.G == _Z2CUBED and series.c == CocycleData((1, 1, 1)) and series.n >= 3
            and series.degrees[:3] == ((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def family_tag(series: AdmissibleSeries) -> int:
    """Family (1)-(4) of an admissible series over Z2^3 with a = (1,1,1).

    The first three degrees must be e_1, e_2, e_3; the extra characters are
    identified by their degrees (chi'_k at e_k, chi_ij at e_i e_j, chi_123 at
    e_1 e_2 e_3).  Membership conditions and the nilpotency pattern are checked;
    anything else raises UnclassifiedSeries.
    """
    if not _is_z2cubed_standard(series):
        raise UnclassifiedSeries("family tags need Z2^3, a=(1,1,1) and leading degrees e_1, e_2, e_3")
    extras = series.degrees[3:]
    N = series.nilpotency
    L2 = series.G.ambient

    def diag(i: int) -> int:
        return series.q_exp(i, i) % L2

    singles = [g for g in extras if sum(g) == 1]
    doubles = [g for g in extras if sum(g) == 2]
    triples = [g for g in extras if sum(g) == 3]

    def fail(msg: str):
        raise UnclassifiedSeries(f"degrees {series.degrees}: {msg}")

    def pair_of(g) -> tuple[int, int]:
        i, j = (l for l in range(3) if g[l])
        return i, j

    if not doubles and not triples:
        if len(set(singles)) != len(singles):
            fail("repeated chi'_k")
        fam, expect = 1, [4] * series.n
    elif triples:
        if len(triples) != 1 or singles or len(set(doubles)) > 1:
            fail("chi_123 with incompatible extras")
        if doubles:
            i, j = pair_of(doubles[0])
            if diag(i) != diag(j):
                fail("chi_i(x_i) != chi_j(x_j)")
        fam, expect = 4, [4, 4, 4] + [4 if sum(g) == 3 else 2 for g in extras]
    elif singles:
        if len(singles) != 1 or len(set(doubles)) != 1:
            fail("chi'_k with incompatible extras")
        k = singles[0].index(1)
        i, j = pair_of(doubles[0])
        if k in (i, j):
            fail("chi_ij must sit on the complement of k")
        if diag(i) != diag(j):
            fail("chi_i(x_i) != chi_j(x_j)")
        fam, expect = 2, [4, 4, 4] + [4 if sum(g) == 1 else 2 for g in extras]
    else:
        if len(set(doubles)) != 1:
            fail("two different chi_ij")
        i, j = pair_of(doubles[0])
        if diag(i) != diag(j):
            fail("chi_i(x_i) != chi_j(x_j)")
        fam, expect = 3, [4] * 3 + [2] * len(extras)
    if list(N) != expect:
        fail(f"nilpotencies {N} differ from {expect}")
    return fam


def z2cubed_report(max_rank: int = 7, up_to_perm: bool = False) -> dict:
    """Census over Z2^3 for the seven nonzero a in {0,1}^3 (a2 = a3 = 0).

    Ranks 3..max_rank are enumerated in the framed normal form; series for
    a = (1,1,1) get family tags.  Also confirms that every cocycle with some
    a_st != 0 admits no framed rank-3 series.
    """
    G = _Z2CUBED
    blocks = []
    for a in itertools.product((0, 1), repeat=3):
        if not any(a):
            continue
        c = CocycleData(a)
        tag = a == (1, 1, 1)
        ranks = []
        for n in range(3, max_rank + 1):
            rep = enumerate_admissible(G, c, n, up_to_perm=up_to_perm, tag=tag)
            ranks.append(rep.to_json())
        blocks.append({"cocycle": c.to_json(), "ranks": ranks})
    a2_check = []
    for c in all_cocycles(G, reduced_only=True):
        if not c.a2:
            continue
        cnt = sum(1 for _ in iter_admissible(G, c, 3))
        a2_check.append({"cocycle": c.to_json(), "count": cnt})
    return {
        "schema": "quasiq/1",
        "group": [2, 2, 2],
        "max_rank": max_rank,
        "up_to_perm": up_to_perm,
        "blocks": blocks,
        "a2_nonzero_rank3": a2_check,
    }


# -- presentations ---------------------------------------------------------

def theorem_coefficients(series: AdmissibleSeries) -> dict:
    """Closed-form relation coefficients from the degree matrix and branch choice.

    e_l X_j = chi_j(e_l) X_j e_l, X_i X_j = q X_j X_i with
    q = prod_l chi_j(e_l)^{alpha_il}, and N_i = |chi_i(g_i)|.
    """
    G = series.G
    L2 = G.ambient
    n = series.n
    group_rel = [[series.chars[j].exps[l] % L2 for j in range(n)] for l in range(G.rank)]
    swap = [[sum(series.chars[j].exps[l] * series.degrees[i][l] for l in range(G.rank)) % L2
             for j in range(n)] for i in range(n)]
    nil = [RootExp(L2, swap[i][i]).multiplicative_order() for i in range(n)]
    return {"group_relations": group_rel, "swap": swap, "N": nil}


def present_majid(G: AbelianGroup, c: CocycleData, series: AdmissibleSeries) -> dict:
    """Generators-and-relations presentation of the bosonization of ``series``."""
    report = check_admissible(series)
    if not report.ok:
        from .errors import InvalidSeries

        raise InvalidSeries("; ".join(report.violations))
    L2 = G.ambient
    closed = theorem_coefficients(series)
    # cross-check against direct evaluation of the characters
    for l in range(G.rank):
        for j in range(series.n):
            if closed["group_relations"][l][j] != series.value_exp(j, G.gen(l)) % L2:
                raise AssertionError("closed-form e_l X_j coefficient disagrees with chi_j(e_l)")
    for i in range(series.n):
        for j in range(series.n):
            if closed["swap"][i][j] != series.q_exp(i, j) % L2:
                raise AssertionError("closed-form X_i X_j coefficient disagrees with chi_j(g_i)")
    if tuple(closed["N"]) != series.nilpotency:
        raise AssertionError("closed-form nilpotency disagrees")

    def root(e: int) -> dict:
        r = RootExp(L2, e)
        return {"order": r.order, "exp": r.exp}

    relations = []
    for l in range(G.rank):
        for j in range(series.n):
            relations.append({"kind": "group", "lhs": f"e{l + 1} X{j + 1}", "rhs": f"X{j + 1} e{l + 1}",
                              "coeff": root(closed["group_relations"][l][j])})
    for i in range(series.n):
        for j in range(series.n):
            if i != j:
                relations.append({"kind": "swap", "lhs": f"X{i + 1} X{j + 1}", "rhs": f"X{j + 1} X{i + 1}",
                                  "coeff": root(closed["swap"][i][j])})
    for i, k in enumerate(closed["N"]):
        relations.append({"kind": "nilpotent", "lhs": f"X{i + 1}^{k}", "rhs": "0", "power": k})
    coproducts = [{"gen": f"e{l + 1}", "value": f"e{l + 1} (x) e{l + 1}"} for l in range(G.rank)]
    for i, g in enumerate(series.degrees):
        coproducts.append({"gen": f"X{i + 1}", "value": f"X{i + 1} (x) 1 + {_fmt_elem(g)} (x) X{i + 1}",
                           "degree": list(g)})
    fam = None
    if _is_z2cubed_standard(series):
        fam = family_tag(series)
    return {
        "schema": "quasiq/1",
        "group": list(G.moduli),
        "cocycle": c.to_json(),
        "generators": [f"e{l + 1}" for l in range(G.rank)] + [f"X{i + 1}" for i in range(series.n)],
        "degrees": [list(g) for g in series.degrees],
        "relations": relations,
        "coproducts": coproducts,
        "N": list(closed["N"]),
        "dim": G.order * prod(closed["N"]),
        "family": fam,
    }


def _fmt_elem(g: GroupElem) -> str:
    parts = [f"e{l + 1}" if k == 1 else f"e{l + 1}^{k}" for l, k in enumerate(g) if k]
    return " ".join(parts) or "1"
