"""Exact construction and classification of finite quasi-quantum linear spaces."""

from __future__ import annotations

from .bosonize import (
    MajidAlgebra,
    MajidElement,
    coinvariants,
    coinvariants_roundtrip,
    present,
    verify_majid_axioms,
)
from .classify import (
    ClassificationReport,
    construct,
    enumerate_admissible,
    family_tag,
    iter_admissible,
    present_majid,
    z2cubed_report,
)
from .cyclo import CycNumber, RootExp, cyclotomic_poly, qbinom, root_order
from .errors import *  # noqa: F401,F403
from .group import (
    AbelianGroup,
    CocycleData,
    PhiTable,
    all_cocycles,
    phi_eval,
    phi_tilde_eval,
    verify_all_cocycles,
    verify_cocycle,
)
from .nichols import BraidedSpace, SpaceTables, verify_braided_hopf
from .qchar import (
    AdmissibleSeries,
    QuasiCharacter,
    check_admissible,
    matrix_admissible,
    solve_quasicharacters,
)

__version__ = "0.1.0"
