"""Quasi-resonance engines for the three well types."""

from .case_a import AiryPolyPair, CaseASolution, ExpPoly, case_a_recurrence
from .case_b import CaseBSolution, case_b_continuation, case_b_lambda1
from .case_c import CaseCSolution, GHExpansion, case_c_recurrence
from .explicit import (
    case_a_explicit,
    case_b_expansion,
    case_b_k3,
    case_c_explicit,
    case_c_k4,
    constant_index_expansion,
)
from .operators import OperatorTaylorTerm, required_derivatives, taylor_operators
from .quasimodes import LatticeGaps, expansion, lattice_gaps, quasimode_profile, wkb_imag_estimate

__all__ = [
    "AiryPolyPair", "CaseASolution", "CaseBSolution", "CaseCSolution", "ExpPoly", "GHExpansion",
    "LatticeGaps", "OperatorTaylorTerm", "case_a_explicit", "case_a_recurrence", "case_b_continuation",
    "case_b_expansion", "case_b_k3", "case_b_lambda1", "case_c_explicit", "case_c_k4", "case_c_recurrence",
    "constant_index_expansion", "expansion", "lattice_gaps", "quasimode_profile", "required_derivatives",
    "taylor_operators", "wkb_imag_estimate",
]
