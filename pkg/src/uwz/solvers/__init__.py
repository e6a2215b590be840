"""Rate-distortion solvers: the phi functional, single-channel rates and the universal bounds."""
from .bounds import (
    RDBoundReport,
    RDProblem,
    SaddleResult,
    SolverSettings,
    bound_report,
    check_matching,
    e_star,
    hb_tilde,
    minimax_gap,
    pseudo_wz_rate,
    ra_lower,
    ra_upper,
    rd_classic,
    rm_lower,
    rm_lower_search,
    rm_upper,
    rm_upper_search,
    robust_witness,
    wz_rate,
)
from .functional import phi, phi_difference

__all__ = [
    "RDBoundReport",
    "RDProblem",
    "SaddleResult",
    "SolverSettings",
    "bound_report",
    "check_matching",
    "e_star",
    "hb_tilde",
    "minimax_gap",
    "phi",
    "phi_difference",
    "pseudo_wz_rate",
    "ra_lower",
    "ra_upper",
    "rd_classic",
    "rm_lower",
    "rm_lower_search",
    "rm_upper",
    "rm_upper_search",
    "robust_witness",
    "wz_rate",
]
