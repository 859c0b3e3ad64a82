from lpstream.problems.lp import (
    BoundedLpProblem,
    ClassificationProblem,
    classification_to_lp,
    lp_rows,
    lp_solve_basis,
    lp_violates,
    separates,
)
from lpstream.problems.meb import MebProblem, circumsphere, meb_correct, meb_solve_basis, meb_violates
from lpstream.problems.oracles import brute_force_meb, exact_lp, exact_meb, exact_sdp_grid, exact_svm
from lpstream.problems.sdp import (
    BoundedSdpProblem,
    frobenius_inner,
    saddle_to_sdp,
    sdp_build,
    sdp_correct,
    sdp_psd_violator,
)
from lpstream.problems.simplex import lex_max_lp
from lpstream.problems.svm import SvmProblem, svm_correct, svm_solve_basis, svm_violates

__all__ = [
    "BoundedLpProblem",
    "BoundedSdpProblem",
    "ClassificationProblem",
    "MebProblem",
    "SvmProblem",
    "brute_force_meb",
    "circumsphere",
    "classification_to_lp",
    "exact_lp",
    "exact_meb",
    "exact_sdp_grid",
    "exact_svm",
    "frobenius_inner",
    "lex_max_lp",
    "lp_rows",
    "lp_solve_basis",
    "lp_violates",
    "meb_correct",
    "meb_solve_basis",
    "meb_violates",
    "saddle_to_sdp",
    "sdp_build",
    "sdp_correct",
    "sdp_psd_violator",
    "separates",
    "svm_correct",
    "svm_solve_basis",
    "svm_violates",
]
