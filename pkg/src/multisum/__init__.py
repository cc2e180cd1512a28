"""Singularity ansatz and growth checks for balanced hypergeometric multisums."""

__version__ = "0.1.0"

from .entropy import binomial_rate, check_K_diagram, entropy, four_term_residual, regulator
from .laurent import (LaurentPoly, laurent_from_dict, laurent_reduction, laurent_to_term, torus_critical_points,
                      trace_power, trace_sequence, verify_psi)
from .polytope import Polytope, faces, lattice_points, newton_polytope
from .sequence import compute_sequence, confront_ansatz, estimate_growth
from .term import (BalancedTerm, LinearForm, SpecialTerm, as_balanced, eval_term, special_to_balanced,
                   term_from_dict, term_to_dict, validate)
from .variational import SolverConfig, ansatz_set, build_system, critical_values, potential, solve_system

__all__ = [
    "BalancedTerm", "LinearForm", "SpecialTerm", "LaurentPoly", "Polytope", "SolverConfig",
    "as_balanced", "ansatz_set", "binomial_rate", "build_system", "check_K_diagram", "compute_sequence",
    "confront_ansatz", "critical_values", "entropy", "estimate_growth", "eval_term", "faces",
    "four_term_residual", "lattice_points", "laurent_from_dict", "laurent_reduction", "laurent_to_term",
    "newton_polytope", "potential", "regulator", "solve_system", "special_to_balanced", "term_from_dict",
    "term_to_dict", "torus_critical_points", "trace_power", "trace_sequence", "validate", "verify_psi",
]
