from .exact import ExactSolution, solve_exact
from .formulation import MilpInstance, build_milp, default_K, rlt_implied_range, solution_values
from .lpformat import export_milp, parse_lp

__all__ = [
    "ExactSolution",
    "MilpInstance",
    "build_milp",
    "default_K",
    "export_milp",
    "parse_lp",
    "rlt_implied_range",
    "solution_values",
    "solve_exact",
]
