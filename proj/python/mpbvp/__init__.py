"""Many-point boundary value problem solver.

Python bindings over the C++ core: fundamental-matrix solves, fixed-point
iteration for quasi-linear problems, spectral dichotomy analysis and the
finite-difference verification oracle.
"""

from ._core import (
    Problem,
    Solution,
    SolverError,
    collocation,
    eigenvalues,
    evaluate_expression,
    load_problem,
    problem_from_json,
    solve,
    solve_picard,
    spectrum,
    sweep,
    __version__,
)

__all__ = [
    "Problem",
    "Solution",
    "SolverError",
    "collocation",
    "eigenvalues",
    "evaluate_expression",
    "load_problem",
    "problem_from_json",
    "solve",
    "solve_picard",
    "spectrum",
    "sweep",
    "__version__",
]
