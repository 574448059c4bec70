"""Vertex-staggered finite volume solvers on triangular meshes."""

from ._fvstag import (
    ConfigError,
    GeometryError,
    IOError,
    Mesh,
    SolverError,
    case_names,
    convergence,
    divergence_dual,
    gradient_primal,
    run_case,
    taylor_green_exact,
    verify_operators,
)

__all__ = [
    "ConfigError",
    "GeometryError",
    "IOError",
    "Mesh",
    "SolverError",
    "case_names",
    "convergence",
    "divergence_dual",
    "gradient_primal",
    "run_case",
    "taylor_green_exact",
    "verify_operators",
]
