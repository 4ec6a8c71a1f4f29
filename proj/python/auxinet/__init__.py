"""Adaptive transport networks on graphs: simulation core bindings."""

from ._core import (
    ConfigError,
    ConservationError,
    ContinuumGrid,
    ContinuumParams,
    DimensionError,
    GeometryError,
    Graph,
    IntegrationError,
    InvariantViolation,
    ModelParams,
    SingularSystemError,
    boundary_vertices,
    build_diamond,
    build_shape,
    check_dir,
    kirchhoff_solve,
    kirchhoff_solve_blocks,
    murray_residual,
    nearest_boundary_vertex,
    p_laplacian_steady,
    run_config,
    run_continuum,
    simulate,
    solve_elliptic,
)

__all__ = [
    "ConfigError",
    "ConservationError",
    "ContinuumGrid",
    "ContinuumParams",
    "DimensionError",
    "GeometryError",
    "Graph",
    "IntegrationError",
    "InvariantViolation",
    "ModelParams",
    "SingularSystemError",
    "boundary_vertices",
    "build_diamond",
    "build_shape",
    "check_dir",
    "kirchhoff_solve",
    "kirchhoff_solve_blocks",
    "murray_residual",
    "nearest_boundary_vertex",
    "p_laplacian_steady",
    "run_config",
    "run_continuum",
    "simulate",
    "solve_elliptic",
]

__version__ = "0.1.0"
