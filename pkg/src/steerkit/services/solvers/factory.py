"""Conic solver backend factory."""
import logging

from steerkit.config import current_config
from steerkit.services.solvers.base import ConicSolver

logger = logging.getLogger(__name__)

_solver_backends: dict[tuple, ConicSolver] = {}


def get_solver(backend: str | None = None) -> ConicSolver:
    """Get the configured solver backend (cached per configuration)."""
    config = current_config()
    backend_type = backend or config.SOLVER_BACKEND
    key = (backend_type, config.CVXPY_SOLVER, config.SOLVER_TOLERANCE, config.SOLVER_MAX_ITERATIONS)

    if key in _solver_backends:
        return _solver_backends[key]

    if backend_type == 'cvxopt':
        logger.info("Creating cvxopt solver backend")

        from steerkit.services.solvers.cvxopt_backend import CvxoptConicSolver

        solver = CvxoptConicSolver(
            tolerance=config.SOLVER_TOLERANCE,
            max_iterations=config.SOLVER_MAX_ITERATIONS,
        )
    elif backend_type == 'cvxpy':
        logger.info("Creating cvxpy solver backend")

        from steerkit.services.solvers.cvxpy_backend import CvxpyConicSolver

        solver = CvxpyConicSolver(
            solver=config.CVXPY_SOLVER,
            tolerance=config.SOLVER_TOLERANCE,
            max_iterations=config.SOLVER_MAX_ITERATIONS,
        )
    else:
        raise ValueError(f"Unknown SOLVER_BACKEND {backend_type!r}; expected 'cvxpy' or 'cvxopt'")

    _solver_backends[key] = solver
    return solver


def reset_solver() -> None:
    """Reset the cached solver backends."""
    global _solver_backends
    _solver_backends = {}
    logger.debug("Solver backend cache cleared")
