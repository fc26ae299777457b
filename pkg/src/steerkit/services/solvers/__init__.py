"""Conic solver backends for the LHS feasibility programs."""
from steerkit.services.solvers.base import (
    ConicProgram,
    ConicSolution,
    ConicSolver,
    SolverStatus,
)
from steerkit.services.solvers.factory import get_solver, reset_solver

__all__ = [
    'ConicProgram', 'ConicSolution', 'ConicSolver', 'SolverStatus',
    'get_solver', 'reset_solver',
]
