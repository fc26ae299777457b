"""Abstract interface for conic solver backends.

Every program handled here has the shape::

    minimize    c_free . u
    subject to  a_free u + a_cone x = b
                u <= upper                   (only when ``upper`` is given)
                (x[4k], x[4k+1:4k+4]) in SOC  for k = 0 .. n_blocks - 1

Backends report equality duals ``y`` with ``c - A^T y`` in the dual cone
(zero on the free coordinates whenever the upper bounds are inactive), so
``b . y`` equals the optimal value.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable

import numpy as np
import scipy.sparse as sp

SOC_SIZE = 4


class SolverStatus(str, Enum):
    OPTIMAL = 'optimal'
    INACCURATE = 'optimal_inaccurate'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'
    FAILED = 'failed'

    @property
    def solved(self) -> bool:
        return self in (SolverStatus.OPTIMAL, SolverStatus.INACCURATE)


@dataclass(frozen=True, eq=False)
class ConicProgram:
    """Data of one program; ``key`` identifies programs sharing ``a_cone``."""

    c_free: np.ndarray
    a_free: np.ndarray
    a_cone: sp.csr_matrix
    b: np.ndarray
    n_blocks: int
    key: Hashable
    upper: np.ndarray | None = None

    @property
    def n_free(self) -> int:
        return self.a_free.shape[1]

    @property
    def n_cone(self) -> int:
        return self.n_blocks * SOC_SIZE

    @property
    def n_rows(self) -> int:
        return self.b.shape[0]


@dataclass(frozen=True, eq=False)
class ConicSolution:
    status: SolverStatus
    objective: float
    u: np.ndarray | None
    x: np.ndarray | None
    y: np.ndarray | None
    solver: str
    residuals: dict[str, float] = field(default_factory=dict)


class ConicSolver(ABC):
    """Abstract conic solver."""

    name = 'abstract'

    def __init__(self, tolerance: float = 1e-10, max_iterations: int = 200):
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def solve(self, program: ConicProgram) -> ConicSolution:
        """Solve the program. Never raises for solver-side failures; see ``status``."""
        pass

    @staticmethod
    def residuals(program: ConicProgram, u: np.ndarray, x: np.ndarray,
                  y: np.ndarray | None) -> dict[str, float]:
        """Primal, cone, stationarity and gap residuals of a candidate solution."""
        primal = program.a_free @ u + program.a_cone @ x - program.b
        blocks = x.reshape(program.n_blocks, SOC_SIZE)
        cone = np.linalg.norm(blocks[:, 1:], axis=1) - blocks[:, 0]
        values = {
            'primal': float(np.max(np.abs(primal))),
            'cone': float(max(np.max(cone), 0.0)),
        }
        if y is not None:
            reduced = program.c_free - program.a_free.T @ y
            dual_value = program.b @ y
            if program.upper is not None:
                # multiplier of u <= upper
                bound = np.maximum(-reduced, 0.0)
                reduced = reduced + bound
                dual_value = dual_value - program.upper @ bound
            values['stationarity'] = float(np.max(np.abs(reduced), initial=0.0))
            values['gap'] = float(abs(program.c_free @ u - dual_value))
        return values

    @staticmethod
    def orient_dual(program: ConicProgram, y: np.ndarray) -> np.ndarray:
        """Return +-y, whichever satisfies the documented dual convention better."""
        def violation(candidate: np.ndarray) -> float:
            slack = -(program.a_cone.T @ candidate)
            blocks = slack.reshape(program.n_blocks, SOC_SIZE)
            cone = np.max(np.linalg.norm(blocks[:, 1:], axis=1) - blocks[:, 0])
            free = np.max(np.abs(program.c_free - program.a_free.T @ candidate), initial=0.0)
            return float(max(cone, 0.0) + free)

        return y if violation(y) <= violation(-y) else -y
