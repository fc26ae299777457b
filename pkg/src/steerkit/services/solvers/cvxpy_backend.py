"""Conic backend built on cvxpy (Clarabel by default).

Programs with the same ``key`` share their compiled cvxpy problem; only the
parameter values change between solves. Compiled problems are cached per
thread because cvxpy parameters are mutable shared state.
"""
import threading

import cvxpy as cp
import numpy as np

from steerkit.services.solvers.base import (
    SOC_SIZE,
    ConicProgram,
    ConicSolution,
    ConicSolver,
    SolverStatus,
)

STATUS_MAP = {
    cp.OPTIMAL: SolverStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolverStatus.INACCURATE,
    cp.INFEASIBLE: SolverStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolverStatus.INFEASIBLE,
    cp.UNBOUNDED: SolverStatus.UNBOUNDED,
    cp.UNBOUNDED_INACCURATE: SolverStatus.UNBOUNDED,
}


class _Compiled:
    def __init__(self, program: ConicProgram):
        self.u = cp.Variable(program.n_free)
        self.x = cp.Variable(program.n_cone)
        self.c_free = cp.Parameter(program.n_free)
        self.a_free = cp.Parameter((program.n_rows, program.n_free))
        self.b = cp.Parameter(program.n_rows)

        blocks = cp.reshape(self.x, (program.n_blocks, SOC_SIZE), order='C')
        self.equality = self.a_free @ self.u + program.a_cone @ self.x == self.b
        constraints = [self.equality, cp.SOC(blocks[:, 0], blocks[:, 1:], axis=1)]

        self.upper = None
        if program.upper is not None:
            self.upper = cp.Parameter(program.n_free)
            constraints.append(self.u <= self.upper)

        self.problem = cp.Problem(cp.Minimize(self.c_free @ self.u), constraints)

    def load(self, program: ConicProgram) -> None:
        self.c_free.value = np.asarray(program.c_free, dtype=float)
        self.a_free.value = np.asarray(program.a_free, dtype=float)
        self.b.value = np.asarray(program.b, dtype=float)
        if self.upper is not None:
            self.upper.value = np.asarray(program.upper, dtype=float)


class CvxpyConicSolver(ConicSolver):
    """cvxpy front-end to an interior-point conic solver."""

    name = 'cvxpy'

    def __init__(self, solver: str = 'CLARABEL', tolerance: float = 1e-10,
                 max_iterations: int = 200):
        super().__init__(tolerance, max_iterations)
        self.solver = solver.upper()
        self._local = threading.local()

        self.logger.info("Initialized cvxpy conic backend", extra={'solver': self.solver})

    def _settings(self) -> dict:
        if self.solver == 'CLARABEL':
            return {
                'tol_gap_abs': self.tolerance,
                'tol_gap_rel': self.tolerance,
                'tol_feas': self.tolerance,
                'max_iter': self.max_iterations,
            }
        if self.solver == 'SCS':
            return {'eps_abs': self.tolerance, 'eps_rel': self.tolerance,
                    'max_iters': 100 * self.max_iterations}
        if self.solver == 'ECOS':
            return {'abstol': self.tolerance, 'reltol': self.tolerance,
                    'feastol': self.tolerance, 'max_iters': self.max_iterations}
        return {}

    def _compiled(self, program: ConicProgram) -> _Compiled:
        cache = getattr(self._local, 'problems', None)
        if cache is None:
            cache = self._local.problems = {}

        key = (program.key, program.upper is not None)
        if key not in cache:
            self.logger.debug("Compiling conic program", extra={'m': program.key})
            cache[key] = _Compiled(program)
        return cache[key]

    def solve(self, program: ConicProgram) -> ConicSolution:
        compiled = self._compiled(program)
        compiled.load(program)

        try:
            compiled.problem.solve(solver=self.solver, **self._settings())
        except cp.error.SolverError as e:
            self.logger.warning("Conic solve failed", extra={'solver': self.solver, 'error': str(e)})
            return ConicSolution(SolverStatus.FAILED, float('nan'), None, None, None, self.solver)

        status = STATUS_MAP.get(compiled.problem.status, SolverStatus.FAILED)
        if not status.solved:
            return ConicSolution(status, float('nan'), None, None, None, self.solver)

        u = np.asarray(compiled.u.value, dtype=float).reshape(-1)
        x = np.asarray(compiled.x.value, dtype=float).reshape(-1)
        y = None
        if compiled.equality.dual_value is not None:
            y = self.orient_dual(program, np.asarray(compiled.equality.dual_value, dtype=float))

        return ConicSolution(
            status=status,
            objective=float(compiled.problem.value),
            u=u,
            x=x,
            y=y,
            solver=self.solver,
            residuals=self.residuals(program, u, x, y),
        )
