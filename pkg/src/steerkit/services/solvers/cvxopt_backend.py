"""Conic backend calling cvxopt's primal-dual interior-point method directly.

cvxopt forms dense KKT blocks, so this backend is meant for cross-checks at
moderate m (it logs a warning beyond 2^10 strategies).
"""
import numpy as np
import scipy.sparse as sp
from cvxopt import matrix, solvers, spmatrix

from steerkit.services.solvers.base import (
    SOC_SIZE,
    ConicProgram,
    ConicSolution,
    ConicSolver,
    SolverStatus,
)

LARGE_PROGRAM_BLOCKS = 1024


def _to_spmatrix(mat: sp.spmatrix) -> spmatrix:
    coo = sp.coo_matrix(mat)
    return spmatrix(coo.data.tolist(), coo.row.tolist(), coo.col.tolist(), size=coo.shape)


class CvxoptConicSolver(ConicSolver):
    """cvxopt ``conelp`` backend."""

    name = 'cvxopt'

    def __init__(self, tolerance: float = 1e-10, max_iterations: int = 200):
        super().__init__(tolerance, max_iterations)
        self.logger.info("Initialized cvxopt conic backend", extra={'solver': self.name})

    def _options(self) -> dict:
        # cvxopt stalls when asked for gaps near machine precision
        tol = max(self.tolerance, 1e-9)
        return {
            'abstol': tol,
            'reltol': tol,
            'feastol': tol,
            'maxiters': self.max_iterations,
            'show_progress': False,
        }

    def solve(self, program: ConicProgram) -> ConicSolution:
        if program.n_blocks > LARGE_PROGRAM_BLOCKS:
            self.logger.warning("Large program for the cvxopt backend", extra={'m': program.key})

        n_free, n_cone = program.n_free, program.n_cone
        n = n_free + n_cone

        # Rows of G: optional upper bounds on u, then -x in the product of SOCs.
        cone_rows = sp.hstack([sp.csr_matrix((n_cone, n_free)), -sp.identity(n_cone)])
        h = np.zeros(n_cone)
        n_linear = 0
        if program.upper is not None:
            bound_rows = sp.hstack([sp.identity(n_free), sp.csr_matrix((n_free, n_cone))])
            cone_rows = sp.vstack([bound_rows, cone_rows])
            h = np.concatenate([np.asarray(program.upper, dtype=float), h])
            n_linear = n_free

        a_full = sp.hstack([sp.csr_matrix(program.a_free), program.a_cone])
        c = np.concatenate([program.c_free, np.zeros(n_cone)])

        try:
            result = solvers.conelp(
                matrix(c),
                _to_spmatrix(cone_rows),
                matrix(h),
                {'l': n_linear, 'q': [SOC_SIZE] * program.n_blocks, 's': []},
                _to_spmatrix(a_full),
                matrix(np.asarray(program.b, dtype=float)),
                options=self._options(),
            )
        except (ValueError, ArithmeticError) as e:
            self.logger.warning("Conic solve failed", extra={'solver': self.name, 'error': str(e)})
            return ConicSolution(SolverStatus.FAILED, float('nan'), None, None, None, self.name)

        status = {
            'optimal': SolverStatus.OPTIMAL,
            'primal infeasible': SolverStatus.INFEASIBLE,
            'dual infeasible': SolverStatus.UNBOUNDED,
        }.get(result['status'], SolverStatus.INACCURATE)

        if status is SolverStatus.INACCURATE and result['x'] is None:
            status = SolverStatus.FAILED
        if not status.solved:
            return ConicSolution(status, float('nan'), None, None, None, self.name)

        v = np.array(result['x']).reshape(n)
        u, x = v[:n_free], v[n_free:]
        # cvxopt's multipliers satisfy G'z + A'y + c = 0
        y = -np.array(result['y']).reshape(-1)

        return ConicSolution(
            status=status,
            objective=float(program.c_free @ u),
            u=u,
            x=x,
            y=y,
            solver=self.name,
            residuals=self.residuals(program, u, x, y),
        )
