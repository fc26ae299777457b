"""LHS feasibility programs over deterministic strategies and their dual inequalities.

Every decision is phrased as a segment program: the largest weight ``mu`` such
that ``T0 + mu T1`` is a correlator table some local hidden state ensemble
reproduces. With ``T0`` the white-noise table and ``T1 = T - T0`` this decides
whether ``T`` itself is LHS (``mu* >= 1``); with the family's endpoints it
gives the threshold ``alpha*`` directly.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from steerkit.config import current_config
from steerkit.exceptions import AmbiguousResultError, DomainError, NumericError, ResourceError
from steerkit.models import (
    AlphaStarResult,
    Assemblage,
    CorrelationTable,
    DeterministicStrategy,
    FeasibilityReport,
    FeasibilityStatus,
    LocalStateEnsemble,
    MeasurementSet,
    OneWayReport,
    SteeringInequality,
    TwoQubitState,
)
from steerkit.services.solvers import ConicProgram, ConicSolution, ConicSolver, get_solver
from steerkit.services.solvers.base import SOC_SIZE, SolverStatus
from steerkit.services.state_family import (
    correlation_table,
    make_state,
    swap_parties,
    table_from_assemblage,
)

logger = logging.getLogger(__name__)

# Segment programs for single tables may run past the target so that strictly
# feasible tables report mu* > 1.
MU_CAP = 2.0
CLAMP_MARGIN = 1e-6
BOUND_CHUNK = 1 << 15


def _check_strategy_count(m: int) -> None:
    max_bits = current_config().MAX_STRATEGY_BITS
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    if m > max_bits:
        raise ResourceError(f"m={m} exceeds the strategy enumeration guard of {max_bits}")


def _sign_block(m: int, start: int, stop: int) -> np.ndarray:
    """Sign rows for strategies start..stop-1 in binary-counting order (bit set -> -1)."""
    codes = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(m - 1, -1, -1, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


@lru_cache(maxsize=32)
def strategy_matrix(m: int) -> np.ndarray:
    """All 2^m strategies as a read-only (2^m, m) array of +-1."""
    _check_strategy_count(m)
    signs = _sign_block(m, 0, 1 << m)
    signs.setflags(write=False)
    return signs


def enumerate_strategies(m: int) -> list[DeterministicStrategy]:
    return [DeterministicStrategy(tuple(int(s) for s in row)) for row in strategy_matrix(m)]


def _ensemble_matrix(signs: np.ndarray) -> sp.csr_matrix:
    """Linear map from stacked (t, r) blocks to the table vector."""
    n_strategies, m = signs.shape
    lam = np.arange(n_strategies)
    rows, cols, vals = [], [], []

    for i in range(m):
        for j in range(3):
            rows.append(np.full(n_strategies, 3 * i + j))
            cols.append(SOC_SIZE * lam + 1 + j)
            vals.append(signs[:, i])
        rows.append(np.full(n_strategies, 3 * m + i))
        cols.append(SOC_SIZE * lam)
        vals.append(signs[:, i])
    for j in range(3):
        rows.append(np.full(n_strategies, 4 * m + j))
        cols.append(SOC_SIZE * lam + 1 + j)
        vals.append(np.ones(n_strategies))
    rows.append(np.full(n_strategies, 4 * m + 3))
    cols.append(SOC_SIZE * lam)
    vals.append(np.ones(n_strategies))

    shape = (4 * m + 4, SOC_SIZE * n_strategies)
    return sp.csr_matrix(
        (np.concatenate(vals).astype(float), (np.concatenate(rows), np.concatenate(cols))),
        shape=shape,
    )


@lru_cache(maxsize=32)
def _full_ensemble_matrix(m: int) -> sp.csr_matrix:
    return _ensemble_matrix(strategy_matrix(m))


@dataclass(frozen=True, eq=False)
class SteeringProgram:
    """A segment program together with the table it targets."""

    conic: ConicProgram
    table: CorrelationTable
    origin: CorrelationTable
    strategies: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.conic.n_blocks

    @property
    def n_equalities(self) -> int:
        return self.conic.n_rows


def segment_program(t0: np.ndarray, t1: np.ndarray, m: int,
                    strategies: np.ndarray | None = None,
                    upper: float | None = None) -> ConicProgram:
    """maximize mu subject to A x = t0 + mu t1, x in the product of cones."""
    if strategies is None:
        a_cone = _full_ensemble_matrix(m)
        key = ('lhs', m)
    else:
        a_cone = _ensemble_matrix(strategies)
        key = ('lhs', m, strategies.tobytes())

    expected = 4 * m + 4
    if t0.shape != (expected,) or t1.shape != (expected,):
        raise DomainError(f"Table vectors must have length {expected}")

    return ConicProgram(
        c_free=np.array([-1.0]),
        a_free=-np.asarray(t1, dtype=float).reshape(-1, 1),
        a_cone=a_cone,
        b=np.asarray(t0, dtype=float),
        n_blocks=a_cone.shape[1] // SOC_SIZE,
        key=key,
        upper=None if upper is None else np.array([upper]),
    )


def assemble_program(target: CorrelationTable | Assemblage,
                     strategies: Sequence[DeterministicStrategy] | None = None) -> SteeringProgram:
    """LHS feasibility program for a table (or the table implied by an assemblage)."""
    table = table_from_assemblage(target) if isinstance(target, Assemblage) else target
    m = table.m
    _check_strategy_count(m)

    signs = None
    if strategies is not None:
        signs = np.array([s.signs for s in strategies], dtype=np.int8)
        if signs.ndim != 2 or signs.shape[1] != m:
            raise DomainError(f"Strategies must have length m={m}")

    origin = CorrelationTable.white_noise(m)
    t0 = origin.vector()
    conic = segment_program(t0, table.vector() - t0, m, signs, upper=MU_CAP)
    return SteeringProgram(conic, table, origin, signs if signs is not None else strategy_matrix(m))


def _ensemble_from_solution(solution: ConicSolution, strategies: np.ndarray) -> LocalStateEnsemble:
    blocks = solution.x.reshape(-1, SOC_SIZE)
    return LocalStateEnsemble(np.array(strategies), blocks[:, 0].copy(), blocks[:, 1:].copy())


def _retarget(ensemble: LocalStateEnsemble, mu: float) -> LocalStateEnsemble:
    """Mix an ensemble for W + mu (T - W), mu >= 1, with the uniform ensemble of W to reach T."""
    n_strategies = ensemble.weights.shape[0]
    share = 1.0 / mu
    weights = share * ensemble.weights + (1.0 - share) / n_strategies
    return LocalStateEnsemble(ensemble.strategies, weights, share * ensemble.vectors)


def _require_solved(solution: ConicSolution, context: str) -> bool:
    """Whether the solution can be trusted; False means numerically ambiguous.

    Any solve whose primal or gap residual reaches INFEASIBLE_TOLERANCE is a
    numeric failure. Inaccurate solves are trusted only up to FEASIBLE_TOLERANCE.
    """
    if not solution.status.solved:
        raise NumericError(
            f"Conic solver returned {solution.status.value} for {context}",
            residuals={'status': solution.status.value, **solution.residuals},
        )

    config = current_config()
    residual = max(solution.residuals.get('primal', 0.0), solution.residuals.get('gap', 0.0))
    if not residual < config.INFEASIBLE_TOLERANCE:
        raise NumericError(
            f"Conic solver did not converge for {context} (residual {residual:.3g})",
            residuals={'status': solution.status.value, **solution.residuals},
        )
    if solution.status is SolverStatus.INACCURATE and residual > config.FEASIBLE_TOLERANCE:
        logger.warning(
            "Inaccurate solve",
            extra={'solver': solution.solver, 'residual': residual, 'status': solution.status.value},
        )
        return False
    return True


def solve_feasibility(program: SteeringProgram, solver: ConicSolver | None = None) -> FeasibilityReport:
    """Three-valued LHS verdict with an ensemble or a steering inequality as certificate."""
    config = current_config()
    solver = solver or get_solver()
    started = time.perf_counter()

    solution = solver.solve(program.conic)
    trusted = _require_solved(solution, 'LHS feasibility')

    mu = float(solution.u[0])
    deficit = 1.0 - mu
    residuals = {'deficit': deficit, **solution.residuals}

    status = FeasibilityStatus.AMBIGUOUS
    ensemble = None
    inequality = None

    if not trusted:
        pass
    elif deficit <= config.FEASIBLE_TOLERANCE:
        ensemble = _ensemble_from_solution(solution, program.strategies)
        if mu > 1.0:
            ensemble = _retarget(ensemble, mu)
        residuals['reconstruction'] = float(
            np.max(np.abs(ensemble.reproduce().vector() - program.table.vector()))
        )
        status = FeasibilityStatus.FEASIBLE
    elif deficit >= config.INFEASIBLE_TOLERANCE:
        try:
            inequality = extract_inequality(solution.y, program.table.m, at=program.table)
            residuals['violation'] = inequality.violation(program.table)
            status = FeasibilityStatus.INFEASIBLE
        except NumericError as e:
            logger.warning("Dual certificate rejected", extra={'error': str(e)})

    logger.debug(
        "Feasibility solved",
        extra={
            'm': program.table.m,
            'status': status.value,
            'residual': deficit,
            'duration_ms': round((time.perf_counter() - started) * 1000, 2),
        },
    )
    return FeasibilityReport(status, program.table, mu, ensemble, inequality, solution.y, residuals)


def table_path(meas: MeasurementSet, state0: TwoQubitState | None = None,
               state1: TwoQubitState | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(T0, T1) with table(alpha) = T0 + alpha T1 between two states."""
    state0 = state0 or make_state(0.0)
    state1 = state1 or make_state(1.0)
    t0 = correlation_table(state0, meas).vector()
    return t0, correlation_table(state1, meas).vector() - t0


def max_alpha(meas: MeasurementSet, method: str = 'direct', solver: ConicSolver | None = None,
              state0: TwoQubitState | None = None,
              state1: TwoQubitState | None = None) -> AlphaStarResult:
    """Largest alpha for which the measurement set's table stays LHS."""
    _check_strategy_count(meas.m)
    if method == 'bisection':
        return _max_alpha_bisection(meas, solver, state0, state1)
    if method != 'direct':
        raise DomainError(f"Unknown method {method!r}; expected 'direct' or 'bisection'")

    solver = solver or get_solver()
    t0, t1 = table_path(meas, state0, state1)
    solution = solver.solve(segment_program(t0, t1, meas.m))

    if solution.status.value == 'unbounded':
        logger.info("Threshold unbounded; set never demonstrates steering", extra={'m': meas.m})
        return AlphaStarResult(1.0, float('inf'), True, CorrelationTable.from_vector(t0 + t1, meas.m),
                               None, None, {'status': 'unbounded'})
    if not _require_solved(solution, 'alpha* maximisation'):
        raise AmbiguousResultError(
            f"alpha* for m={meas.m} is numerically ambiguous",
            residuals={'alpha': float(solution.u[0]), **solution.residuals},
        )

    raw = float(solution.u[0])
    clamped = raw >= 1.0 - CLAMP_MARGIN
    alpha_star = 1.0 if clamped else raw
    if clamped:
        logger.info("Threshold clamped at 1", extra={'m': meas.m, 'alpha': raw})

    return AlphaStarResult(
        alpha_star=alpha_star,
        raw_alpha=raw,
        clamped=clamped,
        table=CorrelationTable.from_vector(t0 + raw * t1, meas.m),
        ensemble=_ensemble_from_solution(solution, strategy_matrix(meas.m)),
        dual=solution.y,
        residuals=dict(solution.residuals),
    )


def _max_alpha_bisection(meas: MeasurementSet, solver: ConicSolver | None,
                         state0: TwoQubitState | None, state1: TwoQubitState | None,
                         width: float = 1e-6) -> AlphaStarResult:
    t0, t1 = table_path(meas, state0, state1)

    def verdict(alpha: float) -> FeasibilityReport:
        table = CorrelationTable.from_vector(t0 + alpha * t1, meas.m)
        return solve_feasibility(assemble_program(table), solver)

    top = verdict(1.0)
    if top.status is FeasibilityStatus.FEASIBLE:
        return AlphaStarResult(1.0, 1.0, True, top.table, top.ensemble, top.dual,
                               dict(top.residuals), method='bisection')

    lo, hi = 0.0, 1.0
    best = verdict(lo)
    if best.status is not FeasibilityStatus.FEASIBLE:
        raise NumericError("Segment start is not LHS; bisection bracket invalid",
                           residuals=dict(best.residuals))

    while hi - lo > width:
        mid = (lo + hi) / 2.0
        report = verdict(mid)
        if report.status is FeasibilityStatus.FEASIBLE:
            lo, best = mid, report
        else:
            hi = mid

    return AlphaStarResult(lo, lo, False, best.table, best.ensemble, best.dual,
                           dict(best.residuals), method='bisection')


def extract_inequality(source: FeasibilityReport | AlphaStarResult | np.ndarray,
                       m: int | None = None,
                       at: CorrelationTable | None = None) -> SteeringInequality:
    """Normalised steering inequality read off the equality multipliers.

    The multipliers y satisfy y . T <= 0 on every LHS table; the constant
    (normalisation) component is discarded and the bound recomputed exactly.
    """
    if isinstance(source, FeasibilityReport):
        if source.status is FeasibilityStatus.FEASIBLE:
            raise DomainError("A feasible report carries no steering inequality")
        dual, m = source.dual, source.table.m
        at = at if at is not None else source.table
    elif isinstance(source, AlphaStarResult):
        dual, m = source.dual, source.table.m
    else:
        dual = source

    if dual is None or m is None:
        raise DomainError("No dual certificate available")
    dual = np.asarray(dual, dtype=float)
    if dual.shape != (4 * m + 4,):
        raise DomainError(f"Dual vector has shape {dual.shape}, expected ({4 * m + 4},)")

    s = dual[:3 * m].reshape(m, 3)
    s_a = dual[3 * m:4 * m]
    s_b = dual[4 * m:4 * m + 3]
    scale = float(max(np.max(np.abs(s)), np.max(np.abs(s_a)), np.max(np.abs(s_b))))
    if scale <= 0.0:
        raise NumericError("Dual certificate has vanishing coefficients")

    s, s_a, s_b = s / scale, s_a / scale, s_b / scale
    inequality = SteeringInequality(s, s_a, s_b, lhs_bound(s, s_a, s_b))

    if at is not None:
        violation = inequality.violation(at)
        if violation <= 1e-7:
            raise NumericError("Extracted inequality is not violated by the queried table",
                               residuals={'violation': violation})
    return inequality


def _chunk_bound(args: tuple) -> float:
    m, start, stop, s, s_a, s_b = args
    signs = _sign_block(m, start, stop).astype(float)
    local = signs @ s + s_b
    return float(np.max(signs @ s_a + np.linalg.norm(local, axis=1)))


def lhs_bound(s: np.ndarray, s_a: np.ndarray, s_b: np.ndarray, threads: int | None = None) -> float:
    """Exact LHS maximum: max over strategies E of sA.E + |s^T E + sB|."""
    s = np.asarray(s, dtype=float)
    s_a = np.asarray(s_a, dtype=float).reshape(-1)
    s_b = np.asarray(s_b, dtype=float).reshape(3)
    m = s_a.shape[0]
    if s.shape != (m, 3):
        raise DomainError(f"Coefficient shapes disagree: s={s.shape}, sA={s_a.shape}")
    _check_strategy_count(m)

    total = 1 << m
    chunks = [(m, start, min(start + BOUND_CHUNK, total), s, s_a, s_b)
              for start in range(0, total, BOUND_CHUNK)]
    if len(chunks) == 1:
        return _chunk_bound(chunks[0])

    threads = threads or current_config().THREADS
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return max(pool.map(_chunk_bound, chunks))


def quantum_value(inequality: SteeringInequality, state: TwoQubitState, meas: MeasurementSet) -> float:
    """Left-hand side of the inequality on the state's correlator table."""
    if meas.m != inequality.m:
        raise DomainError(f"Inequality has m={inequality.m}, measurement set has m={meas.m}")
    return inequality.evaluate(correlation_table(state, meas))


def check_one_way(state: TwoQubitState | float, alice_set: MeasurementSet,
                  bob_sets: Sequence[MeasurementSet], solver: ConicSolver | None = None,
                  threads: int | None = None) -> OneWayReport:
    """A-to-B verdict for Alice's set and B-to-A verdicts for each of Bob's sets."""
    if not isinstance(state, TwoQubitState):
        state = make_state(state)
    forward = solve_feasibility(assemble_program(correlation_table(state, alice_set)), solver)

    swapped = swap_parties(state)

    def backward(bob_set: MeasurementSet) -> FeasibilityReport:
        return solve_feasibility(assemble_program(correlation_table(swapped, bob_set)), solver)

    threads = threads or current_config().THREADS
    with ThreadPoolExecutor(max_workers=threads) as pool:
        reverse = list(pool.map(backward, bob_sets))

    report = OneWayReport(
        alpha=state.alpha if state.alpha is not None else float('nan'),
        alice_to_bob=forward,
        bob_to_alice=reverse,
        details={'bob_sets': len(bob_sets), 'alice_m': alice_set.m},
    )
    logger.info(
        "One-way check complete",
        extra={'alpha': report.alpha, 'status': 'one-way' if report.one_way else 'not one-way'},
    )
    return report
