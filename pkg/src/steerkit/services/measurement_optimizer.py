"""Hill-climbing search for measurement sets with the smallest alpha*.

The family is invariant under joint rotations about z, so every candidate is
gauge-fixed with its first direction at azimuth 0 before it is evaluated.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable

import numpy as np

from steerkit.exceptions import DomainError, NumericError
from steerkit.models import CampaignRow, MeasurementSet, RestartTrace, SearchConfig, SearchResult
from steerkit.models.state import random_unit_vectors
from steerkit.serialization import campaign_to_dict, row_from_dict
from steerkit.services.results import ResultStore
from steerkit.services.solvers import ConicSolver
from steerkit.services.steering_feasibility import max_alpha
from steerkit.utils import spawn_seeds

logger = logging.getLogger(__name__)

# Best thresholds reported for m = 2 .. 14 (upper-bound targets, not proven optima).
PUBLISHED_ALPHA_STAR = {
    2: 0.6951, 3: 0.5661, 4: 0.5424, 5: 0.5302, 6: 0.5156, 7: 0.5120, 8: 0.5088,
    9: 0.5037, 10: 0.5030, 11: 0.5014, 12: 0.5005, 13: 0.4993, 14: 0.4983,
}
MAX_CAMPAIGN_M = 14
REFINEMENT_SLACK = 1e-6


def gauge_fix(meas: MeasurementSet) -> MeasurementSet:
    """Rotate all directions about z so the first one has azimuth 0."""
    first = meas.array[0]
    if np.hypot(first[0], first[1]) < 1e-15:
        return meas
    phi = np.arctan2(first[1], first[0])
    c, s = np.cos(phi), np.sin(phi)
    rotation = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    rotated = meas.array @ rotation.T
    rotated[0, 1] = 0.0
    return MeasurementSet.from_vectors(rotated, normalize=True)


def _perturb(direction: np.ndarray, step: float, rng: np.random.Generator, in_xz_plane: bool) -> np.ndarray:
    """Geodesic step of angle ``step`` along a random tangent direction."""
    if in_xz_plane:
        tangent = np.array([direction[2], 0.0, -direction[0]])
        if np.linalg.norm(tangent) < 1e-12:
            tangent = np.array([1.0, 0.0, 0.0])
        tangent *= rng.choice((-1.0, 1.0))
    else:
        tangent = rng.normal(size=3)
        tangent -= (tangent @ direction) * direction
    tangent /= np.linalg.norm(tangent)
    moved = np.cos(step) * direction + np.sin(step) * tangent
    return moved / np.linalg.norm(moved)


def _order_key(alpha: float, meas: MeasurementSet) -> tuple:
    return (alpha, tuple(np.round(meas.array, 12).ravel()))


class _Climber:
    """One restart of the hill climb."""

    def __init__(self, config: SearchConfig, solver: ConicSolver | None):
        self.config = config
        self.solver = solver
        self.calls = 0

    def evaluate(self, meas: MeasurementSet) -> float:
        self.calls += 1
        return max_alpha(meas, solver=self.solver).alpha_star

    def run(self, restart: int, seed: int,
            start: Callable[[np.random.Generator], MeasurementSet]) -> tuple[MeasurementSet | None, RestartTrace]:
        config = self.config
        rng = np.random.default_rng(seed)
        iterations = 0

        try:
            meas = gauge_fix(start(rng))
            current = self.evaluate(meas)
            step = config.initial_step
            sweeps = 0

            while step >= config.min_step:
                accepted = False
                for k in range(meas.m):
                    moved = _perturb(meas[k].array, step, rng, in_xz_plane=(k == 0))
                    candidate = gauge_fix(meas.replaced(k, moved))
                    iterations += 1
                    try:
                        value = self.evaluate(candidate)
                    except NumericError as e:
                        # an unreliable candidate is never accepted
                        logger.debug("Move rejected", extra={'restart': restart, 'error': str(e)})
                        continue
                    if value < current - config.accept_tolerance:
                        meas, current, accepted = candidate, value, True

                sweeps += 1
                if config.max_sweeps is not None and sweeps >= config.max_sweeps:
                    break
                if not accepted:
                    step *= config.decay

        except NumericError as e:
            logger.warning("Restart failed", extra={'restart': restart, 'seed': seed, 'error': str(e)})
            return None, RestartTrace(restart, seed, iterations, None, self.calls, True, str(e))

        logger.debug("Restart finished", extra={'restart': restart, 'alpha': current, 'm': meas.m})
        return meas, RestartTrace(restart, seed, iterations, current, self.calls)


def _search(config: SearchConfig, start: Callable[[np.random.Generator], MeasurementSet],
            solver: ConicSolver | None) -> SearchResult:
    seeds = spawn_seeds(config.seed, config.restarts)

    def work(restart: int):
        return _Climber(config, solver).run(restart, seeds[restart], start)

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        outcomes = list(pool.map(work, range(config.restarts)))

    traces = tuple(trace for _, trace in outcomes)
    solver_calls = sum(trace.solver_calls for trace in traces)
    finished = [(trace.alpha_star, meas) for meas, trace in outcomes if meas is not None]
    if not finished:
        raise NumericError("Every restart failed", residuals={'restarts': config.restarts})

    alpha, best = min(finished, key=lambda item: _order_key(*item))
    logger.info("Search finished", extra={'m': config.m, 'alpha': alpha, 'restart': len(finished)})
    return SearchResult(best, alpha, traces, solver_calls)


def hill_climb(config: SearchConfig, solver: ConicSolver | None = None) -> SearchResult:
    """Random-restart hill climb over Alice's m directions minimising alpha*."""
    def start(rng: np.random.Generator) -> MeasurementSet:
        return MeasurementSet.from_vectors(random_unit_vectors(config.m, rng))

    return _search(config, start, solver)


def seeded_refinement(base: MeasurementSet, extra: int, config: SearchConfig | None = None,
                      solver: ConicSolver | None = None) -> SearchResult:
    """Append ``extra`` random directions to ``base`` and re-climb all of them."""
    if extra < 0:
        raise DomainError(f"extra must be non-negative, got {extra}")
    m = base.m + extra
    config = config or SearchConfig.from_config(m)
    if config.m != m:
        config = replace(config, m=m)

    def start(rng: np.random.Generator) -> MeasurementSet:
        return base.extended(random_unit_vectors(extra, rng)) if extra else base

    result = _search(config, start, solver)

    baseline = max_alpha(base, solver=solver).alpha_star
    if result.alpha_star > baseline + REFINEMENT_SLACK:
        # repeating a direction adds no information, so the padded base keeps its threshold
        padded = base.extended([base[0]] * extra)
        logger.warning("Refinement worse than its base; keeping padded base",
                       extra={'m': m, 'alpha': result.alpha_star})
        return SearchResult(padded, baseline, result.traces, result.solver_calls + 1)
    return replace(result, solver_calls=result.solver_calls + 1)


def _rows_from_checkpoint(store: ResultStore | None, name: str) -> dict[int, CampaignRow]:
    if store is None:
        return {}
    saved = store.load_checkpoint(name)
    if not saved:
        return {}
    return {row.m: row for row in map(row_from_dict, saved['rows']) if not row.failed}


def table_one_campaign(m_max: int, budget: int, seed: int, store: ResultStore | None = None,
                       checkpoint: str | None = None, threads: int | None = None,
                       solver: ConicSolver | None = None) -> tuple[list[CampaignRow], dict[str, float]]:
    """Best alpha* for m = 2 .. m_max, chaining each m from the previous optimum.

    Returns the rows and per-row wall times. Completed rows found in the
    checkpoint are reused; failed rows are recorded and the campaign goes on.
    """
    if not 2 <= m_max <= MAX_CAMPAIGN_M:
        raise DomainError(f"m_max must lie in [2, {MAX_CAMPAIGN_M}], got {m_max}")
    if budget < 1:
        raise DomainError("budget must be at least 1 restart")

    resumed = _rows_from_checkpoint(store, checkpoint) if checkpoint else {}
    row_seeds = spawn_seeds(seed, m_max + 1)
    rows: list[CampaignRow] = []
    timings: dict[str, float] = {}
    previous: CampaignRow | None = None

    for m in range(2, m_max + 1):
        if m in resumed:
            row = resumed[m]
            logger.info("Row restored from checkpoint", extra={'m': m, 'alpha': row.alpha_star})
        else:
            started = time.perf_counter()
            row = _campaign_row(m, budget, row_seeds[m], previous, threads, solver)
            timings[str(m)] = round(time.perf_counter() - started, 3)

        rows.append(row)
        if not row.failed:
            previous = row
        if store is not None and checkpoint:
            store.save_checkpoint(checkpoint, campaign_to_dict(rows, seed, budget))

    return rows, timings


def _campaign_row(m: int, budget: int, seed: int, previous: CampaignRow | None,
                  threads: int | None, solver: ConicSolver | None) -> CampaignRow:
    config = SearchConfig.from_config(m, restarts=budget, seed=seed, threads=threads)
    published = PUBLISHED_ALPHA_STAR.get(m)

    try:
        best = hill_climb(config, solver)
        calls = best.solver_calls
        if previous is not None and previous.measurements is not None:
            # chain from the last good row, even across failed ones
            refined = seeded_refinement(previous.measurements, m - previous.m, config, solver)
            calls += refined.solver_calls
            if _order_key(refined.alpha_star, refined.best) < _order_key(best.alpha_star, best.best):
                best = refined
    except NumericError as e:
        logger.error("Campaign row failed", exc_info=True, extra={'m': m, 'error': str(e)})
        return CampaignRow(m, None, None, published_value=published, error=str(e))

    logger.info("Campaign row complete", extra={'m': m, 'alpha': best.alpha_star})
    return CampaignRow(m, best.alpha_star, best.best, calls, published)
