"""Local hidden state model for Bob steering Alice at alpha = 1/2.

The source draws lambda0 = -1 with probability f and a direction lambda with
density cos^2(theta/2) / (2 pi), sends Alice the pure state
(I + lambda0 lambda . sigma) / 2 and tells Bob to answer
b = -lambda0 sgn(y . lambda), with sgn(0) = +1.

Three independent evaluations are provided: closed form, a spherical
quadrature oracle and a seeded simulation of the protocol.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from steerkit.config import current_config
from steerkit.exceptions import DomainError, NumericError
from steerkit.models import (
    Assemblage,
    HiddenVariable,
    MeasurementSet,
    ModelParameters,
    ModelVerification,
    PairCheck,
    ProtocolStatistics,
)
from steerkit.models.assemblage import OUTCOMES
from steerkit.pauli_core import BlochVector, Party
from steerkit.services.state_family import make_state, pair_expectations
from steerkit.utils import derive_generator, log_duration

logger = logging.getLogger(__name__)

UNIT_CHECK = 1e-9


def _unit(vector, name: str) -> np.ndarray:
    arr = np.asarray(vector, dtype=float).reshape(3)
    if abs(np.linalg.norm(arr) - 1.0) > UNIT_CHECK:
        raise DomainError(f"{name} must be a unit vector (norm {np.linalg.norm(arr):.12g})")
    return arr


def _sign(values: np.ndarray) -> np.ndarray:
    return np.where(values >= 0.0, 1, -1)


def hidden_variable_density(theta):
    """omega(theta) = cos^2(theta/2) / (2 pi) on the sphere measure sin(theta) dtheta dphi."""
    return np.cos(np.asarray(theta) / 2.0) ** 2 / (2.0 * np.pi)


def sample_hidden_variables(rng: np.random.Generator, size: int,
                            params: ModelParameters | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised draw of ``size`` hidden variables as (lambda0, directions)."""
    params = params or ModelParameters()
    w = rng.random(size)
    phi = rng.random(size) * (2.0 * np.pi)
    flips = rng.random(size) < params.flip_probability

    # inverse of F(u) = (1 + u)^2 / 4
    cos_theta = 2.0 * np.sqrt(w) - 1.0
    sin_theta = np.sqrt(np.clip(1.0 - cos_theta ** 2, 0.0, None))
    directions = np.column_stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta])
    lambda0 = np.where(flips, -1, 1).astype(np.int8)
    return lambda0, directions


def sample_hidden_variable(rng: np.random.Generator,
                           params: ModelParameters | None = None) -> HiddenVariable:
    lambda0, directions = sample_hidden_variables(rng, 1, params)
    # renormalise away rounding so the unit check at 1e-12 holds
    direction = directions[0] / np.linalg.norm(directions[0])
    return HiddenVariable(int(lambda0[0]), BlochVector.from_array(direction))


def bob_announcement(hv: HiddenVariable, y) -> int:
    y = _unit(y, 'y')
    return int(-hv.lambda0 * _sign(np.asarray(y @ hv.direction.array)))


def alice_outcome_probability(hv: HiddenVariable, x, a: int) -> float:
    """Born rule on the sent state (I + lambda0 lambda . sigma) / 2."""
    if a not in OUTCOMES:
        raise DomainError(f"Outcome must be +1 or -1, got {a}")
    x = _unit(x, 'x')
    return (1.0 + a * hv.lambda0 * float(x @ hv.direction.array)) / 2.0


def analytic_expectations(x, y, params: ModelParameters | None = None) -> tuple[float, float, float]:
    """Closed-form (<a>, <b>, <ab>) of the model."""
    params = params or ModelParameters()
    x, y = _unit(x, 'x'), _unit(y, 'y')
    damping = params.damping
    return damping * x[2] / 3.0, -damping * y[2] / 2.0, -float(x @ y) / 2.0


def _frame(y: np.ndarray) -> np.ndarray:
    """Orthonormal rows (e1, e2, y)."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(y[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(y, helper)
    e1 /= np.linalg.norm(e1)
    return np.vstack([e1, np.cross(y, e1), y])


def _sphere_rule(y: np.ndarray, nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points, weights and sgn(y . lambda) of a product rule split at the great circle y . lambda = 0.

    Gauss-Legendre in u = cos(theta') on [-1, 0] and [0, 1] times a
    trapezoid rule in phi', both taken in the frame whose third axis is y.
    """
    base, base_weights = leggauss(nodes)
    u = np.concatenate([(base - 1.0) / 2.0, (base + 1.0) / 2.0])
    u_weights = np.concatenate([base_weights, base_weights]) / 2.0

    n_phi = 2 * nodes
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    phi_weight = 2.0 * np.pi / n_phi

    uu, pp = np.meshgrid(u, phi, indexing='ij')
    ss = np.sqrt(1.0 - uu ** 2)
    local = np.stack([ss * np.cos(pp), ss * np.sin(pp), uu], axis=-1).reshape(-1, 3)
    points = local @ _frame(y)
    weights = np.repeat(u_weights * phi_weight, n_phi)
    signs = _sign(uu.reshape(-1))
    return points, weights, signs


def _integrate(x: np.ndarray, y: np.ndarray, params: ModelParameters, nodes: int) -> np.ndarray:
    points, weights, signs = _sphere_rule(y, nodes)
    density = weights * (1.0 + points[:, 2]) / (4.0 * np.pi)
    x_dot = points @ x
    damping = params.damping
    return np.array([
        damping * np.sum(density * x_dot),
        -damping * np.sum(density * signs),
        -np.sum(density * x_dot * signs),
    ])


def quadrature_expectations(x, y, params: ModelParameters | None = None,
                            nodes: int | None = None) -> tuple[float, float, float]:
    """(<a>, <b>, <ab>) from the model's sphere integrals, checked against a doubled rule."""
    config = current_config()
    params = params or ModelParameters()
    nodes = nodes or config.QUADRATURE_NODES
    x, y = _unit(x, 'x'), _unit(y, 'y')

    coarse = _integrate(x, y, params, nodes)
    fine = _integrate(x, y, params, 2 * nodes)
    error = float(np.max(np.abs(fine - coarse)))
    if error > config.QUADRATURE_TOLERANCE:
        raise NumericError("Quadrature failed its error estimate",
                           residuals={'error_estimate': error, 'nodes': nodes})
    return float(fine[0]), float(fine[1]), float(fine[2])


def reproduced_assemblage(y_set: MeasurementSet, params: ModelParameters | None = None,
                          nodes: int | None = None) -> Assemblage:
    """Alice's conditional states produced by the model when Bob announces b for y."""
    params = params or ModelParameters()
    nodes = nodes or current_config().QUADRATURE_NODES
    f = params.flip_probability
    members = []

    for y in y_set:
        y = y.array
        points, weights, signs = _sphere_rule(y, nodes)
        density = weights * (1.0 + points[:, 2]) / (4.0 * np.pi)
        pair = []
        for b in OUTCOMES:
            t, r = 0.0, np.zeros(3)
            for lambda0, prob in ((1, 1.0 - f), (-1, f)):
                selected = density * prob * (-lambda0 * signs == b)
                t += np.sum(selected)
                r += lambda0 * (selected @ points)
            pair.append(np.concatenate([[t], r]) / 2.0)
        members.append(pair)

    return Assemblage(np.array(members), Party.B)


def extend_below_half(alpha: float) -> tuple[float, float]:
    """Weights (w_model, w_noise) with state(alpha) = w_model state(1/2) + w_noise state(0)."""
    if not 0.0 <= alpha <= 0.5:
        raise DomainError(f"alpha must lie in [0, 1/2] for the model extension, got {alpha}")
    return 2.0 * alpha, 1.0 - 2.0 * alpha


def _model_outcomes(rng: np.random.Generator, size: int, x: np.ndarray, y: np.ndarray,
                    params: ModelParameters) -> tuple[np.ndarray, np.ndarray]:
    lambda0, directions = sample_hidden_variables(rng, size, params)
    p_plus = (1.0 + lambda0 * (directions @ x)) / 2.0
    a = np.where(rng.random(size) < p_plus, 1, -1)
    b = -lambda0 * _sign(directions @ y)
    return a, b


def _product_outcomes(rng: np.random.Generator, size: int, x: np.ndarray,
                      y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outcomes on (2 |0><0| x I/2 + 3 I/2 x |1><1|) / 5."""
    alice_pure = rng.random(size) < 0.4
    draw_a = rng.random(size)
    draw_b = rng.random(size)
    p_a = np.where(alice_pure, (1.0 + x[2]) / 2.0, 0.5)
    p_b = np.where(alice_pure, 0.5, (1.0 - y[2]) / 2.0)
    return np.where(draw_a < p_a, 1, -1), np.where(draw_b < p_b, 1, -1)


def _simulate_pair(x: np.ndarray, y: np.ndarray, n: int, seed: int, key: tuple[int, int],
                   params: ModelParameters, w_model: float | None, block: int) -> np.ndarray:
    """Sums of a, b and ab over n samples, drawn in independently seeded blocks."""
    sums = np.zeros(3)
    for index, start in enumerate(range(0, n, block)):
        size = min(block, n - start)
        rng = derive_generator(seed, *key, index)
        if w_model is None:
            a, b = _model_outcomes(rng, size, x, y, params)
        else:
            use_model = rng.random(size) < w_model
            model_a, model_b = _model_outcomes(rng, size, x, y, params)
            noise_a, noise_b = _product_outcomes(rng, size, x, y)
            a = np.where(use_model, model_a, noise_a)
            b = np.where(use_model, model_b, noise_b)
        sums += (a.sum(), b.sum(), (a * b).sum())
    return sums


def _standard_error(mean: np.ndarray, n: int) -> np.ndarray:
    # floor at 1/n so a unanimous sample still reports a finite error bar
    return np.sqrt(np.maximum(1.0 - mean ** 2, 1.0 / n) / n)


def _run(x_set: MeasurementSet, y_set: MeasurementSet, n: int, seed: int,
         params: ModelParameters, w_model: float | None, threads: int | None,
         diagonal: bool = False) -> ProtocolStatistics:
    """Simulate every (i, j) pair, or only (k, k) pairs when ``diagonal``; unsimulated entries are NaN."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    config = current_config()
    threads = threads or config.THREADS
    if diagonal:
        pairs = [(k, k) for k in range(min(x_set.m, y_set.m))]
    else:
        pairs = [(i, j) for i in range(x_set.m) for j in range(y_set.m)]

    def work(pair: tuple[int, int]) -> np.ndarray:
        i, j = pair
        return _simulate_pair(x_set[i].array, y_set[j].array, n, seed, pair, params,
                              w_model, config.MONTE_CARLO_BLOCK)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(work, pairs))

    sums = np.full((x_set.m, y_set.m, 3), np.nan)
    for (i, j), result in zip(pairs, results):
        sums[i, j] = result

    means = sums / n
    errors = _standard_error(means, n)
    return ProtocolStatistics(
        x_set=x_set, y_set=y_set,
        ea=means[..., 0], eb=means[..., 1], eab=means[..., 2],
        se_a=errors[..., 0], se_b=errors[..., 1], se_ab=errors[..., 2],
        n=n, seed=seed,
    )


@log_duration('Monte Carlo protocol')
def monte_carlo_protocol(x_set: MeasurementSet, y_set: MeasurementSet, n: int, seed: int,
                         params: ModelParameters | None = None,
                         threads: int | None = None) -> ProtocolStatistics:
    """Simulate the joint statistics of the model for every (x_i, y_j)."""
    params = params or ModelParameters()
    logger.info("Simulating protocol", extra={'samples': n, 'seed': seed})
    return _run(x_set, y_set, n, seed, params, None, threads)


def mixed_protocol(x_set: MeasurementSet, y_set: MeasurementSet, alpha: float, n: int, seed: int,
                   params: ModelParameters | None = None,
                   threads: int | None = None) -> ProtocolStatistics:
    """Local simulation of state(alpha), alpha <= 1/2: the model with probability 2 alpha, else state(0)."""
    params = params or ModelParameters()
    w_model, _ = extend_below_half(alpha)
    logger.info("Simulating mixed protocol", extra={'samples': n, 'seed': seed, 'alpha': alpha})
    return _run(x_set, y_set, n, seed, params, w_model, threads)


def chsh_from_protocol(x0, x1, y0, y1, n: int, seed: int,
                       params: ModelParameters | None = None) -> tuple[float, float]:
    """CHSH combination E00 + E01 + E10 - E11 of simulated statistics with its standard error."""
    stats = monte_carlo_protocol(MeasurementSet.from_vectors([x0, x1]),
                                 MeasurementSet.from_vectors([y0, y1]), n, seed, params)
    signs = np.array([[1.0, 1.0], [1.0, -1.0]])
    value = float(np.sum(signs * stats.eab))
    return value, float(np.sqrt(np.sum(stats.se_ab ** 2)))


def verify_model(pairs: Sequence[tuple[BlochVector, BlochVector]] | Iterable, n: int, seed: int,
                 params: ModelParameters | None = None,
                 threads: int | None = None) -> ModelVerification:
    """Simulation, quadrature and closed form against the direct trace of state(1/2)."""
    params = params or ModelParameters()
    pairs = [(BlochVector(*x), BlochVector(*y)) for x, y in pairs]
    if not pairs:
        raise DomainError("No measurement pairs to verify")

    x_set = MeasurementSet(tuple(x for x, _ in pairs))
    y_set = MeasurementSet(tuple(y for _, y in pairs))
    logger.info("Verifying model", extra={'samples': n, 'seed': seed})
    stats = _run(x_set, y_set, n, seed, params, None, threads, diagonal=True)
    state = make_state(0.5)

    checks = []
    for k, (x, y) in enumerate(pairs):
        check = PairCheck(
            x=x, y=y,
            empirical=(float(stats.ea[k, k]), float(stats.eb[k, k]), float(stats.eab[k, k])),
            standard_errors=(float(stats.se_a[k, k]), float(stats.se_b[k, k]), float(stats.se_ab[k, k])),
            analytic=analytic_expectations(x, y, params),
            quadrature=quadrature_expectations(x, y, params),
            quantum=pair_expectations(state, x, y),
        )
        if not check.passed:
            logger.warning("Model check failed", extra={'pair': k, 'error': str(check.deviations)})
        checks.append(check)

    return ModelVerification(tuple(checks), n, seed, params)
