"""Hidden-variable types for the Bob-to-Alice local hidden state model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from steerkit.exceptions import DomainError
from steerkit.models.assemblage import CorrelationTable
from steerkit.models.state import MeasurementSet
from steerkit.pauli_core import BlochVector

DEFAULT_FLIP_PROBABILITY = 0.2


@dataclass(frozen=True)
class HiddenVariable:
    lambda0: int
    direction: BlochVector

    def __post_init__(self):
        if self.lambda0 not in (1, -1):
            raise DomainError(f"lambda0 must be +-1, got {self.lambda0}")
        direction = BlochVector(*self.direction)
        if not direction.is_unit(1e-12):
            raise DomainError(f"Hidden direction must be a unit vector (norm {direction.norm:.15g})")
        object.__setattr__(self, 'direction', direction)


@dataclass(frozen=True)
class ModelParameters:
    """Probability f that the sent state and Bob's answer are flipped."""

    flip_probability: float = DEFAULT_FLIP_PROBABILITY

    def __post_init__(self):
        if not 0.0 <= self.flip_probability <= 0.5:
            raise DomainError(f"Flip probability must lie in [0, 1/2], got {self.flip_probability}")

    @property
    def damping(self) -> float:
        """Factor 1 - 2f applied to both marginals."""
        return 1.0 - 2.0 * self.flip_probability


@dataclass(frozen=True, eq=False)
class ProtocolStatistics:
    """Empirical <a>, <b>, <ab> for every (x_i, y_j) pair with standard errors.

    Arrays are indexed ``[i, j]``.
    """

    x_set: MeasurementSet
    y_set: MeasurementSet
    ea: np.ndarray
    eb: np.ndarray
    eab: np.ndarray
    se_a: np.ndarray
    se_b: np.ndarray
    se_ab: np.ndarray
    n: int
    seed: int

    def to_table(self) -> CorrelationTable:
        """Correlator table, available when Bob's directions are the x, y, z axes."""
        if not np.allclose(self.y_set.array, np.eye(3), atol=1e-12):
            raise DomainError("A correlator table needs Bob's directions to be the Pauli axes")
        return CorrelationTable(self.eab, self.ea[:, 0], self.eb[0, :])


@dataclass(frozen=True)
class PairCheck:
    """Cross-check of one (x, y) pair against the quantum prediction."""

    x: BlochVector
    y: BlochVector
    empirical: tuple[float, float, float]
    standard_errors: tuple[float, float, float]
    analytic: tuple[float, float, float]
    quadrature: tuple[float, float, float]
    quantum: tuple[float, float, float]
    sigma_limit: float = 5.0

    @property
    def deviations(self) -> tuple[float, ...]:
        """|empirical - quantum| in units of standard error."""
        return tuple(abs(e - q) / s for e, q, s in zip(self.empirical, self.quantum, self.standard_errors))

    @property
    def quadrature_error(self) -> float:
        return max(abs(q - a) for q, a in zip(self.quadrature, self.analytic))

    @property
    def analytic_error(self) -> float:
        return max(abs(a - q) for a, q in zip(self.analytic, self.quantum))

    @property
    def passed(self) -> bool:
        return bool(max(self.deviations) <= self.sigma_limit
                and self.quadrature_error <= 1e-7
                and self.analytic_error <= 1e-10)


@dataclass(frozen=True)
class ModelVerification:
    checks: tuple[PairCheck, ...]
    n: int
    seed: int
    params: ModelParameters = field(default_factory=ModelParameters)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[PairCheck]:
        return [check for check in self.checks if not check.passed]
