"""Certificates produced by the feasibility engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from steerkit.exceptions import DomainError
from steerkit.models.assemblage import CorrelationTable
from steerkit.pauli_core import QubitOperator


@dataclass(frozen=True)
class DeterministicStrategy:
    """Fixed outcome E(i) in {-1, +1} for every measurement i."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise DomainError(f"Strategy signs must be +-1, got {self.signs}")

    @property
    def m(self) -> int:
        return len(self.signs)


@dataclass(frozen=True, eq=False)
class LocalStateEnsemble:
    """Unnormalised local states rho_lambda = (t I + r . sigma) / 2, one per strategy."""

    strategies: np.ndarray
    weights: np.ndarray
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return self.strategies.shape[1]

    def state(self, index: int) -> QubitOperator:
        return QubitOperator(np.concatenate([[self.weights[index]], self.vectors[index]]) / 2.0)

    def reproduce(self) -> CorrelationTable:
        """The correlator table this ensemble generates."""
        signs = self.strategies.astype(float)
        return CorrelationTable(signs.T @ self.vectors, signs.T @ self.weights, self.vectors.sum(axis=0))

    def cone_violation(self) -> float:
        """Largest amount by which some |r| exceeds t (0 when every rho_lambda is PSD)."""
        excess = np.linalg.norm(self.vectors, axis=1) - self.weights
        return float(max(np.max(excess), 0.0))

    def normalisation_error(self) -> float:
        return float(abs(self.weights.sum() - 1.0))

    def support(self, threshold: float = 1e-9) -> LocalStateEnsemble:
        """Drop strategies carrying negligible weight."""
        keep = self.weights > threshold
        return LocalStateEnsemble(self.strategies[keep], self.weights[keep], self.vectors[keep])


@dataclass(frozen=True, eq=False)
class SteeringInequality:
    """sum s_ij <ab>_ij + sum sA_i <a>_i + sum sB_j <b>_j <= bound for every LHS model."""

    s: np.ndarray
    s_a: np.ndarray
    s_b: np.ndarray
    bound: float

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        s_a = np.array(self.s_a, dtype=float).reshape(-1)
        s_b = np.array(self.s_b, dtype=float).reshape(3)
        if s.shape != (s_a.shape[0], 3):
            raise DomainError(f"Inconsistent inequality shapes s={s.shape}, sA={s_a.shape}")
        object.__setattr__(self, 's', s)
        object.__setattr__(self, 's_a', s_a)
        object.__setattr__(self, 's_b', s_b)
        object.__setattr__(self, 'bound', float(self.bound))

    @property
    def m(self) -> int:
        return self.s_a.shape[0]

    def max_coefficient(self) -> float:
        return float(max(np.max(np.abs(self.s)), np.max(np.abs(self.s_a)), np.max(np.abs(self.s_b))))

    def evaluate(self, table: CorrelationTable) -> float:
        if table.m != self.m:
            raise DomainError(f"Inequality has m={self.m}, table has m={table.m}")
        return float(np.sum(self.s * table.ab) + self.s_a @ table.a + self.s_b @ table.b)

    def violation(self, table: CorrelationTable) -> float:
        """Positive when the table breaks the inequality."""
        return self.evaluate(table) - self.bound

    def scaled(self, factor: float) -> SteeringInequality:
        return SteeringInequality(self.s * factor, self.s_a * factor, self.s_b * factor,
                                  self.bound * factor)


class FeasibilityStatus(str, Enum):
    FEASIBLE = 'feasible'
    INFEASIBLE = 'infeasible'
    AMBIGUOUS = 'numerically-ambiguous'


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """Verdict of the LHS feasibility program for one target table."""

    status: FeasibilityStatus
    table: CorrelationTable
    mu: float
    ensemble: LocalStateEnsemble | None = None
    inequality: SteeringInequality | None = None
    dual: np.ndarray | None = None
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def certificate(self) -> LocalStateEnsemble | SteeringInequality | None:
        if self.status is FeasibilityStatus.FEASIBLE:
            return self.ensemble
        if self.status is FeasibilityStatus.INFEASIBLE:
            return self.inequality
        return None

    @property
    def steerable(self) -> bool:
        return self.status is FeasibilityStatus.INFEASIBLE


@dataclass(frozen=True, eq=False)
class AlphaStarResult:
    """Largest family parameter whose table stays LHS-reproducible."""

    alpha_star: float
    raw_alpha: float
    clamped: bool
    table: CorrelationTable
    ensemble: LocalStateEnsemble | None
    dual: np.ndarray | None
    residuals: dict[str, float] = field(default_factory=dict)
    method: str = 'direct'


@dataclass(frozen=True, eq=False)
class OneWayReport:
    """Steering verdicts in both directions for one value of alpha."""

    alpha: float
    alice_to_bob: FeasibilityReport
    bob_to_alice: list[FeasibilityReport]
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def one_way(self) -> bool:
        return self.alice_to_bob.steerable and all(
            r.status is FeasibilityStatus.FEASIBLE for r in self.bob_to_alice
        )
