"""Assemblages and the correlator tables derived from them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from steerkit.exceptions import DomainError
from steerkit.pauli_core import Party, QubitOperator

OUTCOMES = (1, -1)


def outcome_index(outcome: int) -> int:
    if outcome not in OUTCOMES:
        raise DomainError(f"Outcome must be +1 or -1, got {outcome}")
    return OUTCOMES.index(outcome)


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Unnormalised conditional states rho_{a|i} on the trusted side.

    ``coefficients[i, k]`` are the Pauli coefficients of the member for
    measurement ``i`` and outcome ``OUTCOMES[k]``.
    """

    coefficients: np.ndarray
    steering_party: Party = Party.A

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 3 or coeffs.shape[1:] != (2, 4) or coeffs.shape[0] < 1:
            raise DomainError(f"Assemblage coefficients must have shape (m, 2, 4), got {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coefficients', coeffs)
        object.__setattr__(self, 'steering_party', Party(self.steering_party))

    @classmethod
    def from_members(cls, members: list[tuple[QubitOperator, QubitOperator]],
                     steering_party: Party = Party.A) -> Assemblage:
        """Build from ``[(rho_{+|i}, rho_{-|i}), ...]``."""
        coeffs = np.array([[plus.coefficients, minus.coefficients] for plus, minus in members])
        return cls(coeffs, steering_party)

    @property
    def m(self) -> int:
        return self.coefficients.shape[0]

    def member(self, i: int, outcome: int) -> QubitOperator:
        return QubitOperator(self.coefficients[i, outcome_index(outcome)])

    def reduced(self, i: int = 0) -> QubitOperator:
        """Sum over outcomes for measurement i."""
        return QubitOperator(self.coefficients[i].sum(axis=0))

    def violations(self, tolerance: float = 1e-10) -> list[str]:
        """Human-readable list of broken assemblage invariants."""
        from steerkit.services.state_family import no_signaling_check

        problems = []
        for i in range(self.m):
            for outcome in OUTCOMES:
                lowest = self.member(i, outcome).min_eigenvalue
                if lowest < -tolerance:
                    problems.append(f"member ({i}, {outcome:+d}) not PSD (min eigenvalue {lowest:.3g})")
            total = self.reduced(i).trace
            if abs(total - 1.0) > tolerance:
                problems.append(f"measurement {i} outcome traces sum to {total:.12g}")
        deviation = no_signaling_check(self)
        if deviation > tolerance:
            problems.append(f"signalling deviation {deviation:.3g}")
        return problems


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Full correlators ab[i][j], marginals a[i] (steering side) and b[j] (trusted side)."""

    ab: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        ab = np.array(self.ab, dtype=float)
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(3)
        if ab.ndim != 2 or ab.shape[1] != 3 or ab.shape[0] != a.shape[0]:
            raise DomainError(f"Inconsistent table shapes ab={ab.shape}, a={a.shape}")
        for arr in (ab, a, b):
            arr.setflags(write=False)
        object.__setattr__(self, 'ab', ab)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    def vector(self) -> np.ndarray:
        """Flattened right-hand side (ab row-major, a, b, normalisation)."""
        return np.concatenate([self.ab.ravel(), self.a, self.b, [1.0]])

    @classmethod
    def from_vector(cls, vector: np.ndarray, m: int) -> CorrelationTable:
        vector = np.asarray(vector, dtype=float)
        return cls(vector[:3 * m].reshape(m, 3), vector[3 * m:4 * m], vector[4 * m:4 * m + 3])

    @classmethod
    def white_noise(cls, m: int) -> CorrelationTable:
        """Table of the maximally mixed state for any m measurements."""
        return cls(np.zeros((m, 3)), np.zeros(m), np.zeros(3))

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.ab)), np.max(np.abs(self.a)), np.max(np.abs(self.b))))

    def allclose(self, other: CorrelationTable, atol: float) -> bool:
        return bool(np.allclose(self.vector(), other.vector(), rtol=0.0, atol=atol))
