"""Two-qubit states and measurement sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from steerkit.exceptions import DomainError
from steerkit.pauli_core import BlochVector, TwoQubitOperator, min_eigenvalue

STATE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A normalised two-qubit density operator with its provenance."""

    op: TwoQubitOperator
    provenance: float | str = 'custom'

    def __post_init__(self):
        trace = self.op.trace
        if abs(trace - 1.0) > STATE_TOLERANCE:
            raise DomainError(f"State must have unit trace, got {trace:.12g}")
        lowest = min_eigenvalue(self.op)
        if lowest < -STATE_TOLERANCE:
            raise DomainError(f"State must be positive semidefinite, min eigenvalue {lowest:.3g}")

    @classmethod
    def from_matrix(cls, matrix) -> TwoQubitState:
        return cls(TwoQubitOperator(matrix), 'custom')

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def alpha(self) -> float | None:
        return self.provenance if isinstance(self.provenance, float) else None

    def __repr__(self) -> str:
        return f'<TwoQubitState {self.provenance}>'


@dataclass(frozen=True)
class MeasurementSet:
    """Ordered list of projective measurement directions."""

    directions: tuple[BlochVector, ...]

    def __post_init__(self):
        directions = tuple(BlochVector(*d) for d in self.directions)
        if not directions:
            raise DomainError("A measurement set needs at least one direction")
        for index, direction in enumerate(directions):
            if not direction.is_unit():
                raise DomainError(
                    f"Direction {index} is not a unit vector (norm {direction.norm:.12g})"
                )
        object.__setattr__(self, 'directions', directions)

    @classmethod
    def from_vectors(cls, vectors: Iterable, normalize: bool = False) -> MeasurementSet:
        directions = [BlochVector.from_array(v) for v in vectors]
        if normalize:
            directions = [d.normalized() for d in directions]
        return cls(tuple(directions))

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> MeasurementSet:
        """m directions drawn uniformly on the sphere."""
        return cls.from_vectors(random_unit_vectors(m, rng))

    @property
    def m(self) -> int:
        return len(self.directions)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.directions, dtype=float).reshape(-1, 3)

    def __len__(self) -> int:
        return len(self.directions)

    def __iter__(self) -> Iterator[BlochVector]:
        return iter(self.directions)

    def __getitem__(self, index: int) -> BlochVector:
        return self.directions[index]

    def extended(self, more: Iterable) -> MeasurementSet:
        return MeasurementSet(self.directions + tuple(BlochVector(*d) for d in more))

    def replaced(self, index: int, direction: BlochVector) -> MeasurementSet:
        directions = list(self.directions)
        directions[index] = direction
        return MeasurementSet(tuple(directions))


def random_unit_vectors(m: int, rng: np.random.Generator) -> np.ndarray:
    vectors = rng.normal(size=(m, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
