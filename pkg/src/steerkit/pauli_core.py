"""Qubit and two-qubit linear algebra.

Qubit operators are held as real Pauli coefficients (c0, c1, c2, c3) with
``Op = c0 I + sum_j c_j sigma_j``. Two-qubit operators are 4x4 complex
matrices in the basis ordering |i>_A |j>_B -> 2i + j.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from steerkit.exceptions import DomainError

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-8
UNIT_TOLERANCE = 1e-9
DEGENERATE_WEIGHT = 1e-14

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_BASIS = np.stack([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])


class Party(str, Enum):
    """The two sides of the bipartition."""

    A = 'A'
    B = 'B'

    @property
    def other(self) -> Party:
        return Party.B if self is Party.A else Party.A


class BlochVector(NamedTuple):
    """Real 3-vector parameterising a qubit state or a measurement direction."""

    r1: float
    r2: float
    r3: float

    @classmethod
    def from_array(cls, values) -> BlochVector:
        arr = np.asarray(values, dtype=float).reshape(3)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> BlochVector:
        return cls(
            float(np.sin(theta) * np.cos(phi)),
            float(np.sin(theta) * np.sin(phi)),
            float(np.cos(theta)),
        )

    @property
    def array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def is_unit(self, tolerance: float = UNIT_TOLERANCE) -> bool:
        return abs(self.norm - 1.0) <= tolerance

    def normalized(self) -> BlochVector:
        norm = self.norm
        if norm == 0.0:
            raise DomainError("Cannot normalise the zero vector")
        return BlochVector.from_array(self.array / norm)

    def dot(self, other) -> float:
        return float(np.dot(self.array, np.asarray(other, dtype=float)))


@dataclass(frozen=True, eq=False)
class QubitOperator:
    """Hermitian 2x2 operator stored as Pauli coefficients."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float).reshape(4)
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coefficients', coeffs)

    @classmethod
    def from_matrix(cls, matrix) -> QubitOperator:
        """Ingest a 2x2 matrix, symmetrising away rounding-level anti-Hermitian parts."""
        mat = _hermitian_part(np.asarray(matrix, dtype=complex), shape=(2, 2))
        coeffs = np.real(np.einsum('kij,ji->k', PAULI_BASIS, mat)) / 2.0
        return cls(coeffs)

    @property
    def matrix(self) -> np.ndarray:
        return np.einsum('k,kij->ij', self.coefficients, PAULI_BASIS)

    @property
    def trace(self) -> float:
        return 2.0 * float(self.coefficients[0])

    @property
    def bloch(self) -> np.ndarray:
        """Unnormalised Bloch components tr(Op sigma_j)."""
        return 2.0 * self.coefficients[1:]

    @property
    def min_eigenvalue(self) -> float:
        c = self.coefficients
        return float(c[0] - np.linalg.norm(c[1:]))

    def is_psd(self, tolerance: float = 1e-10) -> bool:
        return self.min_eigenvalue >= -tolerance

    def __add__(self, other: QubitOperator) -> QubitOperator:
        return QubitOperator(self.coefficients + other.coefficients)

    def __sub__(self, other: QubitOperator) -> QubitOperator:
        return QubitOperator(self.coefficients - other.coefficients)

    def __mul__(self, scalar: float) -> QubitOperator:
        return QubitOperator(self.coefficients * float(scalar))

    __rmul__ = __mul__

    def allclose(self, other: QubitOperator, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coefficients, other.coefficients, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        c = np.round(self.coefficients, 12)
        return f'<QubitOperator {c[0]}*I + {c[1]}*X + {c[2]}*Y + {c[3]}*Z>'


@dataclass(frozen=True, eq=False)
class TwoQubitOperator:
    """Hermitian 4x4 operator, basis ordering |i>_A |j>_B -> 2i + j."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _hermitian_part(np.asarray(self.matrix, dtype=complex), shape=(4, 4))
        mat.setflags(write=False)
        object.__setattr__(self, 'matrix', mat)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def __add__(self, other: TwoQubitOperator) -> TwoQubitOperator:
        return TwoQubitOperator(self.matrix + other.matrix)

    def __sub__(self, other: TwoQubitOperator) -> TwoQubitOperator:
        return TwoQubitOperator(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> TwoQubitOperator:
        return TwoQubitOperator(self.matrix * float(scalar))

    __rmul__ = __mul__

    def allclose(self, other: TwoQubitOperator, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f'<TwoQubitOperator trace={self.trace:.12g}>'


def _hermitian_part(mat: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    if mat.shape != shape:
        raise DomainError(f"Expected a {shape} matrix, got {mat.shape}")
    residue = float(np.max(np.abs(mat - mat.conj().T))) / 2.0
    if residue > HERMITIAN_TOLERANCE:
        raise DomainError(f"Matrix is not Hermitian (anti-Hermitian residue {residue:.3g})")
    return (mat + mat.conj().T) / 2.0


def _require_unit(direction: BlochVector) -> BlochVector:
    direction = BlochVector(*direction)
    if not direction.is_unit():
        raise DomainError(f"Measurement direction must be a unit vector, got norm {direction.norm:.12g}")
    return direction


def pauli_operator(r) -> QubitOperator:
    """The operator r . sigma."""
    r = np.asarray(r, dtype=float).reshape(3)
    return QubitOperator(np.concatenate([[0.0], r]))


def identity() -> QubitOperator:
    return QubitOperator([1.0, 0.0, 0.0, 0.0])


def bloch_to_operator(r: BlochVector, weight: float = 1.0) -> QubitOperator:
    """Return (weight / 2) (I + r . sigma)."""
    if weight < 0:
        raise DomainError(f"Weight must be non-negative, got {weight}")
    r = np.asarray(r, dtype=float).reshape(3)
    return QubitOperator(weight / 2.0 * np.concatenate([[1.0], r]))


class BlochDecomposition(NamedTuple):
    weight: float
    vector: BlochVector
    degenerate: bool


def operator_to_bloch(op: QubitOperator) -> BlochDecomposition:
    """Split an operator into its trace and normalised Bloch vector."""
    weight = op.trace
    if weight <= DEGENERATE_WEIGHT:
        return BlochDecomposition(weight, BlochVector(0.0, 0.0, 0.0), True)
    return BlochDecomposition(weight, BlochVector.from_array(op.bloch / weight), False)


def projector(direction: BlochVector, outcome: int) -> QubitOperator:
    """The projector (I + outcome x . sigma) / 2 onto outcome +-1 along x."""
    if outcome not in (1, -1):
        raise DomainError(f"Outcome must be +1 or -1, got {outcome}")
    x = _require_unit(direction)
    return bloch_to_operator(outcome * x.array, 1.0)


def tensor(a: QubitOperator, b: QubitOperator) -> TwoQubitOperator:
    return TwoQubitOperator(np.kron(a.matrix, b.matrix))


def partial_trace(op: TwoQubitOperator, traced_party: Party | str) -> QubitOperator:
    """Trace out one party; the result lives on the other."""
    blocks = op.matrix.reshape(2, 2, 2, 2)
    if Party(traced_party) is Party.A:
        reduced = np.einsum('ijik->jk', blocks)
    else:
        reduced = np.einsum('ijkj->ik', blocks)
    return QubitOperator.from_matrix(reduced)


def partial_transpose(op: TwoQubitOperator) -> TwoQubitOperator:
    """Transpose on party B's indices."""
    blocks = op.matrix.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1)
    return TwoQubitOperator(blocks.reshape(4, 4))


def swap(op: TwoQubitOperator) -> TwoQubitOperator:
    """Exchange the roles of A and B."""
    blocks = op.matrix.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2)
    return TwoQubitOperator(blocks.reshape(4, 4))


def min_eigenvalue(op) -> float:
    """Smallest eigenvalue of a Hermitian operator or matrix."""
    mat = op.matrix if isinstance(op, (TwoQubitOperator, QubitOperator)) else np.asarray(op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {mat.shape}")
    if not np.allclose(mat, mat.conj().T, rtol=0.0, atol=1e-12):
        raise DomainError("min_eigenvalue requires a Hermitian operator")
    return float(np.linalg.eigvalsh(mat)[0])


def expectation(state: TwoQubitOperator, obs_a: QubitOperator, obs_b: QubitOperator) -> float:
    """Return tr(state . obs_a x obs_b)."""
    value = np.trace(state.matrix @ np.kron(obs_a.matrix, obs_b.matrix))
    if abs(value.imag) > 1e-10:
        logger.warning("Non-negligible imaginary expectation", extra={'residual': float(value.imag)})
    return float(value.real)


def correlation_matrix(state: TwoQubitOperator) -> np.ndarray:
    """T_ij = tr(state sigma_i x sigma_j)."""
    paulis = PAULI_BASIS[1:]
    pairs = np.einsum('iab,jcd->ijacbd', paulis, paulis).reshape(3, 3, 4, 4)
    return np.real(np.einsum('ijkl,lk->ij', pairs, state.matrix))
