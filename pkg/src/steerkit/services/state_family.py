"""The one-way steerable state family, its assemblages and correlator tables."""
import logging

import numpy as np

from steerkit.exceptions import DomainError, NumericError
from steerkit.models import Assemblage, CorrelationTable, MeasurementSet, TwoQubitState
from steerkit.pauli_core import (
    Party,
    QubitOperator,
    TwoQubitOperator,
    correlation_matrix,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    projector,
    swap,
)

logger = logging.getLogger(__name__)

SINGLET_VECTOR = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
SINGLET = np.outer(SINGLET_VECTOR, SINGLET_VECTOR).astype(complex)

KET0 = np.array([[1.0, 0.0], [0.0, 0.0]])
KET1 = np.array([[0.0, 0.0], [0.0, 1.0]])
HALF_IDENTITY = np.eye(2) / 2.0

# (2 |0><0| x I/2 + 3 I/2 x |1><1|) / 5
NOISE = (2.0 * np.kron(KET0, HALF_IDENTITY) + 3.0 * np.kron(HALF_IDENTITY, KET1)).astype(complex) / 5.0

THRESHOLD_WIDTH = 1e-8


def make_state(alpha: float) -> TwoQubitState:
    """alpha Psi_- + (1 - alpha) times the asymmetric product noise."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return TwoQubitState(TwoQubitOperator(alpha * SINGLET + (1.0 - alpha) * NOISE), alpha)


def swap_parties(state: TwoQubitState) -> TwoQubitState:
    """Exchange Alice and Bob, so B-to-A questions become A-to-B ones."""
    return TwoQubitState(swap(state.op), state.provenance)


def ppt_min_eigenvalue(state: TwoQubitState) -> float:
    return min_eigenvalue(partial_transpose(state.op))


def is_ppt(state: TwoQubitState, tolerance: float = 1e-12) -> bool:
    return ppt_min_eigenvalue(state) >= -tolerance


def entanglement_threshold(width: float = THRESHOLD_WIDTH) -> float:
    """Zero crossing in alpha of the minimal partial-transpose eigenvalue."""
    def pt_eig(alpha: float) -> float:
        return ppt_min_eigenvalue(make_state(alpha))

    lo, hi = 0.0, 1.0
    if pt_eig(lo) < -1e-12 or pt_eig(hi) >= 0.0:
        raise NumericError(
            "PPT eigenvalue does not change sign on [0, 1]",
            residuals={'at_0': pt_eig(lo), 'at_1': pt_eig(hi)},
        )

    while hi - lo > width:
        mid = (lo + hi) / 2.0
        if pt_eig(mid) >= 0.0:
            lo = mid
        else:
            hi = mid

    threshold = (lo + hi) / 2.0
    logger.debug("Entanglement threshold located", extra={'alpha': threshold})
    return threshold


def reduced_state(state: TwoQubitState, party: Party | str) -> QubitOperator:
    """The marginal state held by ``party``."""
    return partial_trace(state.op, Party(party).other)


def assemblage_from_measurements(state: TwoQubitState, meas: MeasurementSet,
                                 steering_party: Party | str = Party.A) -> Assemblage:
    """Conditional states prepared on the trusted side by the steering party's measurements."""
    steering_party = Party(steering_party)
    identity = np.eye(2)
    members = []

    for direction in meas:
        pair = []
        for outcome in (1, -1):
            m = projector(direction, outcome).matrix
            lift = np.kron(m, identity) if steering_party is Party.A else np.kron(identity, m)
            conditioned = TwoQubitOperator(lift @ state.matrix @ lift)
            pair.append(partial_trace(conditioned, steering_party))
        members.append(tuple(pair))

    return Assemblage.from_members(members, steering_party)


def correlation_table(state: TwoQubitState, meas: MeasurementSet) -> CorrelationTable:
    """Alice measures the set, Bob performs Pauli tomography."""
    x = meas.array
    t = correlation_matrix(state.op)
    alice = reduced_state(state, Party.A).bloch
    bob = reduced_state(state, Party.B).bloch
    return CorrelationTable(x @ t, x @ alice, bob)


def table_from_assemblage(asm: Assemblage) -> CorrelationTable:
    """Correlators and marginals implied by an assemblage."""
    plus = asm.coefficients[:, 0, :]
    minus = asm.coefficients[:, 1, :]
    diff = 2.0 * (plus - minus)
    total = 2.0 * (plus + minus)
    return CorrelationTable(diff[:, 1:], diff[:, 0], total[:, 1:].mean(axis=0))


def no_signaling_check(asm: Assemblage) -> float:
    """Largest elementwise difference between the outcome sums of any two measurements."""
    reduced = np.array([asm.reduced(i).matrix for i in range(asm.m)])
    return float(np.max(np.abs(reduced[:, None] - reduced[None, :])))


def chsh_max(state: TwoQubitState) -> float:
    """Maximal CHSH value over projective measurements."""
    singular = np.linalg.svd(correlation_matrix(state.op), compute_uv=False)
    return float(2.0 * np.sqrt(singular[0] ** 2 + singular[1] ** 2))


def pair_expectations(state: TwoQubitState, x, y) -> tuple[float, float, float]:
    """(<a>, <b>, <ab>) by direct trace when Alice measures x and Bob measures y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    alice = reduced_state(state, Party.A).bloch
    bob = reduced_state(state, Party.B).bloch
    return float(x @ alice), float(y @ bob), float(x @ correlation_matrix(state.op) @ y)
