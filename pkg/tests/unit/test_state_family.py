# tests/unit/test_state_family.py
"""
Unit tests for the state family, its assemblages and correlator tables.
"""
import numpy as np
import pytest

from steerkit.exceptions import DomainError
from steerkit.models import MeasurementSet, TwoQubitState
from steerkit.pauli_core import Party
from steerkit.services.state_family import (
    assemblage_from_measurements,
    chsh_max,
    correlation_table,
    entanglement_threshold,
    is_ppt,
    make_state,
    no_signaling_check,
    pair_expectations,
    ppt_min_eigenvalue,
    reduced_state,
    swap_parties,
    table_from_assemblage,
)

EXACT_THRESHOLD = (-6.0 + 5.0 * np.sqrt(6.0)) / 19.0


@pytest.mark.parametrize('alpha', [0.0, 0.25, 0.5, 0.75, 1.0])
def test_make_state_is_a_state(alpha):
    """Test that every member of the family is a density operator."""
    state = make_state(alpha)
    assert state.op.trace == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(state.matrix)[0] >= -1e-12
    assert state.alpha == alpha


@pytest.mark.parametrize('alpha', [-0.1, 1.1])
def test_make_state_rejects_alpha_outside_unit_interval(alpha):
    """Test that alpha outside [0, 1] is rejected."""
    with pytest.raises(DomainError):
        make_state(alpha)


def test_product_state_is_diagonal(product_state):
    """Test the noise term at alpha = 0."""
    assert np.allclose(np.diag(product_state.matrix).real, [0.2, 0.5, 0.0, 0.3])
    assert np.allclose(product_state.matrix - np.diag(np.diag(product_state.matrix)), 0.0)


def test_state_rejects_non_unit_trace():
    """Test that states must have unit trace."""
    with pytest.raises(DomainError):
        TwoQubitState.from_matrix(np.eye(4) / 2.0)


def test_entanglement_threshold_matches_closed_form():
    """Test the PPT threshold against its closed form."""
    threshold = entanglement_threshold()
    assert threshold == pytest.approx(EXACT_THRESHOLD, abs=1e-5)


def test_ppt_verdicts_around_threshold():
    """Test PPT verdicts on both sides of the threshold."""
    assert is_ppt(make_state(0.3))
    assert not is_ppt(make_state(0.5))
    assert ppt_min_eigenvalue(make_state(1.0)) == pytest.approx(-0.5)


def test_marginals_of_family():
    """
    GIVEN state(alpha)
    WHEN the marginals are taken
    THEN Alice's Bloch vector is 0.4 (1 - alpha) z and Bob's is -0.6 (1 - alpha) z
    """
    alpha = 0.3
    state = make_state(alpha)
    assert np.allclose(reduced_state(state, Party.A).bloch, [0.0, 0.0, 0.4 * (1 - alpha)])
    assert np.allclose(reduced_state(state, Party.B).bloch, [0.0, 0.0, -0.6 * (1 - alpha)])


def test_pair_expectations_at_half(half_state):
    """Test single and joint expectations along z at alpha = 1/2."""
    ea, eb, eab = pair_expectations(half_state, [0, 0, 1], [0, 0, 1])
    assert ea == pytest.approx(0.2, abs=1e-12)
    assert eb == pytest.approx(-0.3, abs=1e-12)
    assert eab == pytest.approx(-0.5, abs=1e-12)


def test_correlation_table_shapes(half_state, xz_set):
    """Test the shape and values of a correlator table."""
    table = correlation_table(half_state, xz_set)
    assert table.m == 2
    assert table.ab.shape == (2, 3)
    assert np.allclose(table.ab, [[0.0, 0.0, -0.5], [-0.5, 0.0, 0.0]])
    assert np.allclose(table.a, [0.2, 0.0])
    assert np.allclose(table.b, [0.0, 0.0, -0.3])


def test_assemblage_is_no_signalling(rng):
    """Test that assemblages of states never signal."""
    for alpha in (0.0, 0.4, 0.8, 1.0):
        meas = MeasurementSet.random(5, rng)
        for party in (Party.A, Party.B):
            asm = assemblage_from_measurements(make_state(alpha), meas, party)
            assert no_signaling_check(asm) < 1e-10
            assert asm.violations(1e-10) == []


def test_table_from_assemblage_matches_direct_table(rng):
    """Test that the table read off an assemblage matches the direct one."""
    meas = MeasurementSet.random(4, rng)
    state = make_state(0.7)
    asm = assemblage_from_measurements(state, meas, Party.A)
    assert table_from_assemblage(asm).allclose(correlation_table(state, meas), atol=1e-12)


def test_swapped_state_gives_bob_side_assemblage(rng):
    """The B-steering assemblage equals the A-steering assemblage of the swapped state."""
    meas = MeasurementSet.random(3, rng)
    state = make_state(0.6)
    direct = assemblage_from_measurements(state, meas, Party.B)
    swapped = assemblage_from_measurements(swap_parties(state), meas, Party.A)
    assert np.allclose(direct.coefficients, swapped.coefficients, atol=1e-12)


def test_chsh_max_scales_with_alpha():
    """Test the maximal CHSH value across the family."""
    assert chsh_max(make_state(0.5)) == pytest.approx(np.sqrt(2.0))
    assert chsh_max(make_state(1.0)) == pytest.approx(2.0 * np.sqrt(2.0))
    assert chsh_max(make_state(0.0)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize('alpha', [0.0, 0.2, 0.33, 0.5, 0.7, 1.0])
def test_family_is_affine_in_alpha(alpha, half_state, product_state):
    """Test that state(alpha) = 2 alpha state(1/2) + (1 - 2 alpha) state(0)."""
    mixed = 2.0 * alpha * half_state.matrix + (1.0 - 2.0 * alpha) * product_state.matrix
    assert np.allclose(make_state(alpha).matrix, mixed, rtol=0.0, atol=1e-12)
