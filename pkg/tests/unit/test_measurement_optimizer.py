# tests/unit/test_measurement_optimizer.py
"""
Unit tests for the measurement search and the threshold-table campaign.
"""
import itertools

import numpy as np
import pytest

from steerkit.exceptions import DomainError, NumericError
from steerkit.models import FeasibilityStatus, MeasurementSet, SearchConfig, SearchResult
from steerkit.services import measurement_optimizer
from steerkit.services.measurement_optimizer import (
    PUBLISHED_ALPHA_STAR,
    gauge_fix,
    hill_climb,
    seeded_refinement,
    table_one_campaign,
)
from steerkit.services.results import ResultStore
from steerkit.services.state_family import correlation_table, make_state
from steerkit.services.steering_feasibility import (
    assemble_program,
    check_one_way,
    extract_inequality,
    max_alpha,
    quantum_value,
    solve_feasibility,
)
from steerkit.utils import derive_generator


def small_config(m, **overrides):
    values = dict(restarts=2, initial_step=0.4, decay=0.5, min_step=0.05, seed=11, threads=1, max_sweeps=8)
    values.update(overrides)
    return SearchConfig(m=m, **values)


def test_gauge_fix_puts_first_direction_in_xz_plane(rng):
    """Test that gauge fixing preserves overlaps and heights."""
    meas = MeasurementSet.random(3, rng)
    fixed = gauge_fix(meas)
    assert fixed.array[0, 1] == 0.0
    assert fixed.array[0, 0] >= 0.0
    assert np.allclose(fixed.array @ fixed.array.T, meas.array @ meas.array.T, atol=1e-12)
    assert np.allclose(fixed.array[:, 2], meas.array[:, 2])


def test_gauge_fix_keeps_threshold(rng):
    """Joint rotations about z leave the family, hence alpha*, unchanged."""
    meas = MeasurementSet.random(2, rng)
    assert max_alpha(gauge_fix(meas)).alpha_star == pytest.approx(max_alpha(meas).alpha_star, abs=1e-6)


def test_gauge_fix_leaves_polar_direction_alone():
    """Test that a first direction on the z axis needs no rotation."""
    meas = MeasurementSet.from_vectors([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    assert gauge_fix(meas) is meas


def test_search_config_validation():
    """Test that invalid search parameters are rejected."""
    with pytest.raises(DomainError):
        SearchConfig(m=0)
    with pytest.raises(DomainError):
        SearchConfig(m=2, decay=1.0)
    with pytest.raises(DomainError):
        SearchConfig(m=2, restarts=0)


def test_from_config_uses_active_defaults():
    """Test that unset search parameters come from the active configuration."""
    config = SearchConfig.from_config(3, restarts=None, seed=4)
    assert config.restarts == 4
    assert config.threads == 2
    assert config.seed == 4


def test_single_measurement_search_is_clamped():
    """Test that one measurement never gets below alpha = 1."""
    result = hill_climb(small_config(1))
    assert result.alpha_star == 1.0
    assert result.m == 1
    assert len(result.traces) == 2


def test_hill_climb_reports_best_restart():
    """
    GIVEN two random restarts for m = 2
    WHEN the climb finishes
    THEN the lowest restart is reported, gauge-fixed
    """
    config = small_config(2)
    result = hill_climb(config)
    assert result.alpha_star < 1.0
    assert result.alpha_star == min(t.alpha_star for t in result.traces)
    assert result.solver_calls == sum(t.solver_calls for t in result.traces)
    assert result.best.array[0, 1] == 0.0


def test_hill_climb_is_deterministic_across_thread_counts():
    """Test that the thread count does not change the result."""
    single = hill_climb(small_config(2, threads=1))
    pooled = hill_climb(small_config(2, threads=2))
    assert single.alpha_star == pooled.alpha_star
    assert np.array_equal(single.best.array, pooled.best.array)


def test_seeded_refinement_without_extra_directions(xz_set):
    """Test that refining without new directions never gets worse."""
    baseline = max_alpha(xz_set).alpha_star
    result = seeded_refinement(xz_set, 0, small_config(2, restarts=1))
    assert result.m == 2
    assert result.alpha_star <= baseline + 1e-6


def test_seeded_refinement_adds_directions(xz_set):
    """Test that refinement appends directions without getting worse."""
    baseline = max_alpha(xz_set).alpha_star
    result = seeded_refinement(xz_set, 1, small_config(2, restarts=1))
    assert result.m == 3
    assert result.alpha_star <= baseline + 1e-6


def test_seeded_refinement_rejects_negative_extra(xz_set):
    """Test that a negative number of new directions is rejected."""
    with pytest.raises(DomainError):
        seeded_refinement(xz_set, -1)


@pytest.mark.parametrize('m_max', [1, 15])
def test_campaign_rejects_out_of_range(m_max):
    """Test that the campaign only accepts m_max in [2, 14]."""
    with pytest.raises(DomainError):
        table_one_campaign(m_max, budget=1, seed=0)


def test_campaign_rejects_empty_budget():
    """Test that the campaign needs at least one restart."""
    with pytest.raises(DomainError):
        table_one_campaign(3, budget=0, seed=0)


def test_campaign_checkpoint_and_resume(tmp_path):
    """
    GIVEN a two-row campaign written to a checkpoint
    WHEN it is run again with the same checkpoint name
    THEN the rows are restored rather than recomputed
    """
    store = ResultStore(tmp_path)
    rows, timings = table_one_campaign(3, budget=1, seed=5, store=store, checkpoint='small')

    assert [row.m for row in rows] == [2, 3]
    assert all(not row.failed for row in rows)
    assert rows[0].published_value == PUBLISHED_ALPHA_STAR[2]
    assert rows[1].alpha_star <= rows[0].alpha_star + 1e-6
    assert set(timings) == {'2', '3'}
    assert (tmp_path / 'checkpoints' / 'small.json').exists()

    resumed, resumed_timings = table_one_campaign(3, budget=1, seed=5, store=store, checkpoint='small')
    assert resumed_timings == {}
    assert [row.alpha_star for row in resumed] == pytest.approx([row.alpha_star for row in rows], abs=1e-11)


def test_campaign_chains_across_a_failed_row(monkeypatch, xz_set):
    """
    GIVEN a campaign whose m = 3 search fails
    WHEN the m = 4 row is computed
    THEN it is refined from the m = 2 optimum and stays below it
    """
    base_alpha = max_alpha(xz_set).alpha_star
    refinements = []

    def fake_climb(config, solver=None):
        if config.m == 2:
            return SearchResult(xz_set, base_alpha, (), 1)
        if config.m == 3:
            raise NumericError("solver failed")
        return SearchResult(MeasurementSet.from_vectors(np.eye(3)[[2, 2, 2, 2]]), 1.0, (), 1)

    def fake_refinement(base, extra, config=None, solver=None):
        refinements.append((base.m, extra))
        return SearchResult(base.extended([base[0]] * extra), base_alpha, (), 1)

    monkeypatch.setattr(measurement_optimizer, 'hill_climb', fake_climb)
    monkeypatch.setattr(measurement_optimizer, 'seeded_refinement', fake_refinement)

    rows, _ = table_one_campaign(4, budget=1, seed=0)

    assert [row.failed for row in rows] == [False, True, False]
    assert refinements == [(2, 2)]
    assert rows[2].alpha_star <= rows[0].alpha_star
    assert rows[2].measurements.m == 4


def test_unreliable_moves_are_rejected(monkeypatch):
    """
    GIVEN a solver that fails on every candidate after the starting set
    WHEN a restart climbs
    THEN the restart still finishes with its starting threshold
    """
    calls = []

    def flaky_max_alpha(meas, solver=None):
        calls.append(meas)
        if len(calls) > 1:
            raise NumericError("solver did not converge")
        return max_alpha(meas, solver=solver)

    monkeypatch.setattr(measurement_optimizer, 'max_alpha', flaky_max_alpha)
    result = hill_climb(small_config(2, restarts=1, max_sweeps=2))

    assert not result.traces[0].failed
    assert result.alpha_star == pytest.approx(max_alpha(calls[0]).alpha_star, abs=1e-9)
    assert result.traces[0].iterations == 4


@pytest.mark.slow
@pytest.mark.parametrize('m', [2, 3])
def test_search_reaches_reported_thresholds(m):
    """Test that the climb reaches the reported thresholds for m = 2 and 3."""
    result = hill_climb(SearchConfig.from_config(m, restarts=20, seed=2024, min_step=1e-4))
    assert result.alpha_star <= PUBLISHED_ALPHA_STAR[m] + 1e-3


@pytest.fixture(scope='module')
def campaign():
    """Threshold table for m = 2 .. 6 with 20 restarts per row."""
    rows, _ = table_one_campaign(6, budget=20, seed=2024)
    return {row.m: row for row in rows}


@pytest.mark.slow
@pytest.mark.parametrize('m, tolerance', [(4, 1e-3), (5, 2e-3), (6, 2e-3)])
def test_campaign_reaches_reported_thresholds(campaign, m, tolerance):
    """Test that chained rows for larger m come within tolerance of the reported values."""
    row = campaign[m]
    assert not row.failed
    assert row.alpha_star <= PUBLISHED_ALPHA_STAR[m] + tolerance


@pytest.mark.slow
def test_optimized_six_directions_give_one_way_steering(campaign):
    """
    GIVEN the optimized m = 6 set from the campaign
    WHEN alpha = 0.52 is checked from Alice and 50 random Bob sets are checked at alpha = 1/2
    THEN Alice steers Bob while no Bob set steers Alice
    """
    alice = campaign[6].measurements
    forward = solve_feasibility(assemble_program(correlation_table(make_state(0.52), alice)))
    assert forward.status is FeasibilityStatus.INFEASIBLE

    bob_sets = []
    for k in range(50):
        rng = derive_generator(2024, k)
        bob_sets.append(MeasurementSet.random(int(rng.integers(1, 7)), rng))
    report = check_one_way(make_state(0.5), alice, bob_sets)

    assert len(report.bob_to_alice) == 50
    assert all(r.status is FeasibilityStatus.FEASIBLE for r in report.bob_to_alice)


@pytest.mark.slow
def test_inequality_from_three_direction_optimum(campaign):
    """
    GIVEN the optimized m = 3 set and the state at alpha = 0.60
    WHEN a steering inequality is read off the infeasible program
    THEN the state violates it and its bound agrees with a Bloch-sphere grid search
    """
    meas = campaign[3].measurements
    state = make_state(0.60)
    report = solve_feasibility(assemble_program(correlation_table(state, meas)))
    assert report.status is FeasibilityStatus.INFEASIBLE

    inequality = extract_inequality(report)
    assert quantum_value(inequality, state, meas) - inequality.bound >= 1e-4

    index = np.arange(10_000) + 0.5
    z = 1.0 - 2.0 * index / 10_000
    phi = np.pi * (1.0 + 5.0 ** 0.5) * index
    grid = np.column_stack([np.sqrt(1.0 - z ** 2) * np.cos(phi), np.sqrt(1.0 - z ** 2) * np.sin(phi), z])
    best = max(
        np.dot(inequality.s_a, e) + np.max(grid @ (np.array(e) @ inequality.s + inequality.s_b))
        for e in itertools.product((1.0, -1.0), repeat=3)
    )
    assert best <= inequality.bound + 1e-12
    assert inequality.bound - best <= 1e-3 * max(1.0, inequality.bound)
