# tests/unit/test_config.py
"""
Unit tests for configuration, logging and small utilities.
"""
import json
import logging

import numpy as np
import pytest

from steerkit.config import (
    DevelopmentConfig,
    ProductionConfig,
    TestingConfig,
    current_config,
    get_config,
)
from steerkit.exceptions import DomainError, NumericError, VerificationError
from steerkit.logging_config import DevelopmentFormatter, JSONFormatter
from steerkit.utils import derive_generator, exits_with_code, log_duration, spawn_seeds


def make_record(**extra):
    record = logging.LogRecord('steerkit.test', logging.INFO, __file__, 1, 'solved %s', ('ok',), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_get_config_by_name():
    """Test that configuration classes are looked up by name."""
    assert get_config('testing') is TestingConfig
    assert get_config('production') is ProductionConfig
    assert get_config('no-such-env') is DevelopmentConfig


def test_testing_config_is_active():
    """Test that the session runs under the testing configuration."""
    config = current_config()
    assert issubclass(config, TestingConfig)
    assert config.THREADS == 2
    assert config.FEASIBLE_TOLERANCE < config.INFEASIBLE_TOLERANCE


def test_production_config_validation(monkeypatch):
    """Test that production refuses inconsistent tolerance bands."""
    ProductionConfig.init_toolkit()

    monkeypatch.setattr(ProductionConfig, 'FEASIBLE_TOLERANCE', 1e-5)
    with pytest.raises(ValueError, match='FEASIBLE_TOLERANCE'):
        ProductionConfig.init_toolkit()


def test_production_config_rejects_unknown_backend(monkeypatch):
    """Test that production start-up refuses an unknown solver backend."""
    monkeypatch.setattr(ProductionConfig, 'SOLVER_BACKEND', 'gurobi')
    with pytest.raises(ValueError, match='SOLVER_BACKEND'):
        ProductionConfig.init_toolkit()


def test_json_formatter_includes_extras():
    """Test that structured fields are carried into the JSON line."""
    line = JSONFormatter().format(make_record(m=3, alpha=0.5, seed=42))
    data = json.loads(line)
    assert data['message'] == 'solved ok'
    assert data['level'] == 'INFO'
    assert data['m'] == 3
    assert data['alpha'] == 0.5
    assert data['seed'] == 42
    assert 'restart' not in data


def test_development_formatter_lists_extras():
    """Test that the text formatter appends structured extras."""
    text = DevelopmentFormatter().format(make_record(m=4, status='feasible'))
    assert 'solved ok' in text
    assert 'm=4' in text
    assert 'status=feasible' in text


def test_exception_exit_codes():
    """Test the exit code carried by each error type."""
    assert VerificationError.exit_code == 1
    assert DomainError.exit_code == 2
    assert NumericError.exit_code == 3
    assert isinstance(DomainError('x'), ValueError)
    assert NumericError('x', residuals={'gap': 1.0}).residuals == {'gap': 1.0}


def test_exits_with_code_maps_exceptions(capsys):
    """Test that toolkit errors become the matching exit status."""
    @exits_with_code
    def command():
        raise NumericError('did not converge', residuals={'gap': 0.1})

    with pytest.raises(SystemExit) as excinfo:
        command()
    assert excinfo.value.code == 3
    err = capsys.readouterr().err
    assert 'Error: did not converge' in err
    assert 'gap' in err


def test_log_duration_keeps_return_value(caplog, monkeypatch):
    """Test that timing a call does not change its result."""
    monkeypatch.setattr(logging.getLogger('steerkit'), 'propagate', True)

    @log_duration('sum')
    def add(a, b):
        return a + b

    with caplog.at_level(logging.DEBUG, logger='steerkit.utils.decorators'):
        assert add(2, 3) == 5
    assert any(hasattr(r, 'duration_ms') for r in caplog.records)


def test_derived_streams_are_reproducible():
    """Test that the same address always yields the same stream."""
    first = derive_generator(5, 1, 2).random(4)
    again = derive_generator(5, 1, 2).random(4)
    other = derive_generator(5, 2, 1).random(4)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_spawn_seeds():
    """Test that spawned seeds are reproducible and distinct."""
    seeds = spawn_seeds(9, 5)
    assert len(seeds) == 5
    assert len(set(seeds)) == 5
    assert seeds == spawn_seeds(9, 5)
    assert spawn_seeds(9, 3) == seeds[:3]
