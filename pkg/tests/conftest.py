# tests/conftest.py
"""Pytest configuration and fixtures for the test suite."""
import json

import numpy as np
import pytest

from steerkit import init_toolkit
from steerkit.models import MeasurementSet
from steerkit.services.solvers import reset_solver
from steerkit.services.state_family import make_state


@pytest.fixture(scope='session', autouse=True)
def toolkit():
    """Activate the testing configuration once for the whole run."""
    config_class = init_toolkit('testing')
    yield config_class
    reset_solver()


@pytest.fixture(scope='function')
def rng():
    """Seeded generator; every test gets the same fresh stream."""
    return np.random.default_rng(20240601)


@pytest.fixture(scope='module')
def half_state():
    """The family at alpha = 1/2, where the Bob-to-Alice model applies."""
    return make_state(0.5)


@pytest.fixture(scope='module')
def singlet():
    return make_state(1.0)


@pytest.fixture(scope='module')
def product_state():
    return make_state(0.0)


@pytest.fixture(scope='module')
def z_axis():
    return MeasurementSet.from_vectors([[0.0, 0.0, 1.0]])


@pytest.fixture(scope='module')
def xz_set():
    """Two orthogonal measurements in the x-z plane."""
    return MeasurementSet.from_vectors([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


@pytest.fixture(scope='module')
def pauli_axes():
    return MeasurementSet.from_vectors(np.eye(3))


@pytest.fixture(scope='function')
def write_json(tmp_path):
    """Write a JSON document into the test's temporary directory and return its path."""
    def _write(name: str, payload: dict):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return _write


@pytest.fixture(scope='function')
def cli_runner():
    """Click test runner; logging is pointed back at the real stderr afterwards."""
    from click.testing import CliRunner

    yield CliRunner()
    init_toolkit('testing')


@pytest.fixture(scope='function')
def invoke(cli_runner):
    """Run a steerkit command under the testing configuration."""
    from steerkit.cli import cli

    def _invoke(*args: str):
        return cli_runner.invoke(cli, ['--env', 'testing', *map(str, args)], obj={})

    return _invoke


@pytest.fixture(scope='function')
def z_file(write_json):
    return write_json('z.json', {'format': 'measurements', 'version': 1, 'directions': [[0, 0, 1]]})


@pytest.fixture(scope='function')
def xz_file(write_json):
    return write_json('xz.json', {'format': 'measurements', 'version': 1,
                                  'directions': [[0, 0, 1], [1, 0, 0]]})


@pytest.fixture(scope='function')
def degraded_solver():
    """Build a solver whose real solutions come back inaccurate with a forced primal residual."""
    from dataclasses import replace

    from steerkit.services.solvers import ConicSolver, SolverStatus
    from steerkit.services.solvers.cvxpy_backend import CvxpyConicSolver

    class DegradedSolver(ConicSolver):
        name = 'degraded'

        def __init__(self, residual: float):
            super().__init__()
            self.inner = CvxpyConicSolver()
            self.residual = residual

        def solve(self, program):
            solution = self.inner.solve(program)
            return replace(solution, status=SolverStatus.INACCURATE,
                           residuals={**solution.residuals, 'primal': self.residual})

    return DegradedSolver
