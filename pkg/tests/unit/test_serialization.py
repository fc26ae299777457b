# tests/unit/test_serialization.py
"""
Unit tests for JSON encoding and schema validation.
"""
import json

import numpy as np
import pytest

from steerkit.config import current_config
from steerkit.exceptions import DomainError
from steerkit.models import CampaignRow, SteeringInequality
from steerkit.pauli_core import Party
from steerkit.serialization import (
    assemblage_from_dict,
    assemblage_to_dict,
    canonical_json,
    complex_matrix,
    inequality_from_dict,
    inequality_to_dict,
    measurements_from_dict,
    measurements_to_dict,
    number,
    parse_complex_matrix,
    read_json,
    row_from_dict,
    row_to_dict,
    schema_directory,
    state_from_dict,
    state_to_dict,
    validate,
)
from steerkit.services.state_family import assemblage_from_measurements


def test_numbers_keep_twelve_significant_digits():
    """Test that reals are rounded to 12 significant digits."""
    assert number(1.0 / 3.0) == 0.333333333333
    assert number(2.0 / 3.0 * 1e-5) == 6.66666666667e-06
    assert number(float('nan')) is None
    assert number(float('inf')) is None


def test_complex_matrices_are_re_im_pairs():
    """Test that complex matrices are written as [re, im] pairs."""
    matrix = np.array([[1.0, 0.5j], [-0.5j, 0.0]])
    encoded = complex_matrix(matrix)
    assert encoded[0][1] == [0.0, 0.5]
    assert encoded[1][0] == [0.0, -0.5]
    assert np.allclose(parse_complex_matrix(encoded), matrix)


def test_parse_complex_matrix_rejects_plain_reals():
    """Test that matrices without imaginary parts are rejected."""
    with pytest.raises(DomainError):
        parse_complex_matrix([[1.0, 0.0], [0.0, 1.0]])


def test_state_document(half_state):
    """Test that a state document validates and reads back."""
    data = validate(state_to_dict(half_state))
    assert data['format'] == 'state'
    assert data['alpha'] == 0.5
    restored = state_from_dict(data)
    assert np.allclose(restored.matrix, half_state.matrix, atol=1e-11)
    assert restored.alpha == 0.5


def test_measurement_document_renormalises():
    """Test that nearly unit directions are renormalised on read."""
    meas = measurements_from_dict({'format': 'measurements', 'version': 1,
                                   'directions': [[0.0, 0.0, 1.0000001], [1.0, 0.0, 0.0]]})
    assert meas.m == 2
    assert meas[0].is_unit()


def test_measurement_document_rejects_long_vectors():
    """Test that directions far from unit length are rejected."""
    with pytest.raises(DomainError):
        measurements_from_dict({'format': 'measurements', 'version': 1, 'directions': [[0.0, 0.0, 2.0]]})


def test_assemblage_document(singlet, xz_set):
    """Test that an assemblage document validates and reads back."""
    asm = assemblage_from_measurements(singlet, xz_set, Party.A)
    data = validate(assemblage_to_dict(asm))
    assert data['steering_party'] == 'A'
    assert np.allclose(assemblage_from_dict(data).coefficients, asm.coefficients, atol=1e-11)


def test_inequality_document():
    """Test that an inequality document validates and reads back."""
    inequality = SteeringInequality([[0.0, 0.0, 1.0]], [0.25], [0.0, 0.0, -0.5], 1.25)
    data = validate(inequality_to_dict(inequality, alpha=0.75, violation=0.125))
    assert data['m'] == 1
    assert data['alpha'] == 0.75
    assert inequality_from_dict(data).bound == 1.25


def test_failed_row_survives_encoding():
    """Test that a failed campaign row keeps its error message."""
    row = CampaignRow(5, None, None, published_value=0.5302, error='solver failed')
    data = row_to_dict(row)
    assert data['alpha_star'] is None
    assert data['delta'] is None
    restored = row_from_dict(data)
    assert restored.failed
    assert restored.error == 'solver failed'


def test_validate_reports_every_problem():
    """Test that validation lists every schema violation."""
    with pytest.raises(DomainError) as excinfo:
        validate({'format': 'state', 'version': 2, 'alpha': 3.0, 'matrix': []})
    message = str(excinfo.value)
    assert 'version' in message
    assert 'alpha' in message


def test_validate_requires_format():
    """Test that documents need a format key."""
    with pytest.raises(DomainError):
        validate({'version': 1})


def test_validate_unknown_format():
    """Test that an unknown format is a domain error."""
    with pytest.raises(DomainError):
        validate({'format': 'inventory', 'version': 1})


def test_read_json_unwraps_manifest(write_json, xz_set):
    """Test that files with a manifest are unwrapped to the payload."""
    payload = measurements_to_dict(xz_set)
    path = write_json('wrapped.json', {'manifest': {'format': 'manifest'}, 'payload': payload})
    assert read_json(path, 'measurements') == payload


def test_read_json_rejects_garbage(tmp_path):
    """Test that unreadable files are domain errors."""
    path = tmp_path / 'broken.json'
    path.write_text('{not json')
    with pytest.raises(DomainError):
        read_json(path)


def test_canonical_json_is_sorted():
    """Test that canonical JSON sorts its keys."""
    text = canonical_json({'b': 1, 'a': 2})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {'a': 2, 'b': 1}


def test_schemas_ship_inside_the_package():
    """Test that the default schema directory is the packaged one."""
    directory = schema_directory()
    assert directory.parent.name == 'steerkit'
    assert (directory / 'lhs-report.schema.json').is_file()
    assert len(list(directory.glob('*.schema.json'))) == 13


def test_schema_directory_override(monkeypatch, tmp_path):
    """Test that a configured schema directory replaces the packaged one."""
    monkeypatch.setattr(current_config(), 'SCHEMA_PATH', str(tmp_path))
    assert schema_directory() == tmp_path
    with pytest.raises(DomainError, match='No schema published'):
        validate({'format': 'state', 'version': 1})
