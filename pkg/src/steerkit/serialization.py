"""JSON encoding of toolkit objects and schema validation of files.

Reals are written with 12 significant digits and complex matrices as nested
``[re, im]`` pairs. Every document carries ``format`` and ``version`` keys
naming the packaged schema it validates against.
"""
from __future__ import annotations

import json
import logging
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
from jsonschema import Draft202012Validator

from steerkit.config import current_config
from steerkit.exceptions import DomainError
from steerkit.models import (
    AlphaStarResult,
    Assemblage,
    CampaignRow,
    CorrelationTable,
    FeasibilityReport,
    LocalStateEnsemble,
    MeasurementSet,
    ModelVerification,
    OneWayReport,
    SearchResult,
    SteeringInequality,
    TwoQubitState,
)
from steerkit.pauli_core import Party, QubitOperator, TwoQubitOperator

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
SIGNIFICANT_DIGITS = 12


def number(value: float) -> float | None:
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f'{value:.{SIGNIFICANT_DIGITS}g}')


def numbers(values) -> list:
    """Nested list of rounded reals."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return number(arr)
    return [numbers(v) for v in arr]


def complex_matrix(matrix: np.ndarray) -> list:
    return [[[number(z.real), number(z.imag)] for z in row] for row in np.asarray(matrix)]


def parse_complex_matrix(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DomainError(f"Matrix must be nested [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _header(kind: str) -> dict[str, Any]:
    return {'format': kind, 'version': FORMAT_VERSION}


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def schema_directory() -> Path:
    """Directory of ``*.schema.json`` files; the packaged copy unless STEERKIT_SCHEMAS is set."""
    override = current_config().SCHEMA_PATH
    if override:
        return Path(override)
    return Path(str(resources.files('steerkit') / 'schemas'))


def _validator(kind: str) -> Draft202012Validator:
    return _load_validator(kind, schema_directory())


@lru_cache(maxsize=None)
def _load_validator(kind: str, directory: Path) -> Draft202012Validator:
    path = directory / f'{kind}.schema.json'
    if not path.is_file():
        raise DomainError(f"No schema published for {kind!r} at {path}")
    schema = json.loads(path.read_text())
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def validate(payload: dict, kind: str | None = None) -> dict:
    """Raise DomainError listing every schema violation of ``payload``."""
    kind = kind or payload.get('format')
    if not kind:
        raise DomainError("Document has no 'format' key")
    errors = sorted(_validator(kind).iter_errors(payload), key=lambda e: list(e.path))
    if errors:
        details = '; '.join(f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors)
        raise DomainError(f"Invalid {kind} document: {details}")
    return payload


def read_json(path: str | Path, kind: str | None = None) -> dict:
    """Load and validate a document; files written with a manifest are unwrapped."""
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise DomainError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise DomainError(f"{path} is not valid JSON: {e}") from e

    if isinstance(document, dict) and 'payload' in document and 'manifest' in document:
        document = document['payload']
    if not isinstance(document, dict):
        raise DomainError(f"{path} does not hold a JSON object")
    logger.debug("Read document", extra={'path': str(path)})
    return validate(document, kind)


# States and measurements

def state_to_dict(state: TwoQubitState) -> dict:
    return {
        **_header('state'),
        'alpha': None if state.alpha is None else number(state.alpha),
        'matrix': complex_matrix(state.matrix),
    }


def state_from_dict(data: dict) -> TwoQubitState:
    state = TwoQubitState.from_matrix(parse_complex_matrix(data['matrix']))
    if data.get('alpha') is not None:
        state = TwoQubitState(state.op, float(data['alpha']))
    return state


def measurements_to_dict(meas: MeasurementSet) -> dict:
    return {**_header('measurements'), 'directions': numbers(meas.array)}


def measurements_from_dict(data: dict, normalize: bool = True) -> MeasurementSet:
    """Directions are renormalised; the schema already rejects malformed vectors."""
    vectors = np.asarray(data['directions'], dtype=float)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise DomainError("Measurement directions must be unit vectors")
    return MeasurementSet.from_vectors(vectors, normalize=normalize)


# Assemblages and tables

def assemblage_to_dict(asm: Assemblage) -> dict:
    members = []
    for i in range(asm.m):
        members.append({
            'plus': complex_matrix(asm.member(i, 1).matrix),
            'minus': complex_matrix(asm.member(i, -1).matrix),
        })
    return {**_header('assemblage'), 'steering_party': asm.steering_party.value, 'members': members}


def assemblage_from_dict(data: dict) -> Assemblage:
    members = []
    for member in data['members']:
        plus = QubitOperator.from_matrix(parse_complex_matrix(member['plus']))
        minus = QubitOperator.from_matrix(parse_complex_matrix(member['minus']))
        members.append((plus, minus))
    return Assemblage.from_members(members, Party(data.get('steering_party', 'A')))


def table_to_dict(table: CorrelationTable) -> dict:
    return {'ab': numbers(table.ab), 'a': numbers(table.a), 'b': numbers(table.b)}


def ensemble_to_dict(ensemble: LocalStateEnsemble, threshold: float = 1e-9) -> dict:
    support = ensemble.support(threshold)
    return {
        'strategies': support.strategies.astype(int).tolist(),
        'weights': numbers(support.weights),
        'vectors': numbers(support.vectors),
        'cone_violation': number(ensemble.cone_violation()),
    }


def inequality_to_dict(inequality: SteeringInequality, **extra: Any) -> dict:
    data = {
        **_header('inequality'),
        'm': inequality.m,
        's': numbers(inequality.s),
        's_a': numbers(inequality.s_a),
        's_b': numbers(inequality.s_b),
        'bound': number(inequality.bound),
    }
    for key, value in extra.items():
        data[key] = number(value) if isinstance(value, float) else value
    return data


def inequality_from_dict(data: dict) -> SteeringInequality:
    return SteeringInequality(data['s'], data['s_a'], data['s_b'], data['bound'])


def feasibility_to_dict(report: FeasibilityReport) -> dict:
    return {
        **_header('feasibility'),
        'status': report.status.value,
        'mu': number(report.mu),
        'table': table_to_dict(report.table),
        'ensemble': None if report.ensemble is None else ensemble_to_dict(report.ensemble),
        'inequality': None if report.inequality is None else inequality_to_dict(report.inequality),
        'residuals': {k: number(v) for k, v in sorted(report.residuals.items())},
    }


# Simulation, search and campaign results

def verification_to_dict(verification: ModelVerification) -> dict:
    pairs = []
    for check in verification.checks:
        ea, eb, eab = check.empirical
        se_a, se_b, se_ab = check.standard_errors
        pairs.append({
            'x': numbers(check.x), 'y': numbers(check.y),
            'ea': number(ea), 'eb': number(eb), 'eab': number(eab),
            'se': {'ea': number(se_a), 'eb': number(se_b), 'eab': number(se_ab)},
            'analytic': numbers(check.analytic),
            'quadrature': numbers(check.quadrature),
            'quantum': numbers(check.quantum),
            'passed': bool(check.passed),
        })
    return {
        **_header('lhs-report'),
        'pairs': pairs,
        'n': verification.n,
        'seed': verification.seed,
        'flip_probability': number(verification.params.flip_probability),
        'passed': bool(verification.passed),
    }


def alpha_star_to_dict(result: AlphaStarResult, meas: MeasurementSet) -> dict:
    return {
        **_header('alpha-star'),
        'm': meas.m,
        'alpha_star': number(result.alpha_star),
        'raw_alpha': number(result.raw_alpha),
        'clamped': bool(result.clamped),
        'method': result.method,
        'directions': numbers(meas.array),
    }


def search_to_dict(result: SearchResult, seed: int, clamped: bool = False) -> dict:
    return {
        **_header('search-result'),
        'm': result.m,
        'alpha_star': number(result.alpha_star),
        'clamped': bool(clamped),
        'seed': seed,
        'directions': numbers(result.best.array),
        'solver_calls': result.solver_calls,
        'restarts': [
            {
                'restart': trace.restart,
                'seed': trace.seed,
                'iterations': trace.iterations,
                'alpha_star': None if trace.alpha_star is None else number(trace.alpha_star),
                'solver_calls': trace.solver_calls,
                'failed': bool(trace.failed),
                'error': trace.error,
            }
            for trace in result.traces
        ],
    }


def row_to_dict(row: CampaignRow) -> dict:
    return {
        'm': row.m,
        'alpha_star': None if row.alpha_star is None else number(row.alpha_star),
        'directions': None if row.measurements is None else numbers(row.measurements.array),
        'solver_calls': row.solver_calls,
        'published_value': None if row.published_value is None else number(row.published_value),
        'delta': None if row.delta is None else number(row.delta),
        'error': row.error,
    }


def row_from_dict(data: dict) -> CampaignRow:
    directions = data.get('directions')
    return CampaignRow(
        m=int(data['m']),
        alpha_star=data.get('alpha_star'),
        measurements=None if directions is None else MeasurementSet.from_vectors(directions, normalize=True),
        solver_calls=int(data.get('solver_calls', 0)),
        published_value=data.get('published_value'),
        error=data.get('error'),
    )


def campaign_to_dict(rows: list[CampaignRow], seed: int, budget: int) -> dict:
    return {
        **_header('table-one'),
        'seed': seed,
        'budget': budget,
        'rows': [row_to_dict(row) for row in rows],
    }


def one_way_to_dict(report: OneWayReport) -> dict:
    def brief(r: FeasibilityReport) -> dict:
        return {'status': r.status.value, 'mu': number(r.mu)}

    return {
        **_header('one-way'),
        'alpha': number(report.alpha),
        'one_way': bool(report.one_way),
        'alice_to_bob': brief(report.alice_to_bob),
        'bob_to_alice': [brief(r) for r in report.bob_to_alice],
    }


def operator_to_dict(op: TwoQubitOperator | QubitOperator) -> list:
    return complex_matrix(op.matrix)
