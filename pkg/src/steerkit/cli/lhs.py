"""Hidden-variable model verification command."""
from pathlib import Path

import click
import numpy as np

from steerkit.cli import emit
from steerkit.exceptions import VerificationError
from steerkit.models import ModelParameters
from steerkit.models.state import random_unit_vectors
from steerkit.serialization import read_json, verification_to_dict
from steerkit.services.lhs_model import verify_model
from steerkit.utils import exits_with_code


class SampleCount(click.ParamType):
    """Positive integer that may be written in scientific notation (1e7)."""

    name = 'count'

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            count = value
        else:
            try:
                as_float = float(value)
            except (TypeError, ValueError):
                self.fail(f"{value!r} is not a number", param, ctx)
            if not as_float.is_integer():
                self.fail(f"{value!r} is not a whole number", param, ctx)
            count = int(as_float)
        if count < 1:
            self.fail("must be at least 1", param, ctx)
        return count


def _random_pairs(count: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    xs = random_unit_vectors(count, rng)
    ys = random_unit_vectors(count, rng)
    return list(zip(xs, ys))


def _pairs_from_file(path: Path) -> list[tuple[np.ndarray, np.ndarray]]:
    document = read_json(path, 'pairs')
    pairs = []
    for pair in document['pairs']:
        x = np.asarray(pair['x'], dtype=float)
        y = np.asarray(pair['y'], dtype=float)
        pairs.append((x / np.linalg.norm(x), y / np.linalg.norm(y)))
    return pairs


@click.command('lhs-verify')
@click.option('--samples', type=SampleCount(), default=10**6, show_default=True,
              help='Samples per measurement pair.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--pairs', 'pairs_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help='JSON file of (x, y) pairs.')
@click.option('--random', 'random_count', type=click.IntRange(min=1), default=None,
              help='Number of random (x, y) pairs.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option('--flip-probability', type=click.FloatRange(0.0, 0.5), default=0.2, hidden=True)
@exits_with_code
def lhs_verify(samples: int, seed: int, pairs_file: Path | None, random_count: int | None,
               out: Path | None, flip_probability: float):
    """Check the hidden-variable model against the state at alpha = 1/2."""
    if pairs_file is not None and random_count is not None:
        raise click.UsageError("--pairs and --random are mutually exclusive")

    if pairs_file is not None:
        pairs = _pairs_from_file(pairs_file)
    else:
        pairs = _random_pairs(random_count or 10, seed)

    params = ModelParameters(flip_probability)
    verification = verify_model(pairs, samples, seed, params)

    emit(
        verification_to_dict(verification),
        out,
        'lhs-verify',
        {'samples': samples, 'seed': seed, 'pairs': str(pairs_file) if pairs_file else None,
         'random': random_count, 'flip_probability': flip_probability},
        seed=seed,
    )

    failures = verification.failures()
    if failures:
        first = failures[0]
        raise VerificationError(
            f"{len(failures)} pair(s) disagree; first x={list(first.x)} y={list(first.y)} "
            f"deviations={[round(d, 2) for d in first.deviations]} sigma"
        )
