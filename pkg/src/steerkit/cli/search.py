"""Threshold search commands."""
import csv
import io
from pathlib import Path

import click

from steerkit.cli import emit
from steerkit.config import current_config
from steerkit.exceptions import NumericError
from steerkit.models import SearchConfig
from steerkit.serialization import (
    alpha_star_to_dict,
    campaign_to_dict,
    measurements_from_dict,
    read_json,
    search_to_dict,
)
from steerkit.services.measurement_optimizer import PUBLISHED_ALPHA_STAR, hill_climb, table_one_campaign
from steerkit.services.results import ResultStore
from steerkit.services.steering_feasibility import max_alpha
from steerkit.utils import exits_with_code


@click.command('alpha-star')
@click.option('--m', 'm', type=click.IntRange(1, 14), default=None, help='Number of measurements to search.')
@click.option('--measurements', 'meas_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help='Evaluate this fixed set instead of searching.')
@click.option('--restarts', type=click.IntRange(min=1), default=None)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--method', type=click.Choice(['direct', 'bisection']), default='direct', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@exits_with_code
def alpha_star(m: int | None, meas_file: Path | None, restarts: int | None, seed: int,
               method: str, out: Path | None):
    """Smallest alpha* found by hill climbing over M directions."""
    if (m is None) == (meas_file is None):
        raise click.UsageError("Give exactly one of --m and --measurements")

    parameters = {'m': m, 'measurements': meas_file, 'restarts': restarts, 'seed': seed, 'method': method}

    if meas_file is not None:
        meas = measurements_from_dict(read_json(meas_file, 'measurements'))
        result = max_alpha(meas, method=method)
        if result.clamped:
            click.echo("Warning: alpha* clamped at 1; this set never demonstrates steering", err=True)
        emit(alpha_star_to_dict(result, meas), out, 'alpha-star', parameters, seed)
        return

    config = SearchConfig.from_config(m, restarts=restarts, seed=seed)
    result = hill_climb(config)
    clamped = result.alpha_star >= 1.0
    if clamped:
        click.echo("Warning: alpha* clamped at 1; a single measurement never demonstrates steering", err=True)
    emit(search_to_dict(result, seed, clamped), out, 'alpha-star', parameters, seed)


def _csv(rows, published_values: bool) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    header = ['m', 'alpha_star', 'solver_calls', 'status']
    if published_values:
        header += ['published', 'delta']
    writer.writerow(header)

    for row in rows:
        line = [
            row.m,
            '' if row.alpha_star is None else f'{row.alpha_star:.6f}',
            row.solver_calls,
            'failed' if row.failed else 'ok',
        ]
        if published_values:
            published = PUBLISHED_ALPHA_STAR.get(row.m)
            line += ['' if published is None else f'{published:.4f}',
                     '' if row.delta is None else f'{row.delta:+.6f}']
        writer.writerow(line)
    return buffer.getvalue()


@click.command('table-one')
@click.option('--m-max', type=click.IntRange(2, 14), required=True)
@click.option('--budget', type=click.IntRange(min=1), default=None,
              help='Restarts per m (default: SEARCH_RESTARTS).')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--paper-values', 'published_values', is_flag=True, help='Add published targets and deltas.')
@click.option('--checkpoint', default=None, help='Checkpoint name for resumable campaigns.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='Also write the JSON table with a manifest.')
@exits_with_code
def table_one(m_max: int, budget: int | None, seed: int, published_values: bool,
              checkpoint: str | None, out: Path | None):
    """Threshold table alpha*(m) for m = 2 .. M_MAX as CSV."""
    budget = budget or current_config().SEARCH_RESTARTS
    store = ResultStore() if checkpoint else None

    rows, timings = table_one_campaign(m_max, budget, seed, store=store, checkpoint=checkpoint)
    click.echo(_csv(rows, published_values), nl=False)

    if out is not None:
        payload = campaign_to_dict(rows, seed, budget)
        if not published_values:
            for row in payload['rows']:
                row['published_value'] = None
                row['delta'] = None
        emit(payload, out, 'table-one',
             {'m_max': m_max, 'budget': budget, 'seed': seed, 'published_values': published_values},
             seed, timings)

    failed = [row.m for row in rows if row.failed]
    if failed:
        raise NumericError(f"Rows failed for m = {failed}", residuals={'timings': timings})
