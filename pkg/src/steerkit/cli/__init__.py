"""Command-line interface."""
import logging
import os
import time
from pathlib import Path

import click

from steerkit import __version__, init_toolkit
from steerkit.config import activate_config
from steerkit.serialization import canonical_json, validate

logger = logging.getLogger(__name__)


def _configure(env: str | None, threads: int | None, solver: str | None) -> None:
    config_class = init_toolkit(env)
    overrides = {}

    # STEERKIT_THREADS wins over --threads
    env_threads = os.environ.get('STEERKIT_THREADS')
    if env_threads:
        overrides['THREADS'] = int(env_threads)
    elif threads:
        overrides['THREADS'] = threads
    if solver:
        overrides['SOLVER_BACKEND'] = solver

    if overrides:
        activate_config(type(config_class.__name__, (config_class,), overrides))
        if solver:
            from steerkit.services.solvers import reset_solver
            reset_solver()
    logger.debug("CLI configured", extra={'path': env, 'solver': solver})


@click.group()
@click.option('--env', envvar='STEERKIT_ENV', default=None,
              help='Configuration name (development, production, testing).')
@click.option('--threads', type=click.IntRange(min=1), default=None,
              help='Worker threads (default: machine width; STEERKIT_THREADS takes precedence).')
@click.option('--solver', type=click.Choice(['cvxpy', 'cvxopt']), default=None,
              help='Conic solver backend.')
@click.version_option(__version__, prog_name='steerkit')
@click.pass_context
def cli(ctx: click.Context, env: str | None, threads: int | None, solver: str | None):
    """One-way EPR steering toolkit."""
    _configure(env, threads, solver)
    ctx.ensure_object(dict)
    ctx.obj['started'] = time.perf_counter()


def emit(payload: dict, out: Path | None, command: str, parameters: dict,
         seed: int | None = None, timings: dict[str, float] | None = None) -> None:
    """Write ``payload`` with a manifest to ``out``, or print it bare to stdout."""
    from steerkit.services.results import ResultStore, RunManifest

    if out is None:
        click.echo(canonical_json(validate(payload)), nl=False)
        return

    ctx = click.get_current_context()
    started = ctx.find_root().obj.get('started', time.perf_counter())
    manifest = RunManifest(
        command=command,
        parameters={k: (str(v) if isinstance(v, Path) else v) for k, v in parameters.items()},
        seed=seed,
        duration_s=round(time.perf_counter() - started, 3),
        timings=dict(timings or {}),
    )
    path = ResultStore(out.parent).write(out.name, payload, manifest)
    click.echo(f"Wrote {path}", err=True)


def register_commands(group: click.Group) -> None:
    """Attach every command module to the group."""
    from steerkit.cli.lhs import lhs_verify
    from steerkit.cli.search import alpha_star, table_one
    from steerkit.cli.state import state_info
    from steerkit.cli.steering import check_assemblage, inequality, one_way

    for command in (state_info, lhs_verify, alpha_star, inequality, check_assemblage,
                    table_one, one_way):
        group.add_command(command)


register_commands(cli)
