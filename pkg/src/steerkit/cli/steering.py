"""Steering decision commands."""
from pathlib import Path

import click
import numpy as np

from steerkit.cli import emit
from steerkit.exceptions import AmbiguousResultError, DomainError, VerificationError
from steerkit.models import FeasibilityReport, FeasibilityStatus, MeasurementSet
from steerkit.serialization import (
    assemblage_from_dict,
    feasibility_to_dict,
    inequality_to_dict,
    measurements_from_dict,
    numbers,
    one_way_to_dict,
    read_json,
)
from steerkit.services.state_family import correlation_table, make_state, table_from_assemblage
from steerkit.services.steering_feasibility import (
    assemble_program,
    check_one_way,
    quantum_value,
    solve_feasibility,
)
from steerkit.utils import derive_generator, exits_with_code

ASSEMBLAGE_TOLERANCE = 1e-8


def _require_verdict(report: FeasibilityReport) -> None:
    if report.status is FeasibilityStatus.AMBIGUOUS:
        raise AmbiguousResultError(
            f"Feasibility verdict is numerically ambiguous (mu = {report.mu:.12g})",
            residuals=report.residuals,
        )


@click.command('inequality')
@click.option('--measurements', 'meas_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True)
@click.option('--alpha', type=click.FloatRange(0.0, 1.0), required=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@exits_with_code
def inequality(meas_file: Path, alpha: float, out: Path | None):
    """Steering inequality violated at ALPHA, or the LHS ensemble if there is none."""
    meas = measurements_from_dict(read_json(meas_file, 'measurements'))
    state = make_state(alpha)
    report = solve_feasibility(assemble_program(correlation_table(state, meas)))
    _require_verdict(report)

    parameters = {'measurements': meas_file, 'alpha': alpha}
    if report.status is FeasibilityStatus.INFEASIBLE:
        value = quantum_value(report.inequality, state, meas)
        payload = inequality_to_dict(
            report.inequality,
            alpha=alpha,
            quantum_value=value,
            violation=value - report.inequality.bound,
            directions=numbers(meas.array),
        )
        click.echo(f"steerable: violation {value - report.inequality.bound:.6g}", err=True)
    else:
        payload = {**feasibility_to_dict(report), 'alpha': alpha, 'directions': numbers(meas.array)}
        click.echo("unsteerable: LHS ensemble certificate", err=True)

    emit(payload, out, 'inequality', parameters)


@click.command('check-assemblage')
@click.option('--in', 'in_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@exits_with_code
def check_assemblage(in_file: Path, out: Path | None):
    """Decide whether an assemblage admits a local hidden state model."""
    asm = assemblage_from_dict(read_json(in_file, 'assemblage'))
    problems = asm.violations(ASSEMBLAGE_TOLERANCE)
    if problems:
        raise DomainError("Invalid assemblage: " + '; '.join(problems))

    report = solve_feasibility(assemble_program(table_from_assemblage(asm)))
    _require_verdict(report)

    verdict = 'steerable' if report.steerable else 'unsteerable'
    click.echo(f"{verdict} (steering party {asm.steering_party.value}, m={asm.m})", err=True)
    emit(feasibility_to_dict(report), out, 'check-assemblage', {'in': in_file})


def _random_bob_sets(count: int, max_m: int, seed: int) -> list[MeasurementSet]:
    sets = []
    for index in range(count):
        rng = derive_generator(seed, index)
        size = int(rng.integers(1, max_m + 1))
        sets.append(MeasurementSet.random(size, rng))
    return sets


@click.command('one-way')
@click.option('--alpha', type=click.FloatRange(0.0, 1.0), required=True)
@click.option('--alice', 'alice_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Alice's measurement set.")
@click.option('--bob-sets', type=click.IntRange(min=1), default=50, show_default=True)
@click.option('--max-bob-m', type=click.IntRange(1, 14), default=6, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@exits_with_code
def one_way(alpha: float, alice_file: Path, bob_sets: int, max_bob_m: int, seed: int, out: Path | None):
    """Steerable from Alice to Bob but not back, for random Bob measurement sets."""
    alice_set = measurements_from_dict(read_json(alice_file, 'measurements'))
    report = check_one_way(alpha, alice_set, _random_bob_sets(bob_sets, max_bob_m, seed))

    emit(one_way_to_dict(report), out, 'one-way',
         {'alpha': alpha, 'alice': alice_file, 'bob_sets': bob_sets, 'max_bob_m': max_bob_m, 'seed': seed},
         seed)

    for r in [report.alice_to_bob, *report.bob_to_alice]:
        _require_verdict(r)
    if not report.one_way:
        steerable_back = int(np.sum([r.steerable for r in report.bob_to_alice]))
        raise VerificationError(
            f"Not one-way: A->B {report.alice_to_bob.status.value}, "
            f"{steerable_back} of {len(report.bob_to_alice)} Bob sets steer back"
        )
