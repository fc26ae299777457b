"""State inspection command."""
from pathlib import Path

import click
import numpy as np

from steerkit.cli import emit
from steerkit.pauli_core import Party
from steerkit.serialization import complex_matrix, number
from steerkit.services.state_family import (
    chsh_max,
    entanglement_threshold,
    make_state,
    ppt_min_eigenvalue,
    reduced_state,
)
from steerkit.utils import exits_with_code


@click.command('state-info')
@click.option('--alpha', type=click.FloatRange(0.0, 1.0), required=True, help='Family parameter.')
@click.option('--json', 'as_json', is_flag=True, help='Print the machine-readable report.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path),
              default=None, help='Write the report with a manifest.')
@exits_with_code
def state_info(alpha: float, as_json: bool, out):
    """Density matrix, marginals and PPT verdict of the state at ALPHA."""
    state = make_state(alpha)
    lowest = ppt_min_eigenvalue(state)
    verdict = 'entangled' if lowest < -1e-12 else 'PPT/separable-region'
    threshold = entanglement_threshold()
    reduced_a = reduced_state(state, Party.A)
    reduced_b = reduced_state(state, Party.B)

    if as_json or out is not None:
        payload = {
            'format': 'state-info',
            'version': 1,
            'alpha': number(alpha),
            'matrix': complex_matrix(state.matrix),
            'reduced_a': complex_matrix(reduced_a.matrix),
            'reduced_b': complex_matrix(reduced_b.matrix),
            'ppt_min_eigenvalue': number(lowest),
            'chsh_max': number(chsh_max(state)),
            'verdict': verdict,
            'threshold': number(threshold),
        }
        emit(payload, out, 'state-info', {'alpha': alpha})
        return

    with np.printoptions(precision=6, suppress=True):
        click.echo(f"alpha = {alpha:.6g}")
        click.echo("density matrix (real part):")
        click.echo(str(state.matrix.real))
        click.echo(f"reduced state A (Bloch): {reduced_a.bloch}")
        click.echo(f"reduced state B (Bloch): {reduced_b.bloch}")
    click.echo(f"PPT minimum eigenvalue: {lowest:.12g}")
    click.echo(f"maximal CHSH value: {chsh_max(state):.12g}")
    click.echo(f"verdict: {verdict}")
    click.echo(f"entanglement threshold: {threshold:.8f}")
