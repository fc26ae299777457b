"""Domain services."""
from steerkit.services.lhs_model import (
    analytic_expectations,
    monte_carlo_protocol,
    quadrature_expectations,
    verify_model,
)
from steerkit.services.measurement_optimizer import (
    gauge_fix,
    hill_climb,
    seeded_refinement,
    table_one_campaign,
)
from steerkit.services.results import ResultStore, RunManifest
from steerkit.services.state_family import (
    correlation_table,
    entanglement_threshold,
    make_state,
    swap_parties,
)
from steerkit.services.steering_feasibility import (
    assemble_program,
    check_one_way,
    extract_inequality,
    lhs_bound,
    max_alpha,
    solve_feasibility,
)

__all__ = [
    'analytic_expectations', 'monte_carlo_protocol', 'quadrature_expectations', 'verify_model',
    'gauge_fix', 'hill_climb', 'seeded_refinement', 'table_one_campaign',
    'ResultStore', 'RunManifest',
    'correlation_table', 'entanglement_threshold', 'make_state', 'swap_parties',
    'assemble_program', 'check_one_way', 'extract_inequality', 'lhs_bound', 'max_alpha',
    'solve_feasibility',
]
