"""Toolkit configuration classes."""
import os


class BaseConfig:
    """Base configuration with shared defaults."""

    # Logging
    LOG_LEVEL = 'INFO'
    LOG_FORMAT = 'json'

    # Conic solver
    SOLVER_BACKEND = os.environ.get('STEERKIT_SOLVER', 'cvxpy')
    CVXPY_SOLVER = os.environ.get('STEERKIT_CVXPY_SOLVER', 'CLARABEL')
    SOLVER_TOLERANCE = 1e-10
    SOLVER_MAX_ITERATIONS = 200

    # Three-valued feasibility verdicts: deficits at or below FEASIBLE_TOLERANCE are
    # feasible, at or above INFEASIBLE_TOLERANCE infeasible, ambiguous in between.
    FEASIBLE_TOLERANCE = 1e-9
    INFEASIBLE_TOLERANCE = 1e-6

    MAX_STRATEGY_BITS = 20

    # Parallelism
    THREADS = int(os.environ.get('STEERKIT_THREADS', os.cpu_count() or 1))

    # Simulation
    MONTE_CARLO_BLOCK = 1_000_000
    QUADRATURE_NODES = 48
    QUADRATURE_TOLERANCE = 1e-8

    # Measurement search
    SEARCH_RESTARTS = 20
    SEARCH_INITIAL_STEP = 0.3
    SEARCH_DECAY = 0.7
    SEARCH_MIN_STEP = 1e-4
    SEARCH_ACCEPT_TOLERANCE = 1e-7

    # Files
    RESULTS_PATH = os.environ.get('STEERKIT_RESULTS', 'results')
    SCHEMA_PATH = os.environ.get('STEERKIT_SCHEMAS')


class DevelopmentConfig(BaseConfig):
    """Development configuration."""

    LOG_LEVEL = 'DEBUG'
    LOG_FORMAT = 'text'


class ProductionConfig(BaseConfig):
    """Production configuration for long reproduction campaigns."""

    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FORMAT = 'json'

    @classmethod
    def init_toolkit(cls) -> None:
        """Validate settings that a campaign cannot recover from mid-run."""
        problems = []

        if cls.SOLVER_BACKEND not in ('cvxpy', 'cvxopt'):
            problems.append(f'SOLVER_BACKEND={cls.SOLVER_BACKEND!r}')
        if not 0 < cls.FEASIBLE_TOLERANCE < cls.INFEASIBLE_TOLERANCE:
            problems.append('FEASIBLE_TOLERANCE < INFEASIBLE_TOLERANCE')
        if not cls.RESULTS_PATH:
            problems.append('RESULTS_PATH')
        if cls.THREADS < 1:
            problems.append('THREADS')

        if problems:
            raise ValueError(f"Invalid production config: {', '.join(problems)}")


class TestingConfig(BaseConfig):
    """Testing configuration."""

    TESTING = True
    LOG_LEVEL = 'WARNING'
    LOG_FORMAT = 'text'

    SOLVER_BACKEND = 'cvxpy'
    THREADS = 2
    MONTE_CARLO_BLOCK = 250_000
    SEARCH_RESTARTS = 4
    RESULTS_PATH = '/tmp/steerkit-test-results'


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig,
}

_active_config: type[BaseConfig] | None = None


def get_config(config_name: str | None = None) -> type[BaseConfig]:
    """Get configuration class by name."""
    if config_name is None:
        config_name = os.environ.get('STEERKIT_ENV', 'development')
    return config.get(config_name, config['default'])


def activate_config(config_class: type[BaseConfig]) -> None:
    """Make a configuration class the one returned by `current_config`."""
    global _active_config
    _active_config = config_class


def current_config() -> type[BaseConfig]:
    """Return the active configuration, falling back to the environment's choice."""
    if _active_config is None:
        return get_config()
    return _active_config
