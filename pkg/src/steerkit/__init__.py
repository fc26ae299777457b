"""Steerkit - one-way EPR steering toolkit."""
import logging
import os

from dotenv import load_dotenv

from steerkit.config import BaseConfig, activate_config, get_config
from steerkit.logging_config import configure_logging

load_dotenv()

__version__ = '1.0.0'

logger = logging.getLogger(__name__)


def init_toolkit(config_name: str | None = None) -> type[BaseConfig]:
    """Select, validate and activate a configuration; set up logging."""
    if config_name is None:
        config_name = os.environ.get('STEERKIT_ENV', 'development')

    config_class = get_config(config_name)

    configure_logging(config_class)
    logger.info("Initialising toolkit", extra={'path': config_name})

    if hasattr(config_class, 'init_toolkit'):
        config_class.init_toolkit()

    activate_config(config_class)

    from steerkit.services.solvers import reset_solver
    reset_solver()

    logger.debug("Toolkit ready", extra={'solver': config_class.SOLVER_BACKEND})
    return config_class
