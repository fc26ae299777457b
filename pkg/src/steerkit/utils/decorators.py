"""Custom decorators for services and CLI commands."""
import logging
import sys
import time
from functools import wraps
from typing import Any, Callable

import click

from steerkit.exceptions import SteerkitError

logger = logging.getLogger(__name__)


def log_duration(operation: str) -> Callable:
    """Log wall time of the wrapped call at DEBUG level."""
    def decorator(f: Callable) -> Callable:
        @wraps(f)
        def decorated_function(*args: Any, **kwargs: Any):
            started = time.perf_counter()
            try:
                return f(*args, **kwargs)
            finally:
                logger.debug(f"{operation} finished", extra={
                    'duration_ms': round((time.perf_counter() - started) * 1000, 2),
                })

        return decorated_function

    return decorator


def exits_with_code(f: Callable) -> Callable:
    """Turn toolkit exceptions raised by a command into its documented exit code."""
    @wraps(f)
    def decorated_function(*args: Any, **kwargs: Any):
        try:
            return f(*args, **kwargs)
        except SteerkitError as e:
            logger.error("Command failed", exc_info=True, extra={
                'error': str(e),
                'status': type(e).__name__,
            })
            click.echo(f"Error: {e}", err=True)
            residuals = getattr(e, 'residuals', None)
            if residuals:
                click.echo(f"Residuals: {residuals}", err=True)
            sys.exit(e.exit_code)

    return decorated_function
