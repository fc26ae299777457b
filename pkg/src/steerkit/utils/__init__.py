"""Utility modules."""
from steerkit.utils.decorators import exits_with_code, log_duration
from steerkit.utils.random import derive_generator, spawn_seeds

__all__ = ['exits_with_code', 'log_duration', 'derive_generator', 'spawn_seeds']
