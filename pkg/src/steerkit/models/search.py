"""Measurement search configuration and results."""
from __future__ import annotations

from dataclasses import dataclass, field

from steerkit.config import current_config
from steerkit.exceptions import DomainError
from steerkit.models.state import MeasurementSet


@dataclass(frozen=True)
class SearchConfig:
    m: int
    restarts: int = 20
    initial_step: float = 0.3
    decay: float = 0.7
    min_step: float = 1e-4
    seed: int = 0
    threads: int = 1
    accept_tolerance: float = 1e-7
    max_sweeps: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be at least 1, got {self.m}")
        if self.restarts < 1:
            raise DomainError("restarts must be at least 1")
        if not 0.0 < self.decay < 1.0:
            raise DomainError(f"decay must lie in (0, 1), got {self.decay}")
        if self.min_step <= 0.0 or self.initial_step <= 0.0:
            raise DomainError("step sizes must be positive")
        if self.threads < 1:
            raise DomainError("threads must be at least 1")

    @classmethod
    def from_config(cls, m: int, **overrides) -> SearchConfig:
        """Defaults taken from the active toolkit configuration."""
        config = current_config()
        values = {
            'restarts': config.SEARCH_RESTARTS,
            'initial_step': config.SEARCH_INITIAL_STEP,
            'decay': config.SEARCH_DECAY,
            'min_step': config.SEARCH_MIN_STEP,
            'accept_tolerance': config.SEARCH_ACCEPT_TOLERANCE,
            'threads': config.THREADS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(m=m, **values)


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    seed: int
    iterations: int
    alpha_star: float | None
    solver_calls: int
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class SearchResult:
    best: MeasurementSet
    alpha_star: float
    traces: tuple[RestartTrace, ...] = field(default_factory=tuple)
    solver_calls: int = 0

    @property
    def m(self) -> int:
        return self.best.m


@dataclass(frozen=True)
class CampaignRow:
    """One row of the threshold table: best alpha* found with m measurements."""

    m: int
    alpha_star: float | None
    measurements: MeasurementSet | None
    solver_calls: int = 0
    published_value: float | None = None
    error: str | None = None

    @property
    def delta(self) -> float | None:
        if self.alpha_star is None or self.published_value is None:
            return None
        return self.alpha_star - self.published_value

    @property
    def failed(self) -> bool:
        return self.alpha_star is None
