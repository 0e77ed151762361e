"""Configuration dataclasses and the exception hierarchy."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

EULER_GAMMA = float(np.euler_gamma)


class ZetaLabError(Exception):
    """Base class for all errors raised by zetalab."""


class DomainError(ZetaLabError, ValueError):
    """An argument lies outside the admitted domain (e.g. t < 7)."""


class WindowRangeError(ZetaLabError, ValueError):
    """An evaluation point lies outside a window, or a height exceeds backend capability."""


class ConvergenceError(ZetaLabError, ArithmeticError):
    """A solver or quadrature could not reach its tolerance.

    ``best`` carries the best value found (a float or a result object) and
    ``bracket`` the final bracket for root solvers, when available.
    """

    def __init__(self, message: str, best=None, bracket=None):
        super().__init__(message)
        self.best = best
        self.bracket = bracket


class Backend(str, enum.Enum):
    """How Hardy-Littlewood integrals and Gram sums are evaluated."""

    QUADRATURE = "quadrature"
    MAIN_TERM = "main-term"

    @classmethod
    def parse(cls, value: "str | Backend") -> "Backend":
        if isinstance(value, Backend):
            return value
        aliases = {"quad": cls.QUADRATURE, "main": cls.MAIN_TERM}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass(frozen=True)
class PrecisionConfig:
    theta_correction_terms: int = 3
    rs_correction_order: int = 4
    quad_rel_tol: float = 1e-10
    quad_abs_tol: float = 1e-12
    root_tol: float = 1e-9

    def __post_init__(self):
        if not 0 <= self.theta_correction_terms <= 3:
            raise DomainError("theta_correction_terms must be in 0..3")
        # -1 disables the remainder entirely (bare main sum)
        if not -1 <= self.rs_correction_order <= 4:
            raise DomainError("rs_correction_order must be in -1..4")
        for name in ("quad_rel_tol", "quad_abs_tol", "root_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class LadderConfig:
    c: float = EULER_GAMMA
    backend: Backend = Backend.QUADRATURE
    root_tol: float = 1e-11  # relative, on heights
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise DomainError("c must lie in (0, 1)")
        if not self.root_tol > 0:
            raise DomainError("root_tol must be strictly positive")
        object.__setattr__(self, "backend", Backend.parse(self.backend))

    def with_backend(self, backend: "str | Backend") -> "LadderConfig":
        return LadderConfig(self.c, Backend.parse(backend), self.root_tol, self.precision)


DEFAULT_PRECISION = PrecisionConfig()
DEFAULT_LADDER = LadderConfig()
