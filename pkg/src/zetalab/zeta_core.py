"""Riemann-Siegel theta, the Z-function, |zeta(1/2+it)|^2 and the local oscillator bank."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .config import DEFAULT_PRECISION, DomainError, PrecisionConfig, WindowRangeError

MIN_HEIGHT = 7.0
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CriticalHeight:
    """A height t >= 7 on the critical line."""

    t: float

    def __post_init__(self):
        if not (self.t >= MIN_HEIGHT):
            raise DomainError(f"height {self.t!r} below {MIN_HEIGHT}")

    def __float__(self) -> float:
        return float(self.t)


def _heights(t) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(float(t) if isinstance(t, CriticalHeight) else t, dtype=np.float64))
    if arr.size and not (np.all(arr >= MIN_HEIGHT)):
        raise DomainError(f"heights must be >= {MIN_HEIGHT}; got min {np.nanmin(arr)!r}")
    return np.ascontiguousarray(arr.ravel()), scalar


def theta_main(t: float) -> float:
    """Main term (t/2) ln(t/2pi) - t/2 - pi/8 without domain restriction (t > 0)."""
    return 0.5 * t * math.log(t / TWO_PI) - 0.5 * t - math.pi / 8.0


def theta(t, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Riemann-Siegel theta via its asymptotic series with cfg.theta_correction_terms tail terms."""
    arr, scalar = _heights(t)
    out = K.theta_batch(arr, cfg.theta_correction_terms)
    return float(out[0]) if scalar else out


def theta_prime(t, cfg: PrecisionConfig = DEFAULT_PRECISION):
    arr, scalar = _heights(t)
    out = K.theta_prime_batch(arr, cfg.theta_correction_terms)
    return float(out[0]) if scalar else out


def z_eval(t, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Riemann-Siegel Z(t): main sum over n <= sqrt(t/2pi) plus remainder terms C0..C{order}."""
    arr, scalar = _heights(t)
    out = K.z_batch(arr, cfg.theta_correction_terms, cfg.rs_correction_order, K.LOGS, K.RSQ, K.RS_POLY)
    return float(out[0]) if scalar else out


def zeta_abs_sq(t, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """|zeta(1/2+it)|^2 = Z(t)^2."""
    z = z_eval(t, cfg)
    return z * z


@dataclass(frozen=True)
class SpectralDecomposition:
    """Frozen-phase oscillator bank approximating Z on [x, x + x^(1/4)].

    Frequencies use the real tau(x) = sqrt(x/2pi); truncation is its floor.
    The phase constant here is unrelated to the window parameter psi(T).
    """

    x: float
    v_max: float
    truncation: int
    amplitudes: tuple[float, ...]
    frequencies: tuple[float, ...]
    phase: float

    def __post_init__(self):
        if len(self.amplitudes) != self.truncation or len(self.frequencies) != self.truncation:
            raise ValueError("oscillator arrays must have length == truncation")


def spectral_decompose(x: float) -> SpectralDecomposition:
    x = float(x)
    if not x >= TWO_PI:
        raise DomainError(f"base height {x!r} below 2*pi (empty oscillator bank)")
    tau = math.sqrt(x / TWO_PI)
    # sqrt can land a hair under an exact integer; x = 2pi m^2 must give truncation m
    m = int(round(tau)) if abs(tau - round(tau)) < 1e-12 * tau else int(math.floor(tau))
    n = np.arange(1, m + 1, dtype=np.float64)
    amps = tuple((2.0 / np.sqrt(n)).tolist())
    freqs = tuple(max(v, 0.0) for v in np.log(tau / n).tolist())
    return SpectralDecomposition(
        x=x,
        v_max=x**0.25,
        truncation=m,
        amplitudes=amps,
        frequencies=freqs,
        phase=-0.5 * x - math.pi / 8.0,
    )


def spectral_eval(d: SpectralDecomposition, t):
    """Sum of (2/sqrt n) cos(t w_n + phase) over the bank; t must lie in [x, x + v_max]."""
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < d.x) or np.any(arr > d.x + d.v_max):
        raise WindowRangeError(f"t outside window [{d.x}, {d.x + d.v_max}]")
    amps = np.asarray(d.amplitudes)
    freqs = np.asarray(d.frequencies)
    args = np.outer(arr, freqs) + d.phase
    out = np.cos(args) @ amps
    return float(out[0]) if np.ndim(t) == 0 else out


def spectral_defect(x: float, samples: int = 4097, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """max |spectral_eval - z_eval| over a uniform grid of the window [x, x + x^(1/4)]."""
    d = spectral_decompose(x)
    if not x >= MIN_HEIGHT:
        raise DomainError(f"x must be >= {MIN_HEIGHT} to compare against z_eval")
    ts = np.linspace(d.x, d.x + d.v_max, samples)
    return float(np.max(np.abs(spectral_eval(d, ts) - z_eval(ts, cfg))))
