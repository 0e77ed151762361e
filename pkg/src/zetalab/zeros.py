"""Sign-change zeros of Z on the critical line, N_0 counts, gaps and window increments."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .config import DEFAULT_PRECISION, DomainError, PrecisionConfig, ZetaLabError
from .hl_integral import oscillation_scale
from .zeta_core import MIN_HEIGHT, theta

GRID_PER_PERIOD = 16  # 8 per period misses a few close pairs below 1e4
CHUNK = 1 << 20  # grid points per scan chunk
FIRST_ORDINATE_FLOOR = 14.0  # no zeros below this height, so scans may start at 7


class InsufficientZerosError(ZetaLabError, ValueError):
    """A gap report needs at least two zeros in range."""


@dataclass(frozen=True)
class ZeroOrdinate:
    """A zero located by a sign change of Z within gamma +- bracket_width."""

    gamma: float
    bracket_width: float


def _z(ts: np.ndarray, cfg: PrecisionConfig) -> np.ndarray:
    return K.z_batch(np.ascontiguousarray(ts, dtype=np.float64), cfg.theta_correction_terms,
                     cfg.rs_correction_order, K.LOGS, K.RSQ, K.RS_POLY)


def grid_step(b: float) -> float:
    return float(oscillation_scale(b)) / GRID_PER_PERIOD


def _grid_chunks(a: float, b: float):
    """Uniform grid on [a, b] with GRID_PER_PERIOD points per local period, in chunks sharing end points."""
    n = max(1, math.ceil((b - a) / grid_step(b)))
    step = (b - a) / n
    start = 0
    while start < n:
        stop = min(n, start + CHUNK)
        yield a + step * np.arange(start, stop + 1)
        start = stop


def _sign_changes(a: float, b: float, cfg: PrecisionConfig, first_only: bool = False):
    """Brackets (left, right, z_left) of grid cells where Z changes sign."""
    lefts, rights, zl = [], [], []
    for grid in _grid_chunks(a, b):
        z = _z(grid, cfg)
        idx = np.flatnonzero(z[:-1] * z[1:] < 0)
        # exact zeros on a grid node: nudge into a bracket with the next node
        exact = np.flatnonzero(z[:-1] == 0)
        if exact.size:
            idx = np.union1d(idx, exact)
        lefts.append(grid[idx])
        rights.append(grid[idx + 1])
        zl.append(z[idx])
        if first_only and idx.size:
            break
    if not lefts:
        return np.empty(0), np.empty(0), np.empty(0)
    return np.concatenate(lefts), np.concatenate(rights), np.concatenate(zl)


def _bisect(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, cfg: PrecisionConfig):
    """Vectorized bisection of sign-change brackets down to root_tol half-width."""
    lo, hi, zlo = lo.copy(), hi.copy(), zlo.copy()
    while True:
        active = 0.5 * (hi - lo) > cfg.root_tol
        active &= 0.5 * (hi - lo) > 2.0 * np.spacing(hi)
        if not active.any():
            break
        i = np.flatnonzero(active)
        mid = 0.5 * (lo[i] + hi[i])
        zm = _z(mid, cfg)
        same = np.sign(zm) == np.sign(zlo[i])
        lo[i] = np.where(same, mid, lo[i])
        zlo[i] = np.where(same, zm, zlo[i])
        hi[i] = np.where(same, hi[i], mid)
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


def find_zeros(a: float, b: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> list[ZeroOrdinate]:
    """Odd-order zeros of Z in [a, b], ascending.

    Two sign changes inside one grid cell cancel and are missed, as are
    even-order zeros.
    """
    if not (MIN_HEIGHT <= a < b):
        raise DomainError(f"need 7 <= a < b, got [{a}, {b}]")
    lo, hi, zl = _sign_changes(a, b, cfg)
    if lo.size == 0:
        return []
    gammas, widths = _bisect(lo, hi, zl, cfg)
    return [ZeroOrdinate(float(g), float(w)) for g, w in zip(gammas, widths)]


def count_n0(T: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> int:
    """N_0(T): number of sign-change zeros of Z in (0, T]."""
    if not T >= MIN_HEIGHT:
        raise DomainError(f"T must be >= {MIN_HEIGHT}")
    if T <= FIRST_ORDINATE_FLOOR:
        return 0
    return len(_sign_changes(MIN_HEIGHT, T, cfg)[0])


def riemann_von_mangoldt(T: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """Smooth zero count theta(T)/pi + 1."""
    return theta(T, cfg) / math.pi + 1.0


REFERENCE_CURVES = {
    "t^(1/6) ln^6 t": lambda g: g ** (1 / 6) * math.log(g) ** 6,
    "t^(5/32)": lambda g: g ** (5 / 32),
    "t^0.1559458": lambda g: g**0.1559458,
    "1/lnln t": lambda g: 1.0 / math.log(math.log(g)),
}


@dataclass(frozen=True)
class GapReport:
    a: float
    b: float
    zeros: tuple[float, ...]
    gaps: tuple[float, ...]
    max_gap: float
    max_gap_at: float  # the lower ordinate of the widest gap
    curves: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)  # max_gap / curve, the achieved constants


def gap_report(a: float, b: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> GapReport:
    zs = find_zeros(a, b, cfg)
    if len(zs) < 2:
        raise InsufficientZerosError(f"need at least 2 zeros in [{a}, {b}], found {len(zs)}")
    g = np.array([z.gamma for z in zs])
    gaps = np.diff(g)
    i = int(np.argmax(gaps))
    at = float(g[i])
    curves = {name: f(at) for name, f in REFERENCE_CURVES.items()}
    ratios = {name: float(gaps[i]) / v for name, v in curves.items()}
    return GapReport(a, b, tuple(g.tolist()), tuple(gaps.tolist()), float(gaps[i]), at, curves, ratios)


def zero_window(T: float, psi_value: float) -> float:
    """Length T^{1/6} psi^2 ln^5 T of the window that should contain an odd-order zero."""
    return T ** (1 / 6) * psi_value**2 * math.log(T) ** 5


def interval_has_zero(T: float, psi_value: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> bool:
    if not T >= 1e3:
        raise DomainError("interval_has_zero needs T >= 1e3")
    if psi_value < 0:
        raise DomainError("psi_value must be >= 0")
    w = zero_window(T, psi_value)
    if w <= 0:
        return False
    return len(_sign_changes(T, T + w, cfg, first_only=True)[0]) > 0


class CountVariant(str, enum.Enum):
    HL1921 = "HL1921"
    SELBERG = "Selberg"
    MOSER = "Moser"

    @classmethod
    def parse(cls, value: "str | CountVariant") -> "CountVariant":
        if isinstance(value, CountVariant):
            return value
        for v in cls:
            if v.value.lower() == str(value).lower():
                return v
        raise DomainError(f"unknown variant {value!r}")


@dataclass(frozen=True)
class CountIncrease:
    T: float
    variant: CountVariant
    window: float
    increase: int
    reference: float
    ratio: float  # increase / reference: the achieved constant


def increase_window(T: float, variant: "str | CountVariant", eps: float | None = None,
                    psi_value: float | None = None) -> float:
    variant = CountVariant.parse(variant)
    if variant is CountVariant.MOSER:
        if psi_value is None or psi_value <= 0:
            raise DomainError("Moser variant needs psi_value > 0")
        return T ** (5 / 12) * psi_value * math.log(T) ** 3
    if eps is None or eps <= 0:
        raise DomainError(f"{variant.value} variant needs eps > 0")
    return T ** (0.5 + eps)


def count_increase(T: float, variant: "str | CountVariant", eps: float | None = None,
                   psi_value: float | None = None, cfg: PrecisionConfig = DEFAULT_PRECISION) -> CountIncrease:
    """N_0(T + W) - N_0(T) with the window of the chosen variant and its reference lower bound."""
    if not T >= 1e3:
        raise DomainError("count_increase needs T >= 1e3")
    variant = CountVariant.parse(variant)
    w = increase_window(T, variant, eps, psi_value)
    inc = len(_sign_changes(T, T + w, cfg)[0])
    ref = w * math.log(T) if variant is CountVariant.SELBERG else w
    return CountIncrease(T, variant, w, inc, ref, inc / ref)
