"""Gram points, summation windows and the discrete sums over them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import lambertw

from . import _kernels as K
from .config import Backend, ConvergenceError, DEFAULT_PRECISION, DomainError, PrecisionConfig
from .zeta_core import MIN_HEIGHT, theta

TWO_PI = 2.0 * math.pi
DEFAULT_TITCHMARSH_M = 100


@dataclass(frozen=True)
class GramPoint:
    nu: int
    t: float


class WindowKind(str, enum.Enum):
    H1 = "H1"  # T^{3/4} psi sqrt(ln T)
    H2 = "H2"  # T^{1/6} psi ln^5 T
    H = "H"  # T^{1/6} ln^6 T

    @classmethod
    def parse(cls, value: "str | WindowKind") -> "WindowKind":
        if isinstance(value, WindowKind):
            return value
        return cls(value.upper())


@dataclass(frozen=True)
class SumWindow:
    T: float
    H: float
    kind: WindowKind
    psi_value: float | None = None

    @property
    def end(self) -> float:
        return self.T + self.H


@dataclass(frozen=True)
class GramSum:
    """A window sum together with its bookkeeping."""

    value: float
    count: int
    max_residual: float
    backend: Backend
    partitions: int


def gram_point(nu: int, cfg: PrecisionConfig = DEFAULT_PRECISION) -> GramPoint:
    """Solve theta(t) = pi*nu by bracketed Newton with bisection fallback."""
    if int(nu) != nu or nu < 1:
        raise DomainError(f"Gram index must be a positive integer, got {nu!r}")
    nus = np.array([int(nu)], dtype=np.int64)
    t, res, ok = K.gram_batch(nus, cfg.theta_correction_terms, cfg.root_tol, 200)
    if not ok[0]:
        raise ConvergenceError(
            f"theta(t) = pi*{nu} residual {res[0]:.3e} exceeds root_tol {cfg.root_tol:.1e}",
            best=float(t[0]),
        )
    return GramPoint(int(nu), float(t[0]))


def gram_heights(nus, cfg: PrecisionConfig = DEFAULT_PRECISION, check: bool = True) -> np.ndarray:
    """Vectorized Gram heights for an array of indices (ascending runs are solved incrementally)."""
    nus = np.ascontiguousarray(np.asarray(nus, dtype=np.int64))
    if nus.size == 0:
        return np.empty(0)
    if nus.min() < 1:
        raise DomainError("Gram indices must be >= 1")
    t, res, ok = K.gram_batch(nus, cfg.theta_correction_terms, cfg.root_tol, 200)
    if check and not ok.all():
        bad = int(np.argmin(ok))
        raise ConvergenceError(
            f"Gram point nu={nus[bad]} residual {res[bad]:.3e} exceeds root_tol", best=float(t[bad])
        )
    return t


def _index_range(a: float, b: float, cfg: PrecisionConfig) -> tuple[int, int]:
    lo = max(1, math.ceil(theta(a, cfg) / math.pi - 1e-12))
    hi = math.floor(theta(b, cfg) / math.pi + 1e-12)
    return lo, hi


def gram_points_in(a: float, b: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> list[GramPoint]:
    """All Gram points with a <= t <= b, ascending."""
    if not (MIN_HEIGHT <= a <= b):
        raise DomainError(f"need 7 <= a <= b, got [{a}, {b}]")
    lo, hi = _index_range(a, b, cfg)
    if hi < lo:
        return []
    nus = np.arange(lo, hi + 1, dtype=np.int64)
    ts = gram_heights(nus, cfg)
    return [GramPoint(int(n), float(t)) for n, t in zip(nus, ts) if a <= t <= b]


def make_window(T: float, kind: "str | WindowKind" = WindowKind.H, psi_value: float | None = None,
                check_psi_bound: bool = True) -> SumWindow:
    """Summation window [T, T+H] of the given kind.

    H1: T^{3/4} psi sqrt(ln T); H2: T^{1/6} psi ln^5 T with 0 < psi < (1/6) ln T / ln ln T;
    H: T^{1/6} ln^6 T (no psi).
    """
    kind = WindowKind.parse(kind)
    if not T >= MIN_HEIGHT:
        raise DomainError(f"window base {T!r} below {MIN_HEIGHT}")
    L = math.log(T)
    if kind is WindowKind.H:
        return SumWindow(T, T ** (1 / 6) * L**6, kind, None)
    if psi_value is None or not psi_value > 0:
        raise DomainError(f"window kind {kind.value} needs psi_value > 0")
    if kind is WindowKind.H1:
        return SumWindow(T, T**0.75 * psi_value * math.sqrt(L), kind, psi_value)
    bound = L / (6.0 * math.log(L))
    if check_psi_bound and not psi_value < bound:
        raise DomainError(f"H2 window needs psi < (1/6) lnT/lnlnT = {bound:.6g}, got {psi_value}")
    return SumWindow(T, T ** (1 / 6) * psi_value * L**5, kind, psi_value)


def _parity_range(lo: int, hi: int, parity: int) -> tuple[int, int]:
    first = lo if lo % 2 == parity else lo + 1
    last = hi if hi % 2 == parity else hi - 1
    return first, last


@lru_cache(maxsize=64)
def _window_sum(T: float, end: float, parity: int, cfg: PrecisionConfig, backend: Backend,
                partitions: int) -> GramSum:
    lo, hi = _index_range(T, end, cfg)
    first, last = _parity_range(lo, hi, parity)
    if last < first:
        return GramSum(0.0, 0, 0.0, backend, partitions)
    count = (last - first) // 2 + 1
    if backend is Backend.MAIN_TERM:
        # mean of (-1)^nu Z(t_nu) is 2
        return GramSum(2.0 * count, count, 0.0, backend, partitions)
    sign = 1.0 if parity == 0 else -1.0
    # contiguous index blocks, each compensated, merged by an exactly rounded sum
    edges = np.linspace(0, count, partitions + 1).round().astype(np.int64)
    parts = []
    worst = 0.0
    for i in range(partitions):
        if edges[i + 1] <= edges[i]:
            continue
        a = first + 2 * int(edges[i])
        b = first + 2 * (int(edges[i + 1]) - 1)
        val, _, resid, _, _ = K.gram_stream_sum(
            a, b, 2, sign, cfg.theta_correction_terms, cfg.rs_correction_order, cfg.root_tol,
            K.LOGS, K.RSQ, K.RS_POLY,
        )
        parts.append(val)
        worst = max(worst, resid)
    return GramSum(math.fsum(parts), count, worst, backend, partitions)


def window_sum(w: SumWindow, parity: int, cfg: PrecisionConfig = DEFAULT_PRECISION,
               backend: "str | Backend" = Backend.QUADRATURE, partitions: int = 1) -> GramSum:
    """Sum over Gram points of one parity in [T, T+H], written through zeta(1/2+it_nu).

    Even indices contribute Z(t_nu) = zeta(1/2+it_nu); odd indices contribute
    zeta(1/2+it_nu) = -Z(t_nu).
    """
    if parity not in (0, 1):
        raise DomainError("parity must be 0 or 1")
    if partitions < 1:
        raise DomainError("partitions must be >= 1")
    return _window_sum(float(w.T), float(w.end), parity, cfg, Backend.parse(backend), int(partitions))


def sum_even(w: SumWindow, cfg: PrecisionConfig = DEFAULT_PRECISION,
             backend: "str | Backend" = Backend.QUADRATURE) -> float:
    return window_sum(w, 0, cfg, backend).value


def sum_odd(w: SumWindow, cfg: PrecisionConfig = DEFAULT_PRECISION,
            backend: "str | Backend" = Backend.QUADRATURE) -> float:
    return window_sum(w, 1, cfg, backend).value


@dataclass(frozen=True)
class Lemma1Estimate:
    T: float
    sum: float
    main_term: float
    rel_dev: float
    count: int
    backend: Backend


def lemma1_main_term(T: float) -> float:
    return T ** (1 / 6) * math.log(T) ** 7 / TWO_PI


def lemma1_estimate(T: float, cfg: PrecisionConfig = DEFAULT_PRECISION,
                    backend: "str | Backend" = Backend.QUADRATURE) -> Lemma1Estimate:
    """Even-index Gram sum over the kind-H window against (1/2pi) T^{1/6} ln^7 T."""
    if not T >= 1e3:
        raise DomainError("lemma1_estimate needs T >= 1e3")
    res = window_sum(make_window(T, WindowKind.H), 0, cfg, backend)
    main = lemma1_main_term(T)
    return Lemma1Estimate(T, res.value, main, res.value / main - 1.0, res.count, res.backend)


def titchmarsh_pair_sum(M: int, N: int, cfg: PrecisionConfig = DEFAULT_PRECISION) -> float:
    """sum_{nu=M+1}^{N} Z^2(t_nu) Z^2(t_{nu+1})."""
    if not (1 <= M < N):
        raise DomainError(f"need 1 <= M < N, got M={M}, N={N}")
    ts = gram_heights(np.arange(M + 1, N + 2, dtype=np.int64), cfg)
    prods = K.pair_products(ts, cfg.theta_correction_terms, cfg.rs_correction_order, K.LOGS, K.RSQ, K.RS_POLY)
    return math.fsum(prods)


def index_height(N: float) -> float:
    """Height T with (1/2pi) T ln T = N (the crude index-height relation)."""
    # T ln T = 2 pi N  ->  T = 2 pi N / W(2 pi N)
    x = TWO_PI * N
    return float(x / lambertw(x).real)
