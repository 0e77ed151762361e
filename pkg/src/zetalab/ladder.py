"""Jacob's ladder phi_1, its iterations, partition properties and product integrals.

phi_1 is realized through the exact-increment equation

    J(y) - J(T) = (1 - c) T,    y = phi_1^{-1}(T),

with J the Hardy-Littlewood integral (or its smoothed main term on the
``main-term`` backend). phi_1(T) is then the x < T with J(T) - J(x) = (1 - c) x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from .config import Backend, ConvergenceError, DEFAULT_LADDER, DomainError, LadderConfig
from .hl_integral import (JTable, MainTermJ, QuadratureResult, integrate, j_between, oscillation_scale,
                          phase_noise)
from .zeta_core import MIN_HEIGHT

TWO_PI = 2.0 * math.pi
CHEB_DEGREE = 16
MAX_NEWTON = 200

_TABLES: dict = {}
_MAIN = MainTermJ()


def j_model(cfg: LadderConfig, lo: float, hi: float):
    """J backend covering [lo, hi]; quadrature tables are cached and reused across calls."""
    if cfg.backend is Backend.MAIN_TERM:
        return _MAIN
    tables = _TABLES.setdefault(cfg.precision, [])
    for tab in tables:
        # reuse a table that already covers the range or sits close to it
        if tab.lo - 0.1 * lo <= lo and hi <= tab.hi + 0.1 * hi:
            tab.ensure(lo, hi)
            return tab
    tab = JTable(cfg.precision)
    tab.ensure(lo, hi)
    tables.append(tab)
    return tab


def clear_tables() -> None:
    _TABLES.clear()


def _mean_gap(T):
    """Smoothed spacing (1 - c) T / (ln(T/2pi) + 2c) used only for brackets and guesses."""
    T = np.asarray(T, dtype=np.float64)
    return 0.4227843351 * T / (np.maximum(np.log(T / TWO_PI), 0.1) + 1.1544313298)


def _tol(x, cfg: LadderConfig):
    return cfg.root_tol * np.maximum(1.0, np.abs(x))


def _solve_inverse(T: np.ndarray, cfg: LadderConfig, jm, method: str = "newton") -> np.ndarray:
    """Vectorized y > T with J(y) - J(T) = (1 - c) T."""
    T = np.asarray(T, dtype=np.float64)
    target = jm.J(T) + (1.0 - cfg.c) * T
    lo = T.copy()
    hi = T + 3.0 * _mean_gap(T)
    for _ in range(60):
        short = jm.J(hi) < target
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, hi + 3.0 * _mean_gap(hi), hi)
    else:
        raise ConvergenceError("phi1_inverse: could not bracket root", bracket=(lo, hi))
    y = np.minimum(T + _mean_gap(T), 0.5 * (lo + hi)) if method == "newton" else 0.5 * (lo + hi)
    y = np.clip(y, lo, hi)
    return _safeguarded(lambda x, i: jm.J(x) - target[i], lambda x, i: jm.density(x),
                        y, lo, hi, cfg, method, "phi1_inverse")


def _solve_forward(T: np.ndarray, cfg: LadderConfig, jm, method: str = "newton") -> np.ndarray:
    """Vectorized x < T with J(T) - J(x) = (1 - c) x."""
    T = np.asarray(T, dtype=np.float64)
    jt = jm.J(T)
    one_c = 1.0 - cfg.c

    def g(x, i):  # increasing in x
        return jm.J(x) + one_c * x - jt[i]

    def dg(x, i):
        return jm.density(x) + one_c

    hi = T.copy()
    lo = np.maximum(T - 3.0 * _mean_gap(T), 0.5 * T)
    for _ in range(60):
        lo = np.maximum(lo, MIN_HEIGHT)
        high = g(lo, slice(None)) > 0
        if not high.any():
            break
        if np.any(lo[high] <= MIN_HEIGHT):
            raise DomainError("phi1: root falls below the admitted domain t >= 7")
        hi = np.where(high, lo, hi)
        lo = np.where(high, lo - 3.0 * _mean_gap(lo), lo)
    else:
        raise ConvergenceError("phi1: could not bracket root", bracket=(lo, hi))
    x = np.clip(T - _mean_gap(T), lo, hi) if method == "newton" else 0.5 * (lo + hi)
    return _safeguarded(g, dg, x, lo, hi, cfg, method, "phi1")


def _safeguarded(f, df, x, lo, hi, cfg: LadderConfig, method: str, what: str) -> np.ndarray:
    """Newton inside a shrinking bracket for an increasing f; bisection when Newton leaves it."""
    x = x.copy()
    lo = lo.copy()
    hi = hi.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(MAX_NEWTON):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        fx = f(x[idx], idx)
        pos = fx > 0
        hi[idx] = np.where(pos, x[idx], hi[idx])
        lo[idx] = np.where(pos, lo[idx], x[idx])
        mid = 0.5 * (lo[idx] + hi[idx])
        if method == "newton":
            d = df(x[idx], idx)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x[idx] - fx / d
            bad = ~np.isfinite(xn) | (xn <= lo[idx]) | (xn >= hi[idx])
            xn = np.where(bad, mid, xn)
        else:
            xn = mid
        xn = np.where(fx == 0, x[idx], xn)  # an exact root sits on the bracket edge; keep it
        step = np.abs(xn - x[idx])
        # polish well below root_tol: the composition phi1(phi1_inverse(T)) amplifies
        # residuals by phi1'(y), which can be large near zeros of Z
        tol = 1e-3 * _tol(xn, cfg)
        ulp = 4.0 * np.spacing(np.abs(xn))
        done = (step <= np.maximum(tol, ulp)) | (hi[idx] - lo[idx] <= np.maximum(tol, ulp)) | (fx == 0)
        x[idx] = xn
        active[idx[done]] = False
    if active.any():
        raise ConvergenceError(f"{what}: no convergence after {MAX_NEWTON} steps",
                               best=x, bracket=(lo, hi))
    return x


def phi1(T: float, cfg: LadderConfig = DEFAULT_LADDER, method: str = "newton") -> float:
    """Jacob's ladder phi_1(T): the x in (T/2, T) with J(T) - J(x) = (1 - c) x."""
    if not T >= 100:
        raise DomainError(f"phi1 needs T >= 100, got {T}")
    jm = j_model(cfg, T - 3.0 * float(_mean_gap(T)), T)
    return float(_solve_forward(np.array([float(T)]), cfg, jm, method)[0])


def phi1_inverse(T: float, cfg: LadderConfig = DEFAULT_LADDER, method: str = "newton") -> float:
    """phi_1^{-1}(T): the y > T with J(y) - J(T) = (1 - c) T."""
    if not T >= MIN_HEIGHT:
        raise DomainError(f"phi1_inverse needs T >= {MIN_HEIGHT}, got {T}")
    jm = j_model(cfg, T, T + 3.0 * float(_mean_gap(T)))
    return float(_solve_inverse(np.array([float(T)]), cfg, jm, method)[0])


@dataclass(frozen=True)
class ReverseIterates:
    T: float
    k: int
    heights: tuple[float, ...]
    backend: Backend

    def __post_init__(self):
        if len(self.heights) != self.k + 1:
            raise ValueError("heights must hold T^0..T^k")


def reverse_iterates(T: float, k: int, cfg: LadderConfig = DEFAULT_LADDER) -> ReverseIterates:
    """The tower T = T^0 < T^1 < ... < T^k with T^r = phi_1^{-1}(T^{r-1})."""
    if not T >= 100:
        raise DomainError(f"reverse_iterates needs T >= 100, got {T}")
    if not 1 <= k <= 10:
        raise DomainError(f"k must be in 1..10, got {k}")
    return _reverse_iterates(float(T), int(k), cfg)


def _reverse_iterates(T: float, k: int, cfg: LadderConfig) -> ReverseIterates:
    jm = j_model(cfg, T, T + (k + 2) * float(_mean_gap(T)))
    heights = [T]
    for _ in range(k):
        heights.append(float(_solve_inverse(np.array([heights[-1]]), cfg, jm)[0]))
    return ReverseIterates(T, k, tuple(heights), cfg.backend)


def forward_iterate(t: float, r: int, cfg: LadderConfig = DEFAULT_LADDER) -> float:
    """phi_1^r(t); phi_1^0 is the identity."""
    if r < 0:
        raise DomainError("r must be >= 0")
    x = float(t)
    if r == 0:
        return x
    jm = j_model(cfg, max(x - (r + 2) * float(_mean_gap(x)), MIN_HEIGHT), x)
    for _ in range(r):
        if x < 100:
            raise DomainError(f"forward iteration fell below 100 (at {x})")
        x = float(_solve_forward(np.array([x]), cfg, jm)[0])
    return x


def _forward_levels(ts: np.ndarray, levels: int, cfg: LadderConfig, jm) -> np.ndarray:
    """Rows r = 0..levels of phi_1^r evaluated at every t."""
    out = np.empty((levels + 1, ts.size))
    out[0] = ts
    for r in range(1, levels + 1):
        out[r] = _solve_forward(out[r - 1], cfg, jm)
    return out


@dataclass(frozen=True)
class PartitionReport:
    T: float
    k: int
    heights: tuple[float, ...]
    segment_lengths: tuple[float, ...]
    length_ratios: tuple[float, ...]
    segment_integrals: tuple[float, ...]
    integral_ratios: tuple[float, ...]
    whole_integral: QuadratureResult
    err_estimate: float
    backend: Backend

    @property
    def integral_spread(self) -> float:
        """max |ratio - 1| over consecutive segment-integral ratios (0 for k = 1)."""
        return max((abs(q - 1.0) for q in self.integral_ratios), default=0.0)

    @property
    def length_spread(self) -> float:
        return max((abs(q - 1.0) for q in self.length_ratios), default=0.0)


def partition_report(T: float, k: int, cfg: LadderConfig = DEFAULT_LADDER) -> PartitionReport:
    """Segment lengths and Z^2 integrals of the reverse-iterate partition of [T, T^k]."""
    rev = reverse_iterates(T, k, cfg)
    h = rev.heights
    lengths = [h[r] - h[r - 1] for r in range(1, k + 1)]
    jm = j_model(cfg, h[0], h[-1])
    integrals = [jm.diff(h[r - 1], h[r]) for r in range(1, k + 1)]
    if cfg.backend is Backend.QUADRATURE:
        whole = j_between(h[0], h[-1], cfg.precision)
    else:
        whole = QuadratureResult(jm.diff(h[0], h[-1]), 0.0, 1)
    return PartitionReport(
        T=float(T),
        k=k,
        heights=h,
        segment_lengths=tuple(lengths),
        length_ratios=tuple(lengths[r + 1] / lengths[r] for r in range(k - 1)),
        segment_integrals=tuple(integrals),
        integral_ratios=tuple(integrals[r + 1] / integrals[r] for r in range(k - 1)),
        whole_integral=whole,
        err_estimate=float(jm.err_estimate) + whole.err_estimate,
        backend=cfg.backend,
    )


class IterateCache:
    """Piecewise Chebyshev interpolants of phi_1^r(t), r = 1..levels, on [a, b].

    Each piece has degree CHEB_DEGREE; it is accepted once the interpolant
    matches exact root solves at the midpoints between Chebyshev nodes to
    10 * root_tol (relative). Built once, read-only afterwards.
    """

    def __init__(self, a: float, b: float, levels: int, cfg: LadderConfig, jm, max_pieces: int = 4096):
        self.a, self.b, self.levels = a, b, levels
        self.cfg = cfg
        self.pieces: list[tuple[float, float, np.ndarray]] = []
        self.solves = 0
        if levels == 0 or b <= a:
            return
        width0 = 0.5 * float(oscillation_scale(b))
        n0 = max(1, math.ceil((b - a) / width0))
        todo = [(a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0) for i in range(n0)]
        base = np.cos(np.pi * (np.arange(CHEB_DEGREE + 1) + 0.5) / (CHEB_DEGREE + 1))[::-1]
        while todo:
            if len(self.pieces) + len(todo) > max_pieces:
                raise ConvergenceError("iterate cache exceeded its piece budget")
            lo, hi = todo.pop(0)
            nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * base
            checks = 0.5 * (nodes[:-1] + nodes[1:])
            pts = np.concatenate([nodes, checks])
            vals = _forward_levels(pts, levels, cfg, jm)[1:]
            self.solves += levels * pts.size
            u_nodes = (2.0 * nodes - (lo + hi)) / (hi - lo)
            u_checks = (2.0 * checks - (lo + hi)) / (hi - lo)
            coefs = np.array([C.chebfit(u_nodes, vals[r, : nodes.size], CHEB_DEGREE) for r in range(levels)])
            approx = np.array([C.chebval(u_checks, coefs[r]) for r in range(levels)])
            err = np.abs(approx - vals[:, nodes.size:])
            if np.all(err <= 10.0 * _tol(vals[:, nodes.size:], cfg)):
                self.pieces.append((lo, hi, coefs))
            else:
                mid = 0.5 * (lo + hi)
                todo[:0] = [(lo, mid), (mid, hi)]
        self.pieces.sort(key=lambda p: p[0])
        self._lefts = np.array([p[0] for p in self.pieces])

    def __call__(self, t) -> np.ndarray:
        """Rows r = 0..levels of phi_1^r(t)."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.empty((self.levels + 1, t.size))
        out[0] = t
        if self.levels == 0:
            return out
        idx = np.clip(np.searchsorted(self._lefts, t, side="right") - 1, 0, len(self.pieces) - 1)
        for i in np.unique(idx):
            lo, hi, coefs = self.pieces[i]
            sel = idx == i
            u = (2.0 * t[sel] - (lo + hi)) / (hi - lo)
            for r in range(self.levels):
                out[r + 1, sel] = C.chebval(u, coefs[r])
        return out


@dataclass(frozen=True)
class ProductIntegral:
    value: float
    err_estimate: float
    evaluations: int
    lower: float
    upper: float
    pieces: int
    backend: Backend


def product_integral(T: float, l: float, k: int, cfg: LadderConfig = DEFAULT_LADDER) -> ProductIntegral:
    """int over [phi^{-k}(T), phi^{-k}(T+2l)] of prod_{r<k} |zeta(1/2 + i phi^r(t))|^2 dt.

    On the main-term backend |zeta|^2 is replaced by the smoothed density ln(t/2pi) + 2c.
    """
    if not l > 0:
        raise DomainError("l must be > 0")
    if not 1 <= k <= 8:
        raise DomainError(f"k must be in 1..8, got {k}")
    if not T >= 1e3:
        raise DomainError(f"product_integral needs T >= 1e3, got {T}")
    return _product_integral(float(T), float(l), int(k), cfg)


def _product_integral(T: float, l: float, k: int, cfg: LadderConfig) -> ProductIntegral:
    lower = _reverse_iterates(T, k, cfg).heights[-1]
    upper = _reverse_iterates(T + 2.0 * l, k, cfg).heights[-1]
    jm = j_model(cfg, T, upper)
    if upper <= lower:
        # 2l below the root tolerance: the endpoint towers are indistinguishable
        width = lower - upper
        bound = width * float(np.prod(jm.density(np.array(_reverse_iterates(T, k, cfg).heights[1:]))))
        return ProductIntegral(0.0, bound, 0, lower, lower, 0, cfg.backend)
    cache = IterateCache(lower, upper, k - 1, cfg, jm)

    def integrand(t):
        rows = cache(t)
        return np.prod(jm.density(rows.ravel()).reshape(rows.shape), axis=0)

    noise = k * phase_noise(upper) if cfg.backend is Backend.QUADRATURE else 0.0
    res = integrate(integrand, lower, upper, cfg.precision, scale=oscillation_scale, noise=noise)
    return ProductIntegral(res.value, res.err_estimate, res.evaluations, lower, upper,
                           len(cache.pieces), cfg.backend)
