"""Quadrature of Z^2 (the Hardy-Littlewood integral) and of general integrands.

Panels carry an 8-point Gauss-Legendre rule; each panel is compared with
the same rule on its two halves and bisected until the two agree. For Z^2
the initial panels are at most a quarter of the local oscillation scale
2*pi / ln(t/2pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels as K
from .config import (
    Backend,
    ConvergenceError,
    DEFAULT_PRECISION,
    DomainError,
    EULER_GAMMA,
    PrecisionConfig,
)
from .zeta_core import MIN_HEIGHT

TWO_PI = 2.0 * math.pi
GL_ORDER = 8
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
MAX_SPLITS = 24
NOISE_FACTOR = 64.0
BLOCK = 64.0  # canonical panel blocks: [64k, 64(k+1)) clipped to t >= 7


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    err_estimate: float
    evaluations: int


def oscillation_scale(t) -> np.ndarray:
    """Local period 2*pi / ln(t/2pi) of Z^2 (capped for t near 2*pi)."""
    t = np.asarray(t, dtype=np.float64)
    return TWO_PI / np.maximum(np.log(t / TWO_PI), 1.0)


def _z2_eval(cfg: PrecisionConfig):
    def evaluate(lefts: np.ndarray, widths: np.ndarray):
        coarse, fine = K.z2_panels(
            np.ascontiguousarray(lefts), np.ascontiguousarray(widths), GL_NODES, GL_WEIGHTS,
            cfg.theta_correction_terms, cfg.rs_correction_order, K.LOGS, K.RSQ, K.RS_POLY,
        )
        return coarse, fine, 3 * GL_ORDER * lefts.shape[0]

    return evaluate


def _callable_eval(f: Callable):
    x_half = 0.5 * (GL_NODES + 1.0)

    def evaluate(lefts: np.ndarray, widths: np.ndarray):
        h = widths[:, None]
        a = lefts[:, None]
        xc = a + h * x_half
        xf = np.concatenate([a + 0.5 * h * x_half, a + 0.5 * h + 0.5 * h * x_half], axis=1)
        fc = np.asarray(f(xc.ravel()), dtype=np.float64).reshape(xc.shape)
        ff = np.asarray(f(xf.ravel()), dtype=np.float64).reshape(xf.shape)
        coarse = 0.5 * widths * (fc @ GL_WEIGHTS)
        fine = 0.25 * widths * (ff[:, :GL_ORDER] @ GL_WEIGHTS + ff[:, GL_ORDER:] @ GL_WEIGHTS)
        return coarse, fine, 3 * GL_ORDER * lefts.shape[0]

    return evaluate


def phase_noise(t: float) -> float:
    """Relative noise floor of Z at height t: phases t*ln(n) carry rounding of order eps*t*ln(t)."""
    return NOISE_FACTOR * np.finfo(np.float64).eps * t * math.log(max(t, math.e))


def _adaptive(evaluate, lefts: np.ndarray, widths: np.ndarray, cfg: PrecisionConfig,
              total_length: float, noise: float = 0.0):
    """Bisect panels until whole-panel and two-half rules agree.

    Returns (lefts, widths, values, errors, evaluations) for the accepted panels,
    sorted by left edge.
    """
    acc_l, acc_w, acc_v, acc_e = [], [], [], []
    evaluations = 0
    unresolved = 0
    mean_abs = None
    for depth in range(MAX_SPLITS + 1):
        if lefts.size == 0:
            break
        coarse, fine, n = evaluate(lefts, widths)
        evaluations += n
        if mean_abs is None:
            # panels where the integrand nearly vanishes get a width share of the global budget
            mean_abs = float(np.sum(np.abs(fine)) / np.sum(widths))
        diff = np.abs(coarse - fine)
        allow = np.maximum(cfg.quad_rel_tol * np.maximum(np.abs(fine), mean_abs * widths),
                           cfg.quad_abs_tol * widths / total_length)
        allow = np.maximum(allow, noise * mean_abs * widths)
        ok = diff <= allow
        if depth == MAX_SPLITS:
            unresolved = int(np.count_nonzero(~ok))
            ok[:] = True
        acc_l.append(lefts[ok])
        acc_w.append(widths[ok])
        acc_v.append(fine[ok])
        acc_e.append(diff[ok])
        bad_l, bad_w = lefts[~ok], widths[~ok]
        lefts = np.concatenate([bad_l, bad_l + 0.5 * bad_w])
        widths = np.concatenate([0.5 * bad_w, 0.5 * bad_w])
    L = np.concatenate(acc_l) if acc_l else np.empty(0)
    order = np.argsort(L, kind="stable")
    W = np.concatenate(acc_w)[order] if acc_w else np.empty(0)
    V = np.concatenate(acc_v)[order] if acc_v else np.empty(0)
    E = np.concatenate(acc_e)[order] if acc_e else np.empty(0)
    return L[order], W, V, E, evaluations, unresolved


def z2_panel_edges(a: float, b: float) -> np.ndarray:
    """Canonical panel edges on [a, b]: uniform inside fixed blocks, width <= scale/4."""
    if b <= a:
        return np.array([a])
    k0 = math.floor(a / BLOCK)
    k1 = math.ceil(b / BLOCK)
    pieces = []
    for k in range(k0, k1):
        lo = max(k * BLOCK, MIN_HEIGHT)
        hi = (k + 1) * BLOCK
        if hi <= lo:
            continue
        n = max(1, math.ceil((hi - lo) / (0.25 * float(oscillation_scale(hi)))))
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    grid = np.concatenate(pieces) if pieces else np.empty(0)
    inner = grid[(grid > a) & (grid < b)]
    return np.concatenate([[a], inner, [b]])


def _finish(values, errors, evaluations, unresolved, what: str) -> QuadratureResult:
    res = QuadratureResult(math.fsum(values), float(np.sum(errors)), int(evaluations))
    if unresolved:
        raise ConvergenceError(f"{what}: {unresolved} panels did not meet tolerance", best=res)
    return res


def j_between(a: float, b: float, cfg: PrecisionConfig = DEFAULT_PRECISION) -> QuadratureResult:
    """int_a^b Z(t)^2 dt = J(b) - J(a)."""
    if not (MIN_HEIGHT <= a <= b):
        raise DomainError(f"need 7 <= a <= b, got [{a}, {b}]")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    edges = z2_panel_edges(a, b)
    _, _, V, E, n, bad = _adaptive(_z2_eval(cfg), edges[:-1], np.diff(edges), cfg, b - a, phase_noise(b))
    return _finish(V, E, n, bad, "j_between")


def integrate(f: Callable, a: float, b: float, cfg: PrecisionConfig = DEFAULT_PRECISION,
              panels: int = 1, scale: Callable | None = None, noise: float = 0.0) -> QuadratureResult:
    """Adaptive GL8 integral of a vectorized integrand f over [a, b].

    ``scale(t)`` (optional) gives a local oscillation length; initial panels are
    then no wider than a quarter of it. ``noise`` is the integrand's relative
    evaluation noise; panels are not refined below it.
    """
    if not a <= b:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if scale is not None:
        n = max(panels, math.ceil((b - a) / (0.25 * float(np.min(scale(np.array([a, b])))))))
    else:
        n = panels
    edges = np.linspace(a, b, n + 1)
    _, _, V, E, m, bad = _adaptive(_callable_eval(f), edges[:-1], np.diff(edges), cfg, b - a, noise)
    return _finish(V, E, m, bad, "integrate")


def j_main_term(T: float) -> float:
    """Smoothed Hardy-Littlewood integral T ln(T/2pi) - (1 - 2c) T, c = Euler's constant."""
    return T * math.log(T / TWO_PI) - (1.0 - 2.0 * EULER_GAMMA) * T


def j_main_density(t):
    """d/dT of j_main_term: ln(T/2pi) + 2c."""
    return np.log(np.asarray(t, dtype=np.float64) / TWO_PI) + 2.0 * EULER_GAMMA


class JTable:
    """Cumulative Z^2 integral on canonical panels, extended on demand.

    ``diff(a, b)`` returns J(b) - J(a) from table prefix sums plus a partial
    Gauss-Legendre panel at each end. Immutable between extensions, so it can
    be shared by every root solve inside one ladder computation.
    """

    backend = Backend.QUADRATURE

    def __init__(self, cfg: PrecisionConfig = DEFAULT_PRECISION):
        self.cfg = cfg
        self.lo = None
        self.hi = None
        self._edges = np.empty(0)  # left edges of accepted panels + final right edge
        self._prefix = np.zeros(1)
        self._values = np.empty(0)
        self._errs = np.empty(0)
        self._offset = 0.0
        self._err = 0.0
        self.evaluations = 0

    @property
    def err_estimate(self) -> float:
        return self._err

    def _build(self, a: float, b: float):
        edges = z2_panel_edges(a, b)
        L, W, V, E, n, bad = _adaptive(_z2_eval(self.cfg), edges[:-1], np.diff(edges), self.cfg, b - a,
                                       phase_noise(b))
        if bad:
            raise ConvergenceError(f"J table panels on [{a}, {b}] did not converge")
        self.evaluations += n
        return L, W, V, E

    def ensure(self, a: float, b: float) -> None:
        a = max(float(a), MIN_HEIGHT)
        b = float(b)
        if self.lo is None:
            lo = max(math.floor(a / BLOCK) * BLOCK, MIN_HEIGHT)
            hi = math.ceil(b / BLOCK) * BLOCK
            L, W, V, E = self._build(lo, hi)
            self._set(L, V, hi, E, 0.0)
            self.lo, self.hi = lo, hi
            return
        if a < self.lo:
            lo = max(math.floor(a / BLOCK) * BLOCK, MIN_HEIGHT)
            # grow geometrically to keep extensions rare
            lo = max(min(lo, self.lo - 0.25 * (self.hi - self.lo)), MIN_HEIGHT)
            L, W, V, E = self._build(lo, self.lo)
            offset = self._offset - math.fsum(V)
            self._set(np.concatenate([L, self._edges[:-1]]), np.concatenate([V, self._values]), self.hi,
                      np.concatenate([E, self._errs]), offset)
            self.lo = lo
        if b > self.hi:
            hi = math.ceil(b / BLOCK) * BLOCK
            hi = max(hi, self.hi + 0.25 * (self.hi - self.lo))
            L, W, V, E = self._build(self.hi, hi)
            self._set(np.concatenate([self._edges[:-1], L]), np.concatenate([self._values, V]), hi,
                      np.concatenate([self._errs, E]), self._offset)
            self.hi = hi

    def _set(self, lefts, values, right, errs, offset):
        self._edges = np.concatenate([lefts, [right]])
        self._values = values
        self._errs = errs
        self._prefix = K.neumaier_prefix(values)
        self._offset = offset
        self._err = float(np.sum(errs))

    def J(self, x) -> np.ndarray:
        """J(x) relative to this table's fixed origin (the first height it was built from)."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if x.size == 0:
            return x
        self.ensure(float(x.min()), float(x.max()))
        idx = np.clip(np.searchsorted(self._edges, x, side="right") - 1, 0, self._edges.size - 2)
        left = self._edges[idx]
        h = x - left
        nodes = left[:, None] + 0.5 * h[:, None] * (GL_NODES[None, :] + 1.0)
        z = K.z_batch(np.ascontiguousarray(nodes.ravel()), self.cfg.theta_correction_terms,
                      self.cfg.rs_correction_order, K.LOGS, K.RSQ, K.RS_POLY).reshape(nodes.shape)
        partial = 0.5 * h * ((z * z) @ GL_WEIGHTS)
        return self._offset + self._prefix[idx] + partial

    def diff(self, a: float, b: float) -> float:
        ja, jb = self.J(np.array([a, b], dtype=np.float64))
        return float(jb - ja)

    def density(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        z = K.z_batch(np.ascontiguousarray(x), self.cfg.theta_correction_terms, self.cfg.rs_correction_order,
                      K.LOGS, K.RSQ, K.RS_POLY)
        return z * z


class MainTermJ:
    """Smoothed stand-in for JTable: J(x) = x ln(x/2pi) - (1-2c) x, density ln(x/2pi) + 2c."""

    backend = Backend.MAIN_TERM
    err_estimate = 0.0
    evaluations = 0

    def ensure(self, a: float, b: float) -> None:
        return None

    def J(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return x * np.log(x / TWO_PI) - (1.0 - 2.0 * EULER_GAMMA) * x

    def diff(self, a: float, b: float) -> float:
        return j_main_term(b) - j_main_term(a)

    def density(self, x):
        return j_main_density(np.atleast_1d(x))
