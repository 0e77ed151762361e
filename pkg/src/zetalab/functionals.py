"""Finite-tau evaluators of the Gram-sum / product-integral functionals and Fermat rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .config import Backend, DEFAULT_LADDER, DomainError, LadderConfig, WindowRangeError
from .gram import GramSum, WindowKind, make_window, window_sum
from .hl_integral import MainTermJ, j_between
from .ladder import ProductIntegral, phi1_inverse, product_integral

FOUR_PI = 4.0 * math.pi
LADDER_DEPTH = 7
QUADRATURE_CAP = 1e8  # heights above this are refused on the quadrature backend
TREND_SWITCH = 1e6  # trend runs switch to the main-term backend above this height


def backend_for(T: float) -> Backend:
    """Default backend for a trend run at height T."""
    return Backend.QUADRATURE if T <= TREND_SWITCH else Backend.MAIN_TERM


@dataclass(frozen=True)
class FermatRational:
    """(x^n + y^n) / z^n held exactly."""

    x: int
    y: int
    z: int
    n: int

    def __post_init__(self):
        for name in ("x", "y", "z", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise DomainError(f"{name} must be an integer, got {v!r}")
        if min(self.x, self.y, self.z) < 1:
            raise DomainError("x, y, z must be >= 1")
        if self.n < 3:
            raise DomainError("n must be >= 3")

    @property
    def numerator(self) -> int:
        return self.x**self.n + self.y**self.n

    @property
    def denominator(self) -> int:
        return self.z**self.n

    @property
    def exact(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def is_one(self) -> bool:
        return self.numerator == self.denominator

    @property
    def value(self) -> float:
        """Float value; OverflowError when it leaves the double range."""
        return float(self.exact)


def fermat_value(x: int, y: int, z: int, n: int) -> FermatRational:
    return FermatRational(x, y, z, n)


def fermat_tuples(bound: int, n_min: int = 3, n_max: int = 7):
    """All (x, y, z, n) with 1 <= x, y, z <= bound and n_min <= n <= n_max."""
    for n in range(n_min, n_max + 1):
        for x in range(1, bound + 1):
            for y in range(1, bound + 1):
                for z in range(1, bound + 1):
                    yield x, y, z, n


def fermat_scan(bound: int, n_min: int = 3, n_max: int = 7) -> list[FermatRational]:
    """Every enumerated rational equal to 1, by exact integer comparison."""
    if n_min < 3:
        raise DomainError("n_min must be >= 3")
    hits = []
    for n in range(n_min, n_max + 1):
        powers = [k**n for k in range(bound + 1)]
        targets = {powers[z]: z for z in range(1, bound + 1)}
        for x in range(1, bound + 1):
            for y in range(1, bound + 1):
                z = targets.get(powers[x] + powers[y])
                if z is not None:
                    hits.append(FermatRational(x, y, z, n))
    return hits


@dataclass(frozen=True)
class FunctionalEstimate:
    tau: float
    alpha: float
    l: float
    value: float
    target: float
    rel_gap: float
    T: float
    backend: Backend
    quad_rel_tol: float


def _rel_gap(value: float, target: float) -> float:
    return abs(value - target) / abs(target) if target != 0 else abs(value - target)


def _gram_sum(T: float, cfg: LadderConfig) -> GramSum:
    return window_sum(make_window(T, WindowKind.H), 0, cfg.precision, cfg.backend)


@dataclass(frozen=True)
class Lemma2Ratio:
    T: float
    l: float
    gram_sum: GramSum
    product: ProductIntegral
    lhs_ratio: float
    predicted: float
    rel_gap: float
    backend: Backend


def lemma2_predicted(T: float, l: float) -> float:
    return T ** (1 / 6) / (FOUR_PI * l)


def lemma2_ratio(T: float, l: float, cfg: LadderConfig = DEFAULT_LADDER) -> Lemma2Ratio:
    """Even Gram sum over the kind-H window divided by the depth-7 product integral."""
    if not T >= 1e3:
        raise DomainError("lemma2_ratio needs T >= 1e3")
    if not l > 0:
        raise DomainError("l must be > 0")
    gs = _gram_sum(T, cfg)
    prod = product_integral(T, l, LADDER_DEPTH, cfg)
    lhs = gs.value / prod.value
    pred = lemma2_predicted(T, l)
    return Lemma2Ratio(T, l, gs, prod, lhs, pred, _rel_gap(lhs, pred), cfg.backend)


def theorem1_height(alpha: float, tau: float) -> float:
    return (FOUR_PI * alpha * tau) ** 6


def theorem1_estimate(alpha: float, l: float, tau: float, cfg: LadderConfig = DEFAULT_LADDER) -> FunctionalEstimate:
    """(1/tau) * lemma2 ratio at T = (4 pi alpha tau)^6, against the target alpha / l."""
    if not (alpha > 0 and l > 0 and tau > 0):
        raise DomainError("alpha, l and tau must be > 0")
    T = theorem1_height(alpha, tau)
    if cfg.backend is Backend.QUADRATURE and T > QUADRATURE_CAP:
        raise WindowRangeError(f"T = {T:.3e} exceeds the quadrature cap {QUADRATURE_CAP:.0e}; use main-term")
    lr = lemma2_ratio(T, l, cfg)
    value = lr.lhs_ratio / tau
    target = alpha / l
    return FunctionalEstimate(tau, alpha, l, value, target, _rel_gap(value, target), T, cfg.backend,
                              cfg.precision.quad_rel_tol)


def prop1_estimate(alpha: float, fr: FermatRational, tau: float,
                   cfg: LadderConfig = DEFAULT_LADDER) -> FunctionalEstimate:
    """theorem1_estimate with l replaced by a Fermat rational."""
    return theorem1_estimate(alpha, fr.value, tau, cfg)


@dataclass(frozen=True, slots=True)
class ConditionGap:
    """One enumerated rational: the exact target gap |alpha| |1/FR - 1| and, optionally, a numerical one."""

    fr: FermatRational
    exact_gap: float
    exact_gap_positive: bool  # decided in integer arithmetic: FR != 1
    numeric_gap: float | None


def zeta_condition_gap(alpha: float, bound: int, n_max: int, tau: float | None = None,
                       cfg: LadderConfig = DEFAULT_LADDER, n_min: int = 3) -> list[ConditionGap]:
    """Target gaps over x, y, z <= bound, n_min <= n <= n_max.

    With ``tau`` given, each distinct rational also gets the finite-tau gap
    |prop1_estimate - alpha| (expensive; keep the enumeration small).
    """
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    if bound < 0 or n_max < n_min:
        return []
    numeric: dict[Fraction, float] = {}
    out = []
    for n in range(n_min, n_max + 1):
        powers = [k**n for k in range(bound + 1)]
        for x in range(1, bound + 1):
            for y in range(1, bound + 1):
                s = powers[x] + powers[y]
                for z in range(1, bound + 1):
                    d = powers[z]
                    fr = FermatRational(x, y, z, n)
                    # |alpha/FR - alpha| = alpha |z^n - s| / s
                    gap = alpha * float(Fraction(abs(d - s), s))
                    num = None
                    if tau is not None:
                        key = Fraction(s, d)
                        if key not in numeric:
                            numeric[key] = abs(prop1_estimate(alpha, fr, tau, cfg).value - alpha)
                        num = numeric[key]
                    out.append(ConditionGap(fr, gap, d != s, num))
    return out


def _increment(tau: float, cfg: LadderConfig) -> tuple[float, float]:
    """(phi1_inverse(tau), int_tau^{phi1_inverse(tau)} of the backend density)."""
    y = phi1_inverse(tau, cfg)
    if cfg.backend is Backend.QUADRATURE:
        return y, j_between(tau, y, cfg.precision).value
    return y, MainTermJ().diff(tau, y)


@dataclass(frozen=True)
class Lemma3Check:
    tau: float
    T: float
    l: float
    lhs: float
    increment: float
    product: float
    rhs: float
    ratio: float
    rhs_exact_increment: float  # rhs with the increment replaced by (1 - c) tau
    backend: Backend


def lemma3_check(tau: float, l: float, cfg: LadderConfig = DEFAULT_LADDER) -> Lemma3Check:
    """Gram sum at T = tau^6 against (1/(4 pi (1-c) l)) * J-increment over [tau, phi1^{-1}(tau)] * product."""
    if not l > 0:
        raise DomainError("l must be > 0")
    T = tau**6
    lhs = _gram_sum(T, cfg).value
    _, inc = _increment(tau, cfg)
    prod = product_integral(T, l, LADDER_DEPTH, cfg).value
    scale = 1.0 / (FOUR_PI * (1.0 - cfg.c) * l)
    rhs = scale * inc * prod
    return Lemma3Check(tau, T, l, lhs, inc, prod, rhs, lhs / rhs,
                       scale * (1.0 - cfg.c) * tau * prod, cfg.backend)


def equilibrium_l(c: float) -> float:
    """l with 2l = 1/(2 pi (1 - c))."""
    return 1.0 / (FOUR_PI * (1.0 - c))


@dataclass(frozen=True)
class Theorem3Equilibrium:
    tau: float
    T: float
    l: float
    gram_sum: float
    increment: float
    product: float
    ratio: float
    backend: Backend


def theorem3_equilibrium(tau: float, cfg: LadderConfig = DEFAULT_LADDER) -> Theorem3Equilibrium:
    """The three factors at the equilibrium l and the ratio gram_sum / (increment * product)."""
    T = tau**6
    l = equilibrium_l(cfg.c)
    gs = _gram_sum(T, cfg).value
    _, inc = _increment(tau, cfg)
    prod = product_integral(T, l, LADDER_DEPTH, cfg).value
    return Theorem3Equilibrium(tau, T, l, gs, inc, prod, gs / (inc * prod), cfg.backend)
