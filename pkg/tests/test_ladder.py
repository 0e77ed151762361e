import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zetalab.config import Backend, DEFAULT_LADDER, DomainError, LadderConfig
from zetalab.hl_integral import MainTermJ, j_between, j_main_density
from zetalab.ladder import (
    forward_iterate,
    partition_report,
    phi1,
    phi1_inverse,
    product_integral,
    reverse_iterates,
)
from zetalab.zeta_core import zeta_abs_sq

QUAD = DEFAULT_LADDER
MAIN = DEFAULT_LADDER.with_backend("main-term")
ONE_MINUS_C = 1.0 - QUAD.c


def pullback_product(T, l, k, cfg):
    """Product integral through the substitution s = phi^k(t).

    The defining relation D(u) du = (D(phi(u)) + 1 - c) dphi(u) turns the
    integral into int_T^{T+2l} prod_{j<k} (D(phi^{-j}(s)) + 1 - c) ds, which only
    needs reverse iterates. The s-form has steep spots where phi^{-1} stretches,
    so QUADPACK's adaptive rule does the integration.
    """
    density = zeta_abs_sq if cfg.backend is Backend.QUADRATURE else j_main_density

    def f(s):
        v, u = 1.0, s
        for j in range(k):
            if j:
                u = phi1_inverse(u, cfg)
            v *= float(density(u)) + 1.0 - cfg.c
        return v

    return quad(f, T, T + 2 * l, limit=4000, epsrel=1e-10, epsabs=0)[0]


@pytest.mark.parametrize("T", [1e3, 1e4, 1e5])
def test_inverse_composition(T):
    assert phi1(phi1_inverse(T)) == pytest.approx(T, rel=1e-9)


def test_phi1_lag_at_1e4():
    T = 1e4
    x = phi1(T)
    assert T / 2 < x < T
    assert 0.8 < (T - x) * math.log(T) / (ONE_MINUS_C * T) < 1.2


def test_newton_and_bisection_agree():
    T = 1e4
    assert phi1(T, method="bisect") == pytest.approx(phi1(T, method="newton"), rel=1e-10)
    assert phi1_inverse(T, method="bisect") == pytest.approx(phi1_inverse(T), rel=1e-10)


@pytest.mark.parametrize("T", [1e3, 1e4])
def test_exact_increment(T):
    y = phi1_inverse(T)
    r = j_between(T, y)
    # root tolerance on y moves the integral by about Z^2(y) * tol * y
    slack = r.err_estimate + 1e-9 * r.value
    assert abs(r.value - ONE_MINUS_C * T) <= slack


def test_inverse_step_size():
    T = 1e4
    y = phi1_inverse(T)
    assert y - T == pytest.approx(ONE_MINUS_C * T / math.log(T), rel=0.2)


def test_domains():
    with pytest.raises(DomainError):
        phi1(50.0)
    with pytest.raises(DomainError):
        reverse_iterates(1e3, 0)
    with pytest.raises(DomainError):
        reverse_iterates(1e3, 11)
    with pytest.raises(DomainError):
        product_integral(500.0, 1.0, 2)
    with pytest.raises(DomainError):
        product_integral(1e3, 1.0, 9)
    with pytest.raises(DomainError):
        product_integral(1e3, 0.0, 2)


def test_reverse_single_step():
    r = reverse_iterates(1e4, 1)
    assert r.heights == (1e4, phi1_inverse(1e4))


def test_reverse_tower_at_1e5():
    T, k = 1e5, 7
    h = reverse_iterates(T, k).heights
    assert len(h) == 8
    assert all(b > a for a, b in zip(h, h[1:]))
    assert all(1 < x / T < 1.5 for x in h[1:])
    ratios = [(h[r + 1] - h[r]) / (h[r] - h[r - 1]) for r in range(1, k)]
    assert all(0.9 < q < 1.1 for q in ratios)
    assert h[-1] / T <= 1 + 8 * ONE_MINUS_C / math.log(T) * 1.2
    for r in range(1, k + 1):
        assert phi1(h[r]) == pytest.approx(h[r - 1], rel=1e-9)


def test_forward_identity():
    assert forward_iterate(12345.6, 0) == 12345.6
    with pytest.raises(DomainError):
        forward_iterate(1e3, -1)


def test_forward_undoes_reverse():
    T, k = 1e4, 4
    top = reverse_iterates(T, k).heights[-1]
    assert forward_iterate(top, k) == pytest.approx(T, rel=1e-8)


def test_forward_two_steps():
    t = 1e5
    assert forward_iterate(t, 2) == pytest.approx(phi1(phi1(t)), rel=1e-12)


def test_forward_underflow():
    with pytest.raises(DomainError):
        forward_iterate(130.0, 10)


def test_partition_single_segment():
    p = partition_report(1e4, 1)
    assert len(p.segment_lengths) == 1
    assert p.length_ratios == () and p.integral_ratios == ()
    assert p.integral_spread == 0.0
    assert p.segment_integrals[0] == pytest.approx(ONE_MINUS_C * 1e4, rel=1e-9)


def test_partition_additivity_and_ratios():
    p = partition_report(1e4, 5)
    assert math.fsum(p.segment_integrals) == pytest.approx(p.whole_integral.value, abs=p.err_estimate + 1e-8)
    assert all(0.9 < q < 1.1 for q in p.integral_ratios)
    for r, v in enumerate(p.segment_integrals):
        assert v == pytest.approx(ONE_MINUS_C * p.heights[r], rel=1e-9)


@pytest.mark.parametrize("l", [1e-3, 1e-6, 1e-9])
def test_product_integral_vanishing_window(l):
    r = product_integral(1e4, l, 3)
    assert 0 <= r.value <= 2 * l * 1e3 + r.err_estimate


def test_product_integral_k1_against_j_between():
    # k = 1: J(phi^{-1}(T+2l)) - J(phi^{-1}(T)) = j_between(T, T+2l) + 2l(1-c)
    T, l = 1e4, 1.0
    r = product_integral(T, l, 1)
    ref = j_between(T, T + 2 * l).value + 2 * l * ONE_MINUS_C
    assert r.value == pytest.approx(ref, rel=1e-8)
    assert 0.3 < r.value / (2 * math.log(T)) < 3


def test_product_integral_k3_pullback_quadrature():
    T, l, k = 1e4, 1.0, 3
    r = product_integral(T, l, k)
    assert r.value == pytest.approx(pullback_product(T, l, k, QUAD), rel=1e-8)


@pytest.mark.parametrize("T,k", [(1e3, 2), (1e5, 5), (1e6, 7)])
def test_product_integral_pullback_main_term(T, k):
    r = product_integral(T, 1.0, k, MAIN)
    assert r.backend is Backend.MAIN_TERM
    assert r.value == pytest.approx(pullback_product(T, 1.0, k, MAIN), rel=1e-9)


def test_product_integral_main_term_scale():
    T = 1e6
    v = product_integral(T, 1.0, 7, MAIN).value / (2 * math.log(T) ** 7)
    assert 0.5 < v < 2


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="reverse iterates sample Z^2 size-biased; the quadrature product runs far above 2 ln^7 T")
def test_product_integral_quadrature_scale():
    T = 1e6
    v = product_integral(T, 1.0, 7).value / (2 * math.log(T) ** 7)
    assert 0.5 < v < 2


def test_product_integral_main_term_tightens():
    dev = [abs(product_integral(T, 1.0, 7, MAIN).value / (2 * math.log(T) ** 7) - 1) for T in (1e4, 1e6, 1e8, 1e10)]
    assert all(b < a for a, b in zip(dev, dev[1:]))


@pytest.mark.parametrize("T", [1e4, 1e5])
def test_backend_agreement(T):
    assert phi1_inverse(T, MAIN) == pytest.approx(phi1_inverse(T, QUAD), rel=0.01)


@pytest.mark.slow
def test_backend_agreement_1e6():
    assert phi1_inverse(1e6, MAIN) == pytest.approx(phi1_inverse(1e6, QUAD), rel=0.01)


@settings(deadline=None, max_examples=40)
@given(st.floats(min_value=100, max_value=1e12))
def test_main_term_composition(T):
    y = phi1_inverse(T, MAIN)
    assert y > T
    assert phi1(y, MAIN) == pytest.approx(T, rel=1e-9)


@settings(deadline=None, max_examples=20)
@given(st.floats(min_value=1e3, max_value=1e12), st.integers(min_value=1, max_value=10))
def test_main_term_tower(T, k):
    h = reverse_iterates(T, k, MAIN).heights
    assert all(b > a for a, b in zip(h, h[1:]))
    gaps = np.diff(h)
    if k >= 2:
        assert np.all(np.abs(gaps[1:] / gaps[:-1] - 1) < 0.1)


def test_main_term_equidistance_trend():
    spreads = []
    for T in (1e4, 1e6, 1e8):
        h = np.array(reverse_iterates(T, 7, MAIN).heights)
        g = np.diff(h)
        spreads.append(float(np.max(np.abs(g[1:] / g[:-1] - 1))))
    assert all(b < a for a, b in zip(spreads, spreads[1:]))


def test_custom_c():
    cfg = LadderConfig(c=0.5, backend="main-term")
    T = 1e5
    y = phi1_inverse(T, cfg)
    assert MainTermJ().diff(T, y) == pytest.approx(0.5 * T, rel=1e-9)
