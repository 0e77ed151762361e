"""Compiled inner loops: theta, Riemann-Siegel Z, Gram streaming sums, Z^2 panels.

Everything here works on plain float64 scalars/arrays so numba can compile
it; the public modules wrap these with domain checks and dataclasses.

The Riemann-Siegel main sum uses a branch-light polynomial cosine so the
inner loop vectorizes; ``z_batch_direct`` keeps a libm reference path.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

from .rs_coeffs import remainder_matrix

TWO_PI = 2.0 * math.pi
EPS = 2.220446049250313e-16
TABLE_SIZE = 200_000  # main-sum length supported: t up to ~2.5e11

def _build_tables(size: int):
    n = np.arange(size + 1, dtype=np.float64)
    logs = np.zeros(size + 1)
    logs[1:] = np.log(n[1:])
    rsq = np.zeros(size + 1)
    rsq[1:] = 1.0 / np.sqrt(n[1:])
    return logs, rsq


LOGS, RSQ = _build_tables(TABLE_SIZE)
RS_POLY = remainder_matrix()


@nb.njit(cache=True)
def theta(t, nterms):
    x = 0.5 * t * math.log(t / TWO_PI) - 0.5 * t - math.pi / 8.0
    if nterms >= 1:
        x += 1.0 / (48.0 * t)
    if nterms >= 2:
        x += 7.0 / (5760.0 * t**3)
    if nterms >= 3:
        x += 31.0 / (80640.0 * t**5)
    return x


@nb.njit(cache=True)
def theta_prime(t, nterms):
    x = 0.5 * math.log(t / TWO_PI)
    if nterms >= 1:
        x -= 1.0 / (48.0 * t * t)
    if nterms >= 2:
        x -= 7.0 / (1920.0 * t**4)
    if nterms >= 3:
        x -= 31.0 / (16128.0 * t**6)
    return x


@nb.njit(cache=True)
def _horner(coeffs, z):
    acc = 0.0
    for i in range(coeffs.shape[0]):
        acc = acc * z + coeffs[i]
    return acc


@nb.njit(cache=True)
def rs_remainder(t, order, poly):
    a = math.sqrt(t / TWO_PI)
    n = int(a)
    p = a - n
    z = 1.0 - 2.0 * p
    inv = 1.0 / a
    acc = 0.0
    w = 1.0
    for k in range(order + 1):
        acc += _horner(poly[k], z) * w
        w *= inv
    sign = 1.0 if (n - 1) % 2 == 0 else -1.0
    return sign * acc / math.sqrt(a)


_C = [(-1.0) ** k / math.factorial(2 * k) for k in range(11)]
_C0, _C1, _C2, _C3, _C4, _C5, _C6, _C7, _C8, _C9, _C10 = _C
_INV_TWO_PI = 1.0 / TWO_PI
_HALF_PI = 0.5 * math.pi


@nb.njit(fastmath=True, inline="always")
def fast_cos(x):
    # reduce to [-pi, pi], fold to [0, pi/2]; Taylor to degree 20 (err < 4e-15)
    r = x - math.floor(x * _INV_TWO_PI + 0.5) * TWO_PI
    a = abs(r)
    sgn = 1.0
    if a > _HALF_PI:
        a = math.pi - a
        sgn = -1.0
    z = a * a
    p = _C10
    p = p * z + _C9
    p = p * z + _C8
    p = p * z + _C7
    p = p * z + _C6
    p = p * z + _C5
    p = p * z + _C4
    p = p * z + _C3
    p = p * z + _C2
    p = p * z + _C1
    p = p * z + _C0
    return sgn * p


@nb.njit(fastmath=True, cache=True)
def main_sum(t, th, nmax, logs, rsq):
    """sum_{n <= nmax} cos(th - t ln n) / sqrt(n); vectorizes under fastmath."""
    acc = 0.0
    for n in range(1, nmax + 1):
        acc += fast_cos(th - t * logs[n]) * rsq[n]
    return acc


@nb.njit(cache=True)
def z_value(t, theta_terms, rs_order, logs, rsq, poly):
    nmax = int(math.sqrt(t / TWO_PI))
    th = theta(t, theta_terms)
    val = 2.0 * main_sum(t, th, nmax, logs, rsq)
    if rs_order >= 0:
        val += rs_remainder(t, rs_order, poly)
    return val


@nb.njit(cache=True)
def z_batch(ts, theta_terms, rs_order, logs, rsq, poly):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        out[i] = z_value(ts[i], theta_terms, rs_order, logs, rsq, poly)
    return out


@nb.njit(cache=True)
def z_batch_direct(ts, theta_terms, rs_order, poly):
    """Reference path: libm cosine per term, no table lookups."""
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        nmax = int(math.sqrt(t / TWO_PI))
        th = theta(t, theta_terms)
        acc = 0.0
        for n in range(1, nmax + 1):
            acc += math.cos(th - t * math.log(n)) / math.sqrt(n)
        acc *= 2.0
        if rs_order >= 0:
            acc += rs_remainder(t, rs_order, poly)
        out[i] = acc
    return out


@nb.njit(cache=True)
def gram_solve(target, t0, theta_terms, tol, maxit):
    """Bracketed Newton for theta(t) = target; returns (t, residual, ok)."""
    # theta itself is only known to a few ulps of the target
    tol = max(tol, 4.0 * EPS * abs(target))
    lo = 7.0
    hi = max(t0, 8.0)
    while theta(hi, theta_terms) < target:
        hi *= 1.5
    t = min(max(t0, lo), hi)
    for _ in range(maxit):
        f = theta(t, theta_terms) - target
        if abs(f) <= tol:
            return t, f, True
        if f > 0.0:
            hi = t
        else:
            lo = t
        step = f / theta_prime(t, theta_terms)
        tn = t - step
        if not (lo < tn < hi):
            tn = 0.5 * (lo + hi)
        if tn == t or hi - lo <= 4e-16 * hi:
            f = theta(tn, theta_terms) - target
            return tn, f, abs(f) <= tol
        t = tn
    f = theta(t, theta_terms) - target
    return t, f, abs(f) <= tol


@nb.njit(cache=True)
def gram_batch(nus, theta_terms, tol, maxit):
    out = np.empty(nus.shape[0])
    res = np.empty(nus.shape[0])
    ok = np.ones(nus.shape[0], dtype=np.bool_)
    t = 0.0
    for i in range(nus.shape[0]):
        target = math.pi * nus[i]
        if i == 0 or nus[i] != nus[i - 1] + 1:
            guess = _gram_guess(nus[i])
        else:
            guess = t + math.pi / theta_prime(t, theta_terms)
        t, r, good = gram_solve(target, guess, theta_terms, tol, maxit)
        out[i] = t
        res[i] = r
        ok[i] = good
    return out, res, ok


@nb.njit(cache=True)
def _lambert_w(x):
    # principal branch, x > 0
    w = math.log(1.0 + x)
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wn = w - f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0))
        if abs(wn - w) <= 1e-15 * (1.0 + abs(wn)):
            return wn
        w = wn
    return w


@nb.njit(cache=True)
def _gram_guess(nu):
    # inverse of the main term: (t/2pi)(ln(t/2pi) - 1) = nu + 1/8
    x = (nu + 0.125) / math.e
    return max(TWO_PI * (nu + 0.125) / _lambert_w(x), 7.5)


@nb.njit(cache=True)
def gram_stream_sum(nu_first, nu_last, step, sign, theta_terms, rs_order, tol,
                    logs, rsq, poly):
    """Compensated (Neumaier) sum of sign*Z(t_nu) for nu = nu_first, nu_first+step, ..<= nu_last.

    Returns (sum, count, max_residual, first_t, last_t).
    """
    t = _gram_guess(nu_first)
    total = 0.0
    comp = 0.0
    count = 0
    worst = 0.0
    t_first = 0.0
    nu = nu_first
    prev_nu = nu_first
    while nu <= nu_last:
        target = math.pi * nu
        if count > 0:
            t = t + (nu - prev_nu) * math.pi / theta_prime(t, theta_terms)
        # ulp floor: theta(t) ~ pi nu cannot be resolved below a few ulps
        tol_nu = max(tol, 8.0 * 2.220446049250313e-16 * target)
        t, r, good = gram_solve(target, t, theta_terms, tol_nu, 60)
        if abs(r) > worst:
            worst = abs(r)
        if count == 0:
            t_first = t
        v = sign * z_value(t, theta_terms, rs_order, logs, rsq, poly)
        s = total + v
        if abs(total) >= abs(v):
            comp += (total - s) + v
        else:
            comp += (v - s) + total
        total = s
        count += 1
        prev_nu = nu
        nu += step
    return total + comp, count, worst, t_first, t


@nb.njit(cache=True)
def pair_products(ts, theta_terms, rs_order, logs, rsq, poly):
    """Z^2(t_i) Z^2(t_{i+1}) for consecutive entries of ts."""
    z = z_batch(ts, theta_terms, rs_order, logs, rsq, poly)
    out = np.empty(ts.shape[0] - 1)
    for i in range(ts.shape[0] - 1):
        out[i] = (z[i] * z[i]) * (z[i + 1] * z[i + 1])
    return out


@nb.njit(cache=True)
def neumaier(values):
    total = 0.0
    comp = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        s = total + v
        if abs(total) >= abs(v):
            comp += (total - s) + v
        else:
            comp += (v - s) + total
        total = s
    return total + comp


@nb.njit(cache=True)
def neumaier_prefix(values):
    out = np.empty(values.shape[0] + 1)
    total = 0.0
    comp = 0.0
    out[0] = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        s = total + v
        if abs(total) >= abs(v):
            comp += (total - s) + v
        else:
            comp += (v - s) + total
        total = s
        out[i + 1] = total + comp
    return out


@nb.njit(cache=True)
def z2_panels(lefts, widths, nodes, weights, theta_terms, rs_order, logs, rsq, poly):
    """Gauss-Legendre Z^2 integrals per panel: (whole-panel rule, sum over two halves).

    nodes/weights are on [-1, 1].
    """
    m = lefts.shape[0]
    k = nodes.shape[0]
    coarse = np.empty(m)
    fine = np.empty(m)
    for i in range(m):
        a = lefts[i]
        h = widths[i]
        acc = 0.0
        for j in range(k):
            z = z_value(a + 0.5 * h * (nodes[j] + 1.0), theta_terms, rs_order, logs, rsq, poly)
            acc += weights[j] * z * z
        coarse[i] = 0.5 * h * acc
        acc2 = 0.0
        for half in range(2):
            a2 = a + 0.5 * h * half
            accj = 0.0
            for j in range(k):
                z = z_value(a2 + 0.25 * h * (nodes[j] + 1.0), theta_terms, rs_order, logs, rsq, poly)
                accj += weights[j] * z * z
            acc2 += 0.25 * h * accj
        fine[i] = acc2
    return coarse, fine


@nb.njit(cache=True)
def theta_batch(ts, nterms):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        out[i] = theta(ts[i], nterms)
    return out


@nb.njit(cache=True)
def theta_prime_batch(ts, nterms):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        out[i] = theta_prime(ts[i], nterms)
    return out
