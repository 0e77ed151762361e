"""Extended-precision reference values, independent of the Riemann-Siegel path.

zeta(1/2+it) is summed by Euler-Maclaurin and theta comes from the exact
log-gamma form, both in mpmath. Used to validate the fast double-precision
routines; far too slow for production sweeps.
"""

from __future__ import annotations

import math

import mpmath


def theta_exact(t: float, dps: int = 30) -> float:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) ln pi."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        val = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 1j * t / 2)) - t / 2 * mpmath.log(mpmath.pi)
        return float(val)


def zeta_em(s, dps: int = 30, n_terms: int | None = None, bernoulli_terms: int = 30):
    """Euler-Maclaurin evaluation of zeta(s), returned as an mpmath mpc.

    zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
              + sum_k B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1} + rest.
    """
    with mpmath.workdps(dps):
        s = mpmath.mpc(s)
        t = abs(mpmath.im(s))
        big_n = n_terms if n_terms is not None else int(t / math.pi) + 20
        head = mpmath.fsum(mpmath.power(n, -s) for n in range(1, big_n))
        nn = mpmath.mpf(big_n)
        tail = nn ** (1 - s) / (s - 1) + nn ** (-s) / 2
        rising = s  # s(s+1)...(s+2k-2)
        npow = nn ** (-s - 1)
        for k in range(1, bernoulli_terms + 1):
            term = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * rising * npow
            tail += term
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            npow /= nn * nn
        return +(head + tail)


def z_exact(t: float, dps: int = 30) -> float:
    """Z(t) = Re(exp(i theta(t)) zeta(1/2+it)) with both factors from the oracle."""
    with mpmath.workdps(dps):
        tt = mpmath.mpf(t)
        th = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 1j * tt / 2)) - tt / 2 * mpmath.log(mpmath.pi)
        z = mpmath.expj(th) * zeta_em(mpmath.mpf(1) / 2 + 1j * tt, dps=dps)
        return float(mpmath.re(z))


def zeta_abs_sq_exact(t: float, dps: int = 30) -> float:
    with mpmath.workdps(dps):
        return float(abs(zeta_em(mpmath.mpf(1) / 2 + 1j * mpmath.mpf(t), dps=dps)) ** 2)
