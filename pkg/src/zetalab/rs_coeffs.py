"""Power-series coefficients of the Riemann-Siegel remainder terms C0..C4.

With p = frac(sqrt(t/2pi)) and z = 1 - 2p the kernel

    Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
           = -cos(pi z^2 / 2 - 5 pi / 8) / cos(pi z)

is entire in z, so every C_k is an everywhere-convergent power series in z.
Coefficients are generated once with mpmath and cached as float64 arrays
(highest degree first, ready for Horner evaluation).
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

SERIES_DEGREE = 80
KEEP_DEGREE = 48


def _psi_series(mp: mpmath.MPContext, degree: int) -> list:
    pi = mp.pi
    # numerator: -cos(pi z^2/2 - 5pi/8) = -[cos(pi z^2/2)cos(5pi/8) + sin(pi z^2/2)sin(5pi/8)]
    num = [mp.zero] * (degree + 1)
    c58, s58 = mp.cos(5 * pi / 8), mp.sin(5 * pi / 8)
    for j in range(degree // 4 + 1):
        u = (pi / 2) ** (2 * j) / mp.factorial(2 * j) * (-1) ** j
        if 4 * j <= degree:
            num[4 * j] -= u * c58
        v = (pi / 2) ** (2 * j + 1) / mp.factorial(2 * j + 1) * (-1) ** j
        if 4 * j + 2 <= degree:
            num[4 * j + 2] -= v * s58
    den = [mp.zero] * (degree + 1)
    for j in range(degree // 2 + 1):
        den[2 * j] = (-1) ** j * pi ** (2 * j) / mp.factorial(2 * j)
    out = [mp.zero] * (degree + 1)
    for m in range(degree + 1):
        acc = num[m]
        for i in range(1, m + 1):
            acc -= den[i] * out[m - i]
        out[m] = acc / den[0]
    return out


def _derivative_in_p(coeffs: list, order: int, mp: mpmath.MPContext) -> list:
    # d/dp = -2 d/dz
    out = list(coeffs)
    for _ in range(order):
        out = [(-2) * (m + 1) * out[m + 1] for m in range(len(out) - 1)] + [mp.zero]
    return out


@lru_cache(maxsize=1)
def remainder_polynomials() -> tuple[np.ndarray, ...]:
    """Return (C0, C1, C2, C3, C4) as float64 coefficient arrays in z, highest degree first."""
    with mpmath.workdps(50):
        mp = mpmath.mp
        pi = mp.pi
        psi = _psi_series(mp, SERIES_DEGREE)
        d = {k: _derivative_in_p(psi, k, mp) for k in range(13)}

        def combo(terms):
            res = [mp.zero] * (SERIES_DEGREE + 1)
            for weight, k in terms:
                for m in range(SERIES_DEGREE + 1):
                    res[m] += weight * d[k][m]
            return res

        c0 = combo([(mp.one, 0)])
        c1 = combo([(-1 / (96 * pi**2), 3)])
        c2 = combo([(1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6)])
        c3 = combo([
            (-1 / (64 * pi**2), 1),
            (-1 / (3840 * pi**4), 5),
            (-1 / (5308416 * pi**6), 9),
        ])
        c4 = combo([
            (1 / (128 * pi**2), 0),
            (mpmath.mpf(19) / (24576 * pi**4), 4),
            (mpmath.mpf(11) / (5898240 * pi**6), 8),
            (1 / (2038431744 * pi**8), 12),
        ])
        polys = []
        for c in (c0, c1, c2, c3, c4):
            polys.append(np.array([float(x) for x in reversed(c[: KEEP_DEGREE + 1])]))
    return tuple(polys)


def remainder_matrix() -> np.ndarray:
    """Stack the five polynomials into a (5, KEEP_DEGREE + 1) array for numba kernels."""
    return np.ascontiguousarray(np.vstack(remainder_polynomials()))
