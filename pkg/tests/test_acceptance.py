"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``. The full suite takes
roughly a quarter of an hour on one core; criteria 5 to 7 dominate.
"""

import math
import time

import numpy as np
import pytest

from zetalab.config import DEFAULT_LADDER
from zetalab.functionals import fermat_scan, lemma2_ratio, theorem3_equilibrium, zeta_condition_gap
from zetalab.gram import gram_heights, lemma1_estimate, titchmarsh_pair_sum
from zetalab.hl_integral import j_between
from zetalab.ladder import partition_report, phi1, phi1_inverse, reverse_iterates
from zetalab.oracle import z_exact
from zetalab.zeros import count_n0, find_zeros, riemann_von_mangoldt
from zetalab.zeta_core import spectral_defect, theta, z_eval, zeta_abs_sq

QUAD = DEFAULT_LADDER
MAIN = DEFAULT_LADDER.with_backend("main-term")

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, f"criterion {n}: {detail}"

    return emit


def non_increasing(xs):
    return all(b <= a for a, b in zip(xs, xs[1:]))


def test_c01_oracle_agreement(verdict):
    start = time.perf_counter()
    ts = np.sort(np.random.default_rng(20240601).uniform(50.0, 1e4, 100))
    worst = max(abs(z_eval(t) - z_exact(t)) for t in ts)
    elapsed = time.perf_counter() - start
    verdict(1, worst <= 1e-6 and elapsed <= 60,
            f"max |z_eval - Z_oracle| = {worst:.2e} over 100 t in [50, 1e4] (<= 1e-6), {elapsed:.1f}s (<= 60s)")


def test_c02_gram_certification(verdict):
    start = time.perf_counter()
    nus = np.arange(1, 100_001)
    ts = gram_heights(nus)
    resid = float(np.max(np.abs(theta(ts) - math.pi * nus)))
    increasing = bool(np.all(np.diff(ts) > 0))
    elapsed = time.perf_counter() - start
    verdict(2, resid <= 1e-9 and increasing and elapsed <= 120,
            f"max |theta(t_nu) - pi nu| = {resid:.2e} for nu <= 1e5 (<= 1e-9), increasing={increasing}, "
            f"{elapsed:.1f}s (<= 120s)")


def test_c03_zero_counting(verdict):
    n = count_n0(100.0)
    first = find_zeros(14.0, 15.0)[0].gamma
    smooth = riemann_von_mangoldt(100.0)
    ok = n == 29 and abs(first - 14.134725) <= 1e-5 and abs(n - smooth) <= 2
    verdict(3, ok, f"N0(100) = {n} (29), first ordinate {first:.8f} (14.134725 +- 1e-5), "
                   f"smooth count {smooth:.3f} (within 2)")


def test_c04_ladder_identities(verdict):
    c = QUAD.c
    comp, inc = [], []
    for T in (1e3, 1e4, 1e5):
        y = phi1_inverse(T, QUAD)
        comp.append(abs(phi1(y, QUAD) / T - 1))
        r = j_between(T, y)
        # quadrature error plus the integral's response to the root tolerance on y
        slack = r.err_estimate + float(zeta_abs_sq(y)) * QUAD.root_tol * y
        inc.append((abs(r.value - (1 - c) * T), slack))
    h = reverse_iterates(1e5, 7, QUAD).heights
    ratios = [(h[r + 1] - h[r]) / (h[r] - h[r - 1]) for r in range(1, 7)]
    ok = (max(comp) <= 1e-6 and all(d <= s for d, s in inc) and all(0.9 < q < 1.1 for q in ratios))
    verdict(4, ok, f"max rel |phi1(phi1^-1(T)) - T| = {max(comp):.1e} (<= 1e-6); increment defects "
                   + ", ".join(f"{d:.1e}<={s:.1e}" for d, s in inc)
                   + f"; gap ratios at 1e5 in [{min(ratios):.4f}, {max(ratios):.4f}] ((0.9, 1.1))")


def test_c05_partition(verdict):
    reps = {T: partition_report(T, 5, QUAD) for T in (1e4, 1e5, 1e6)}
    ratios = reps[1e5].integral_ratios
    spreads = [reps[T].integral_spread for T in (1e4, 1e5, 1e6)]
    ok = all(0.9 < q < 1.1 for q in ratios) and spreads[0] > spreads[1] > spreads[2]
    verdict(5, ok, f"integral ratios at 1e5 in [{min(ratios):.4f}, {max(ratios):.4f}] ((0.9, 1.1)); spread "
                   + " > ".join(f"{s:.4f}" for s in spreads) + " over 1e4, 1e5, 1e6")


def test_c06_lemma1_trend(verdict):
    start = time.perf_counter()
    devs = [abs(lemma1_estimate(T).rel_dev) for T in (1e4, 1e5, 1e6)]
    elapsed = time.perf_counter() - start
    verdict(6, non_increasing(devs) and elapsed <= 1800,
            "|rel_dev| " + ", ".join(f"{d:.4f}" for d in devs)
            + f" over 1e4, 1e5, 1e6 on quadrature (non-increasing), {elapsed:.0f}s (<= 1800s)")


def test_c07_lemma2_theorem3(verdict):
    gaps = [lemma2_ratio(T, 1.0, QUAD).rel_gap for T in (1e4, 1e5, 1e6)]
    t3 = [theorem3_equilibrium(tau, MAIN).ratio for tau in (10.0, 12.0, 15.0)]
    lemma2_ok = non_increasing(gaps)
    t3_ok = 0.5 < t3[1] < 2 and abs(t3[0] - 1) > abs(t3[1] - 1) > abs(t3[2] - 1)
    verdict(7, lemma2_ok and t3_ok,
            "lemma2 rel_gap " + ", ".join(f"{g:.6f}" for g in gaps)
            + f" over 1e4, 1e5, 1e6 on quadrature (non-increasing: {lemma2_ok}); theorem3 ratio "
            + ", ".join(f"{r:.4f}" for r in t3) + f" at tau 10, 12, 15 on main-term ({t3_ok})")


def test_c08_fermat_scan(verdict):
    start = time.perf_counter()
    hits = fermat_scan(50, 3, 7)
    rows = zeta_condition_gap(math.sqrt(2), 50, 7)
    positive = all(r.exact_gap_positive and r.exact_gap > 0 for r in rows)
    elapsed = time.perf_counter() - start
    verdict(8, not hits and positive and len(rows) == 5 * 50**3 and elapsed <= 60,
            f"{len(hits)} rationals equal to 1 over x, y, z <= 50, n in [3, 7]; {len(rows)} exact gaps for "
            f"alpha = sqrt 2 all positive: {positive}; {elapsed:.1f}s (<= 60s)")


def test_c09_titchmarsh(verdict):
    start = time.perf_counter()
    Ns = [2000, 4000, 8000, 16000]
    r = [titchmarsh_pair_sum(100, N) / (N * math.log(N) ** 4) for N in Ns]
    elapsed = time.perf_counter() - start
    verdict(9, all(0 < x <= 2 * r[0] for x in r) and elapsed <= 600,
            "S(N)/(N ln^4 N) " + ", ".join(f"{x:.5f}" for x in r) + f" (within 2x of the first), {elapsed:.1f}s")


def test_c10_spectral_defect(verdict):
    d = [spectral_defect(x) for x in (1e3, 1e4, 1e5)]
    verdict(10, d[0] > d[1] > d[2], "max window defect " + " > ".join(f"{x:.4f}" for x in d) + " over 1e3, 1e4, 1e5")
