"""Compare the quadrature integral of Z^2 with the smoothed main term J(T) = T ln(T/2pi) - (1-2c)T.

Prints the integral over consecutive segments of [a, b] against the main-term difference,
then the total. Default range [1e3, 1e5] takes a few minutes on one core.
"""

import argparse

from zetalab.hl_integral import j_between, j_main_term


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=1e3)
    ap.add_argument("--b", type=float, default=1e5)
    ap.add_argument("--segments", type=int, default=8)
    args = ap.parse_args(argv)

    edges = [args.a * (args.b / args.a) ** (i / args.segments) for i in range(args.segments + 1)]
    total = err = 0.0
    print(f"{'a':>12} {'b':>12} {'quadrature':>16} {'main term':>16} {'rel gap':>10}")
    for lo, hi in zip(edges, edges[1:]):
        r = j_between(lo, hi)
        ref = j_main_term(hi) - j_main_term(lo)
        total += r.value
        err += r.err_estimate
        print(f"{lo:12.1f} {hi:12.1f} {r.value:16.6f} {ref:16.6f} {r.value / ref - 1:10.2e}")
    ref = j_main_term(args.b) - j_main_term(args.a)
    print(f"total {total:.6f} (err {err:.1e}) vs {ref:.6f}: rel gap {total / ref - 1:.2e}")


if __name__ == "__main__":
    main()
