"""Mean of Z^2 at each reverse iterate of the window [T, T+2l], against ln T and the size-biased mean.

The ladder keeps Z^2(y) dy = (Z^2(s) + 1 - c) ds, so pulling a uniform s back through it
lands where Z^2 is large: the level means track E[Z^4]/E[Z^2] rather than E[Z^2] = ln T.
"""

import argparse
import math

import numpy as np

from zetalab.ladder import reverse_iterates
from zetalab.zeta_core import zeta_abs_sq


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=1e5)
    ap.add_argument("--l", type=float, default=1.0)
    ap.add_argument("--k", type=int, default=7)
    ap.add_argument("--samples", type=int, default=65)
    args = ap.parse_args(argv)

    s = np.linspace(args.T, args.T + 2 * args.l, args.samples)
    towers = np.array([reverse_iterates(x, args.k).heights for x in s])
    z2 = zeta_abs_sq(towers.ravel()).reshape(towers.shape)
    print(f"ln T = {math.log(args.T):.3f}, {args.samples} samples of s in [T, T + {2 * args.l:g}]")
    print(f"{'r':>2} {'height at s = T':>16} {'mean Z^2':>10} {'median Z^2':>11}")
    for r in range(args.k + 1):
        print(f"{r:2d} {towers[0, r]:16.6f} {z2[:, r].mean():10.3f} {np.median(z2[:, r]):11.3f}")

    span = 200 * 2 * math.pi / math.log(args.T / (2 * math.pi))
    ref = zeta_abs_sq(np.linspace(args.T, args.T + span, 200_001))
    print(f"E[Z^2] = {ref.mean():.3f}, size-biased mean E[Z^4]/E[Z^2] = {(ref**2).mean() / ref.mean():.3f}")


if __name__ == "__main__":
    main()
