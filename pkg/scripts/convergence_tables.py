"""Convergence tables for every functional on both backends, written as CSV files."""

import argparse
from pathlib import Path

from zetalab.report import convergence_table

# (functional, scales, backend); quadrature rows stop at 1e6 to stay within desk budgets
RUNS = [
    ("lemma1", [1e4, 1e5, 1e6], "quadrature"),
    ("lemma2", [1e4, 1e5, 1e6], "quadrature"),
    ("lemma2", [1e4, 1e5, 1e6, 1e8], "main-term"),
    ("theorem1", [2.0, 3.0, 4.0, 5.0, 6.0], "main-term"),
    ("lemma3", [10.0, 12.0, 15.0, 20.0], "main-term"),
    ("theorem3", [10.0, 12.0, 15.0, 20.0, 30.0], "main-term"),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("tables"))
    ap.add_argument("--quick", action="store_true", help="main-term runs only")
    args = ap.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, scales, backend in RUNS:
        if args.quick and backend == "quadrature":
            continue
        rep = convergence_table(name, scales, backend=backend)
        path = args.out_dir / f"{name}_{backend}.csv"
        path.write_text(rep.to_csv())
        gaps = ", ".join(f"{r['rel_gap']:.4g}" for r in rep.rows)
        print(f"{name:9} {backend:10} rel_gap [{gaps}] -> {rep.metadata['verdict']} ({path})")


if __name__ == "__main__":
    main()
