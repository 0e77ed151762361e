"""Command-line entry point: one subcommand per experiment, CSV or JSON reports.

Exit codes: 0 success, 1 argument error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
import time
from pathlib import Path

import numpy as np

from .config import Backend, ConvergenceError, LadderConfig, PrecisionConfig, ZetaLabError
from .report import ExperimentReport, base_metadata, convergence_table

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC = 0, 1, 2

PRECISION_KEYS = {
    "theta_correction_terms": int,
    "rs_correction_order": int,
    "quad_rel_tol": float,
    "quad_abs_tol": float,
    "root_tol": float,
}


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: error: {message}")


def _backend_choice(value: str) -> str:
    if value == "auto":
        return value
    try:
        return Backend.parse(value).value
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid backend {value!r} (quad, main, auto)")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=float, help="quadrature relative tolerance")
    common.add_argument("--config", type=Path, help="key = value file with a [zetalab] section")
    common.add_argument("--timing", action="store_true", help="record wall time in the metadata")

    # shared flags live on each subcommand (after its name), so subparser defaults never clobber them
    p = _Parser(prog="zetalab", description="Zeta-function experiments on Gram sums and Jacob's ladders.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    g = add("gram", "Gram points")
    grp = g.add_mutually_exclusive_group(required=True)
    grp.add_argument("--nu", type=int, nargs="+")
    grp.add_argument("--range", type=float, nargs=2, metavar=("A", "B"))

    s = add("sum", "Gram-point sum over a window")
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--window", choices=("h1", "h2", "h"), default="h")
    s.add_argument("--psi", type=float)
    s.add_argument("--parity", choices=("even", "odd"), default="even")
    s.add_argument("--partitions", type=int, default=1)
    s.add_argument("--backend", type=_backend_choice, default="quadrature")

    lad = add("ladder", "reverse iterates of the ladder")
    lad.add_argument("--T", type=float, required=True)
    lad.add_argument("--k", type=int, required=True)
    lad.add_argument("--backend", type=_backend_choice, default="quadrature")

    pi = add("product-integral", "iterated product integral")
    pi.add_argument("--T", type=float, required=True)
    pi.add_argument("--l", type=float, required=True)
    pi.add_argument("--k", type=int, required=True)
    pi.add_argument("--backend", type=_backend_choice, default="auto")

    l1 = add("lemma1", "even Gram sum trend")
    l1.add_argument("--T-ladder", dest="T_ladder", type=float, nargs="+", required=True)
    l1.add_argument("--backend", type=_backend_choice, default="quadrature")

    l2 = add("lemma2", "Gram sum over product integral")
    l2.add_argument("--T", type=float, nargs="+", required=True)
    l2.add_argument("--l", type=float, default=1.0)
    l2.add_argument("--backend", type=_backend_choice, default="auto")

    t1 = add("theorem1", "the alpha/l functional over a tau ladder")
    t1.add_argument("--alpha", type=float, required=True)
    t1.add_argument("--l", type=float, required=True)
    t1.add_argument("--tau-ladder", dest="tau_ladder", type=float, nargs="+", required=True)
    t1.add_argument("--backend", type=_backend_choice, default="main-term")

    t2 = add("theorem2-scan", "target gaps over enumerated Fermat rationals")
    t2.add_argument("--alpha", type=float, required=True)
    t2.add_argument("--bound", type=int, required=True)
    t2.add_argument("--nmax", type=int, required=True)
    t2.add_argument("--tau", type=float, help="also compute finite-tau numerical gaps")
    t2.add_argument("--backend", type=_backend_choice, default="main-term")

    l3 = add("lemma3", "Gram sum against increment times product integral")
    l3.add_argument("--tau", type=float, nargs="+", required=True)
    l3.add_argument("--l", type=float, default=1.0)
    l3.add_argument("--backend", type=_backend_choice, default="main-term")

    t3 = add("theorem3", "equilibrium ratio over a tau ladder")
    t3.add_argument("--tau-ladder", dest="tau_ladder", type=float, nargs="+", required=True)
    t3.add_argument("--backend", type=_backend_choice, default="main-term")

    z = add("zeros", "sign-change zeros of Z")
    z.add_argument("--range", type=float, nargs=2, metavar=("A", "B"), required=True)

    n0 = add("n0", "zero count N_0(T)")
    n0.add_argument("--T", type=float, nargs="+", required=True)

    ti = add("titchmarsh", "pair sums of Z^2 at consecutive Gram points")
    ti.add_argument("--M", type=int, default=100)
    ti.add_argument("--N", type=int, nargs="+", required=True)

    sp = add("spectral", "oscillator-bank defect against Z")
    sp.add_argument("--x", type=float, nargs="+", required=True)
    sp.add_argument("--samples", type=int, default=4097)
    return p


def load_config(args) -> LadderConfig:
    values: dict = {}
    c = None
    ladder_tol = None
    if args.config is not None:
        cp = configparser.ConfigParser()
        if not cp.read(args.config):
            raise ArgumentError(f"cannot read config file {args.config}")
        if "zetalab" in cp:
            sec = cp["zetalab"]
            for key, conv in PRECISION_KEYS.items():
                if key in sec:
                    values[key] = conv(sec[key])
            if "c" in sec:
                c = float(sec["c"])
            if "ladder_root_tol" in sec:
                ladder_tol = float(sec["ladder_root_tol"])
    if args.tol is not None:
        values["quad_rel_tol"] = args.tol
    prec = PrecisionConfig(**values)
    kw = {"precision": prec}
    if c is not None:
        kw["c"] = c
    if ladder_tol is not None:
        kw["root_tol"] = ladder_tol
    return LadderConfig(**kw)


def _resolved(cfg: LadderConfig, backend: str, T: float) -> LadderConfig:
    from .functionals import backend_for

    return cfg.with_backend(backend_for(T) if backend == "auto" else backend)


def run_command(args, cfg: LadderConfig) -> ExperimentReport:
    from . import functionals, gram, ladder, zeros, zeta_core

    cmd = args.command
    meta = base_metadata(cfg)
    prec = cfg.precision

    if cmd == "gram":
        if args.nu is not None:
            pts = [gram.gram_point(n, prec) for n in args.nu]
        else:
            pts = gram.gram_points_in(args.range[0], args.range[1], prec)
        rows = [{"nu": p.nu, "t": p.t, "theta_residual": zeta_core.theta(p.t, prec) - math.pi * p.nu} for p in pts]
        return ExperimentReport(cmd, {"nu": args.nu, "range": args.range}, "none", rows, meta)

    if cmd == "sum":
        w = gram.make_window(args.T, args.window.upper(), args.psi)
        parity = 0 if args.parity == "even" else 1
        backend = Backend.parse(args.backend if args.backend != "auto" else functionals.backend_for(args.T))
        r = gram.window_sum(w, parity, prec, backend, args.partitions)
        rows = [{"T": w.T, "H": w.H, "window": w.kind.value, "psi": w.psi_value, "parity": args.parity,
                 "value": r.value, "count": r.count, "max_residual": r.max_residual,
                 "partitions": r.partitions, "backend": r.backend.value}]
        return ExperimentReport(cmd, vars_of(args, "T", "window", "psi", "parity", "partitions"),
                                r.backend.value, rows, meta)

    if cmd == "ladder":
        c = _resolved(cfg, args.backend, args.T)
        rev = ladder.reverse_iterates(args.T, args.k, c)
        h = rev.heights
        rows = []
        for r, height in enumerate(h):
            gap = h[r] - h[r - 1] if r else float("nan")
            ratio = (h[r] - h[r - 1]) / (h[r - 1] - h[r - 2]) if r >= 2 else float("nan")
            rows.append({"r": r, "height": height, "gap": gap, "gap_ratio": ratio})
        return ExperimentReport(cmd, vars_of(args, "T", "k"), c.backend.value, rows, meta)

    if cmd == "product-integral":
        c = _resolved(cfg, args.backend, args.T)
        res = ladder.product_integral(args.T, args.l, args.k, c)
        norm = res.value / (2.0 * args.l * math.log(args.T) ** args.k)
        rows = [{"T": args.T, "l": args.l, "k": args.k, "lower": res.lower, "upper": res.upper,
                 "value": res.value, "err_estimate": res.err_estimate, "evaluations": res.evaluations,
                 "normalized": norm, "backend": res.backend.value}]
        return ExperimentReport(cmd, vars_of(args, "T", "l", "k"), res.backend.value, rows, meta)

    if cmd == "lemma1":
        return convergence_table("lemma1", args.T_ladder, cfg, args.backend)
    if cmd == "lemma2":
        return convergence_table("lemma2", args.T, cfg, args.backend, l=args.l)
    if cmd == "theorem1":
        return convergence_table("theorem1", args.tau_ladder, cfg, args.backend, alpha=args.alpha, l=args.l)
    if cmd == "lemma3":
        return convergence_table("lemma3", args.tau, cfg, args.backend, l=args.l)
    if cmd == "theorem3":
        return convergence_table("theorem3", args.tau_ladder, cfg, args.backend)

    if cmd == "theorem2-scan":
        c = cfg if args.backend == "auto" else cfg.with_backend(args.backend)
        gaps = functionals.zeta_condition_gap(args.alpha, args.bound, args.nmax, args.tau, c)
        rows = [{"x": g.fr.x, "y": g.fr.y, "z": g.fr.z, "n": g.fr.n,
                 "fr_numerator": g.fr.numerator, "fr_denominator": g.fr.denominator,
                 "exact_gap": g.exact_gap, "exact_gap_positive": g.exact_gap_positive,
                 "numeric_gap": "" if g.numeric_gap is None else g.numeric_gap} for g in gaps]
        meta = meta | {"min_exact_gap": min((g.exact_gap for g in gaps), default=float("nan")),
                       "all_exact_gaps_positive": all(g.exact_gap_positive for g in gaps)}
        return ExperimentReport(cmd, vars_of(args, "alpha", "bound", "nmax", "tau"), c.backend.value, rows, meta)

    if cmd == "zeros":
        zs = zeros.find_zeros(args.range[0], args.range[1], prec)
        rows = [{"gamma": z.gamma, "bracket_width": z.bracket_width} for z in zs]
        return ExperimentReport(cmd, {"range": args.range}, "none", rows, meta)

    if cmd == "n0":
        rows = [{"T": T, "n0": zeros.count_n0(T, prec), "smooth_count": zeros.riemann_von_mangoldt(T, prec)}
                for T in args.T]
        return ExperimentReport(cmd, {"T": args.T}, "none", rows, meta)

    if cmd == "titchmarsh":
        rows = []
        for N in args.N:
            S = gram.titchmarsh_pair_sum(args.M, N, prec)
            rows.append({"M": args.M, "N": N, "S": S, "normalized": S / (N * math.log(N) ** 4)})
        return ExperimentReport(cmd, {"M": args.M, "N": args.N}, "quadrature", rows, meta)

    if cmd == "spectral":
        rows = []
        for x in args.x:
            d = zeta_core.spectral_decompose(x)
            rows.append({"x": x, "v_max": d.v_max, "truncation": d.truncation,
                         "max_defect": zeta_core.spectral_defect(x, args.samples, prec),
                         "reference": x**-0.25})
        return ExperimentReport(cmd, {"x": args.x, "samples": args.samples}, "none", rows, meta)

    raise ArgumentError(f"unknown command {cmd!r}")


def vars_of(args, *names) -> dict:
    return {n: getattr(args, n) for n in names}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args)
    except ArgumentError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ARGS
    except (ValueError, ZetaLabError) as exc:
        print(f"zetalab: error: {exc}", file=sys.stderr)
        return EXIT_ARGS

    start = time.perf_counter()
    try:
        report = run_command(args, cfg)
    except ConvergenceError as exc:
        print(f"zetalab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"zetalab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ZetaLabError, ArgumentError) as exc:
        print(f"zetalab: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    if args.timing:
        report.metadata["elapsed_seconds"] = time.perf_counter() - start
    text = report.render(args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
