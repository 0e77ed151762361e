"""Experiment reports, their CSV/JSON serialization and convergence tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import __version__
from .config import Backend, DEFAULT_LADDER, LadderConfig
from .functionals import backend_for, lemma2_ratio, lemma3_check, theorem1_estimate, theorem1_height, theorem3_equilibrium
from .gram import lemma1_estimate

VERDICT_MONOTONE = "non-increasing"
VERDICT_BROKEN = "not monotone"
VERDICT_SHORT = "insufficient data"


@dataclass
class ExperimentReport:
    command: str
    inputs: dict
    backend: str
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "backend": self.backend,
            "rows": self.rows,
            "metadata": self.metadata,
        }
        return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        writer.writerow(cols)
        for row in self.rows:
            writer.writerow([_cell(row.get(c, "")) for c in cols])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _plain(value):
    """JSON-safe copy: enums to their values, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Backend):
        return value.value
    if hasattr(value, "value") and hasattr(value, "name") and not isinstance(value, (int, float)):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if hasattr(value, "item") and callable(value.item):  # numpy scalars
        return _plain(value.item())
    return value


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form, full precision
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def trend_verdict(gaps: Sequence[float]) -> str:
    """Monotone non-increasing check on a column of relative gaps."""
    if len(gaps) < 2:
        return VERDICT_SHORT
    ok = all(b <= a for a, b in zip(gaps, gaps[1:]))
    return VERDICT_MONOTONE if ok else VERDICT_BROKEN


def _backend_cfg(cfg: LadderConfig, backend: str, T: float) -> LadderConfig:
    if backend == "auto":
        return cfg.with_backend(backend_for(T))
    return cfg.with_backend(backend)


def _lemma1_row(T: float, cfg: LadderConfig, backend: str, **_) -> dict:
    c = _backend_cfg(cfg, backend, T)
    e = lemma1_estimate(T, c.precision, c.backend)
    return {"scale": T, "value": e.sum, "target": e.main_term, "rel_gap": abs(e.rel_dev),
            "count": e.count, "backend": e.backend.value}


def _lemma2_row(T: float, cfg: LadderConfig, backend: str, l: float = 1.0, **_) -> dict:
    c = _backend_cfg(cfg, backend, T)
    r = lemma2_ratio(T, l, c)
    return {"scale": T, "value": r.lhs_ratio, "target": r.predicted, "rel_gap": r.rel_gap,
            "gram_sum": r.gram_sum.value, "product": r.product.value,
            "err_estimate": r.product.err_estimate, "backend": r.backend.value}


def _theorem1_row(tau: float, cfg: LadderConfig, backend: str, alpha: float = 1.0, l: float = 1.0, **_) -> dict:
    c = _backend_cfg(cfg, backend, theorem1_height(alpha, tau))
    e = theorem1_estimate(alpha, l, tau, c)
    return {"scale": tau, "value": e.value, "target": e.target, "rel_gap": e.rel_gap, "T": e.T,
            "backend": e.backend.value}


def _lemma3_row(tau: float, cfg: LadderConfig, backend: str, l: float = 1.0, **_) -> dict:
    c = _backend_cfg(cfg, backend, tau**6)
    r = lemma3_check(tau, l, c)
    return {"scale": tau, "value": r.ratio, "target": 1.0, "rel_gap": abs(r.ratio - 1.0), "lhs": r.lhs,
            "rhs": r.rhs, "increment": r.increment, "product": r.product, "backend": r.backend.value}


def _theorem3_row(tau: float, cfg: LadderConfig, backend: str, **_) -> dict:
    c = _backend_cfg(cfg, backend, tau**6)
    r = theorem3_equilibrium(tau, c)
    return {"scale": tau, "value": r.ratio, "target": 1.0, "rel_gap": abs(r.ratio - 1.0),
            "gram_sum": r.gram_sum, "increment": r.increment, "product": r.product, "l": r.l,
            "backend": r.backend.value}


FUNCTIONALS: dict[str, Callable[..., dict]] = {
    "lemma1": _lemma1_row,
    "lemma2": _lemma2_row,
    "theorem1": _theorem1_row,
    "lemma3": _lemma3_row,
    "theorem3": _theorem3_row,
}


def convergence_table(functional: str, scales: Sequence[float], cfg: LadderConfig = DEFAULT_LADDER,
                      backend: str = "auto", **params) -> ExperimentReport:
    """One row per scale (value, target, rel_gap) and a trend verdict on the rel_gap column."""
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; choose from {sorted(FUNCTIONALS)}")
    row_fn = FUNCTIONALS[functional]
    rows = [row_fn(float(s), cfg, backend, **params) for s in scales]
    verdict = trend_verdict([r["rel_gap"] for r in rows])
    for r in rows:
        r["verdict"] = verdict
    backends = sorted({r["backend"] for r in rows})
    return ExperimentReport(
        command=functional,
        inputs={"scales": [float(s) for s in scales], **params},
        backend="/".join(backends) if backends else backend,
        rows=rows,
        metadata=base_metadata(cfg) | {"verdict": verdict},
    )


def base_metadata(cfg: LadderConfig) -> dict:
    p = cfg.precision
    return {
        "version": __version__,
        "quad_rel_tol": p.quad_rel_tol,
        "quad_abs_tol": p.quad_abs_tol,
        "root_tol": p.root_tol,
        "ladder_root_tol": cfg.root_tol,
        "theta_correction_terms": p.theta_correction_terms,
        "rs_correction_order": p.rs_correction_order,
        "c": cfg.c,
    }
