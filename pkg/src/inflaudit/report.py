"""Serialization of audit results to JSON and CSV.

All floats are rendered as decimal strings with 17 significant digits so
that reruns with identical inputs produce byte-identical artifacts; CSV
output always uses '.' as the decimal separator.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .audit import AuditReport
from .influence import InfluenceSet


def fmt_float(v) -> str:
    """Decimal string with 17 significant digits (locale independent)."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _floats(values):
    return [fmt_float(v) for v in np.asarray(values, dtype=float)]


def influence_set_to_dict(s: InfluenceSet) -> dict:
    return {
        "indices": list(s.indices),
        "labels": list(s.labels) if s.labels is not None else None,
        "delta": fmt_float(s.delta),
        "contributions": _floats(s.contributions),
        "d_remaining": fmt_float(s.d_remaining),
    }


def evd_model_to_dict(m) -> dict:
    return {
        "family": m.family,
        "a": fmt_float(m.a),
        "b": fmt_float(m.b),
        "gev_shape": fmt_float(m.gev_shape),
        "m_blocks": m.m_blocks,
        "corrected": m.corrected,
    }


def report_to_dict(report: AuditReport) -> dict:
    d = report.tail_diagnostics
    return {
        "observed": influence_set_to_dict(report.observed),
        "null_model": evd_model_to_dict(report.null_model),
        "p_value": fmt_float(report.p_value),
        "regime": report.regime,
        "direction": report.direction,
        "tail_diagnostics": {
            "gamma_x": fmt_float(d.gamma_x),
            "gamma_r": fmt_float(d.gamma_r),
            "gamma_gev": fmt_float(d.gamma_gev),
            "lr_stat": fmt_float(d.lr_stat),
            "lr_pvalue": fmt_float(d.lr_pvalue),
        },
        "decisions": [
            {"alpha": fmt_float(a), "excessive": flag}
            for a, flag in sorted(report.decisions.items(), reverse=True)
        ],
        "block_maxima": _floats(report.block_maxima),
        "m_blocks": report.m_blocks,
        "block_size": report.block_size,
        "block_strategy": report.block_strategy,
        "seed": report.seed,
        "theta_hat": fmt_float(report.theta_hat),
        "n": report.n,
        "notes": list(report.notes),
        "one_sided_p": (
            None if report.one_sided_p is None
            else {k: fmt_float(v) for k, v in sorted(report.one_sided_p.items())}
        ),
    }


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def block_maxima_csv(maxima) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["block", "delta_max"])
    for i, v in enumerate(np.asarray(maxima, dtype=float)):
        writer.writerow([i, fmt_float(v)])
    return buf.getvalue()


def threshold_curves_csv(x_grid, curves) -> str:
    """Plot-ready CSV: one row per grid point, two columns per level."""
    alphas = sorted(curves, reverse=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["x"]
    for a in alphas:
        header += [f"upper_alpha_{fmt_float(a)}", f"lower_alpha_{fmt_float(a)}"]
    writer.writerow(header)
    for i, xv in enumerate(np.asarray(x_grid, dtype=float)):
        row = [fmt_float(xv)]
        for a in alphas:
            upper, lower = curves[a]
            row += [fmt_float(upper[i]), fmt_float(lower[i])]
        writer.writerow(row)
    return buf.getvalue()


def shape_table_csv(cells) -> str:
    """Shape-study summaries in the Mean/Std.Dev./Q25/Median/Q75 layout."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["dist_x", "dist_r", "n", "reps", "mean", "std_dev",
         "q25", "median", "q75", "failures"]
    )
    for cell in cells:
        writer.writerow([
            cell["dist_x"], cell["dist_r"], cell["n"], cell["reps"],
            fmt_float(cell["mean"]), fmt_float(cell["std"]),
            fmt_float(cell["q25"]), fmt_float(cell["median"]),
            fmt_float(cell["q75"]), cell["failures"],
        ])
    return buf.getvalue()
