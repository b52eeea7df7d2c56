"""Command-line interface.

Subcommands map 1:1 onto the library pipelines: fit, influence, search,
audit, thresholds, simulate. Exit codes: 0 success, 2 usage error, 3 data
error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .audit import (
    AuditConfig,
    SHARED_FIT,
    WITHIN_BLOCK,
    significance_thresholds,
    test_influence,
)
from .data import load_csv
from .errors import DataError, NumericalError
from .influence import first_order_influence, influence_set, influence_single
from .model import fit_ols
from .report import (
    block_maxima_csv,
    evd_model_to_dict,
    fmt_float,
    influence_set_to_dict,
    report_to_dict,
    shape_table_csv,
    threshold_curves_csv,
    to_json,
)
from .search import SearchSpec, exhaustive_most_influential, greedy_most_influential
from .sim import (
    SimConfig,
    default_shape_grid,
    gumbel_estimation_study,
    illustration_scenario,
    shape_study,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _add_data_args(p):
    p.add_argument("--csv", required=True, help="input CSV file (RFC 4180)")
    p.add_argument("--feature", required=True,
                   help="feature column (header name or zero-based index)")
    p.add_argument("--target", required=True,
                   help="outcome column (header name or zero-based index)")
    p.add_argument("--controls", default="",
                   help="comma-separated control columns (default: none)")
    p.add_argument("--label-col", default=None,
                   help="column holding unique row labels (default: none)")
    p.add_argument("--no-header", action="store_true",
                   help="CSV has no header row; address columns by index")
    p.add_argument("--no-intercept", action="store_true",
                   help="do not include an intercept (default: intercept on)")
    p.add_argument("--lambda", dest="ridge", type=float, default=0.0,
                   help="ridge penalty (default 0; influence formulas are "
                        "not adjusted when nonzero)")


def _add_out_args(p):
    p.add_argument("--out", default=None,
                   help="output file; a .manifest.json sidecar is written "
                        "next to it (default: print to stdout, no manifest)")


def _add_search_args(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, default=None,
                       help="constant-size budget (default 1)")
    group.add_argument("--p", type=float, default=None,
                       help="relative-size budget, fraction of N in (0,1)")
    p.add_argument("--direction", choices=["max", "min", "abs"], default="max",
                   help="search objective (default max)")


def _load_dataset(args):
    controls = [c for c in args.controls.split(",") if c.strip()]
    return load_csv(
        args.csv,
        feature_col=args.feature,
        target_col=args.target,
        control_cols=controls,
        label_col=args.label_col,
        has_header=not args.no_header,
        intercept=not args.no_intercept,
    )


def _search_spec(args) -> SearchSpec:
    if args.p is not None:
        return SearchSpec(mode="relative", k=None, p=args.p,
                          direction=args.direction)
    return SearchSpec(mode="constant", k=args.k if args.k is not None else 1,
                      direction=args.direction)


def _digest(path) -> str | None:
    if path is None:
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _emit(text: str, args, argv, started, input_path=None):
    """Write the primary artifact and its manifest sidecar, or print."""
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text)
    manifest = {
        "command": list(argv),
        "config": {
            k: v for k, v in sorted(vars(args).items())
            if k != "func" and isinstance(v, (str, int, float, bool, list, type(None)))
        },
        "seed": getattr(args, "seed", None),
        "input_digest": _digest(input_path),
        "version": __version__,
        "wall_time_s": round(time.monotonic() - started, 3),
    }
    sidecar = out.parent / (out.stem + ".manifest.json")
    sidecar.write_text(json.dumps(manifest, indent=2) + "\n")


def cmd_fit(args, argv, started):
    dataset = _load_dataset(args)
    fit = fit_ols(dataset, ridge=args.ridge)
    payload = {
        "theta_hat": fmt_float(fit.theta_hat),
        "n": fit.n,
        "d_total": fmt_float(fit.d_total),
        "residuals": [fmt_float(v) for v in fit.residuals],
        "leverages": [fmt_float(v) for v in fit.leverages],
        "labels": list(fit.labels) if fit.labels is not None else None,
    }
    _emit(to_json(payload), args, argv, started, args.csv)
    return EXIT_OK


def cmd_influence(args, argv, started):
    dataset = _load_dataset(args)
    fit = fit_ols(dataset, ridge=args.ridge)
    if args.set:
        indices = [int(i) for i in args.set.split(",")]
        result = influence_set(fit, indices)
        payload = influence_set_to_dict(result)
        payload["first_order"] = fmt_float(first_order_influence(fit, indices))
    else:
        payload = {
            "singles": [
                {"index": i,
                 "label": fit.labels[i] if fit.labels is not None else None,
                 "delta": fmt_float(influence_single(fit, i))}
                for i in range(fit.n)
            ]
        }
    _emit(to_json(payload), args, argv, started, args.csv)
    return EXIT_OK


def cmd_search(args, argv, started):
    dataset = _load_dataset(args)
    fit = fit_ols(dataset, ridge=args.ridge)
    spec = _search_spec(args)
    if args.exhaustive:
        result = exhaustive_most_influential(
            fit, spec.resolve_k(fit.n), direction=spec.direction
        )
    else:
        result = greedy_most_influential(fit, spec)
    payload = influence_set_to_dict(result)
    payload["method"] = "exhaustive" if args.exhaustive else "greedy"
    _emit(to_json(payload), args, argv, started, args.csv)
    return EXIT_OK


def _audit_config(args) -> AuditConfig:
    pinned = None
    if args.pin:
        pinned = tuple(int(i) for i in args.pin.split(","))
    blocks = args.blocks if args.blocks == "auto" else int(args.blocks)
    return AuditConfig(
        spec=_search_spec(args),
        m_blocks=blocks,
        alpha_levels=tuple(args.alpha),
        exclude_observed=not args.include_observed,
        seed=args.seed,
        pinned=pinned,
        two_sided=args.two_sided,
        block_strategy=args.block_strategy,
    )


def cmd_audit(args, argv, started):
    dataset = _load_dataset(args)
    report = test_influence(dataset, _audit_config(args))
    _emit(to_json(report_to_dict(report)), args, argv, started, args.csv)
    if args.blocks_out:
        Path(args.blocks_out).write_text(block_maxima_csv(report.block_maxima))
    return EXIT_OK


def cmd_thresholds(args, argv, started):
    dataset = _load_dataset(args)
    report = test_influence(dataset, _audit_config(args))
    fit = fit_ols(dataset, ridge=args.ridge)
    grid = np.linspace(fit.x.min(), fit.x.max(), args.grid_points)
    curves = significance_thresholds(fit, report.null_model, args.alpha, grid)
    _emit(threshold_curves_csv(grid, curves), args, argv, started, args.csv)
    return EXIT_OK


def cmd_simulate(args, argv, started):
    if args.table == "shape":
        if args.full_scale:
            grids = []
            for n in (100, 200, 500, 1000, 2000):
                grids += default_shape_grid(
                    n=n, reps=args.reps, m_blocks=args.m_blocks, seed=args.seed
                )
            cells = shape_study(grids, n_jobs=args.threads)
        else:
            cells = shape_study(
                default_shape_grid(n=args.n, reps=args.reps,
                                   m_blocks=args.m_blocks, seed=args.seed),
                n_jobs=args.threads,
            )
        _emit(shape_table_csv(cells), args, argv, started)
    elif args.table == "gumbel":
        study = gumbel_estimation_study(
            m_blocks=args.m_blocks, reps=args.reps, seed=args.seed
        )
        payload = {
            "true_a": fmt_float(study["true_a"]),
            "true_b": fmt_float(study["true_b"]),
            "m_blocks": study["m_blocks"],
            "reps": study["reps"],
            "location_bias_uncorrected": fmt_float(
                study["location_bias_uncorrected"]),
            "location_bias_corrected": fmt_float(
                study["location_bias_corrected"]),
            "scale_bias": fmt_float(study["scale_bias"]),
        }
        _emit(to_json(payload), args, argv, started)
    else:  # illustration
        bundle = illustration_scenario(seed=args.seed)
        report = bundle["report"]
        payload = {
            "injected_index": bundle["injected_index"],
            "report": report_to_dict(report),
        }
        _emit(to_json(payload), args, argv, started)
        if args.curves_out:
            Path(args.curves_out).write_text(
                threshold_curves_csv(bundle["x_grid"],
                                     bundle["threshold_curves"])
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inflaudit",
        description="Exact subset influence on regression coefficients, "
                    "with extreme-value significance tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit OLS and report the reduced-form fit")
    _add_data_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("influence", help="exact influence of a set or of "
                                         "every single observation")
    _add_data_args(p)
    _add_out_args(p)
    p.add_argument("--set", default=None,
                   help="comma-separated row indices; omit for all singles")
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("search", help="find the most influential set")
    _add_data_args(p)
    _add_search_args(p)
    _add_out_args(p)
    p.add_argument("--exhaustive", action="store_true",
                   help="exact enumeration instead of greedy (small N only)")
    p.set_defaults(func=cmd_search)

    for name, fn in (("audit", cmd_audit), ("thresholds", cmd_thresholds)):
        p = sub.add_parser(
            name,
            help="run the excessive-influence test" if name == "audit"
            else "emit significance-region boundary curves",
        )
        _add_data_args(p)
        _add_search_args(p)
        _add_out_args(p)
        p.add_argument("--pin", default=None,
                       help="comma-separated indices of a pre-named set to "
                            "test instead of searching")
        p.add_argument("--blocks", default="auto",
                       help="block count for the null estimate (default auto)")
        p.add_argument("--alpha", type=float, nargs="+",
                       default=[0.10, 0.05, 0.01],
                       help="significance levels (default 0.10 0.05 0.01)")
        p.add_argument("--seed", type=int, default=0,
                       help="RNG seed for block shuffling (default 0)")
        p.add_argument("--include-observed", action="store_true",
                       help="keep the observed set in the null blocks")
        p.add_argument("--two-sided", action="store_true",
                       help="audit both directions, Bonferroni-combined")
        p.add_argument("--block-strategy",
                       choices=[SHARED_FIT, WITHIN_BLOCK],
                       default=SHARED_FIT,
                       help="how block maxima are computed (default "
                            f"{SHARED_FIT}; see docs)")
        if name == "audit":
            p.add_argument("--blocks-out", default=None,
                           help="also write block maxima to this CSV file")
        else:
            p.add_argument("--grid-points", type=int, default=201,
                           help="feature-grid resolution (default 201)")
        p.set_defaults(func=fn)

    p = sub.add_parser("simulate", help="Monte Carlo studies")
    _add_out_args(p)
    p.add_argument("--table", choices=["shape", "gumbel", "illustration"],
                   required=True, help="which study to run")
    p.add_argument("--reps", type=int, default=200,
                   help="replication count (default 200)")
    p.add_argument("--n", type=int, default=100,
                   help="sample size per draw (default 100)")
    p.add_argument("--m-blocks", type=int, default=500,
                   help="maximal-influence draws per replication, or block "
                        "maxima per fit for the gumbel study (default 500)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--full-scale", action="store_true",
                   help="shape table over all published sample sizes (slow)")
    p.add_argument("--threads", type=int, default=1,
                   help="parallel workers for replications (default 1)")
    p.add_argument("--curves-out", default=None,
                   help="illustration only: write threshold curves CSV here")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        return args.func(args, argv, started)
    except (DataError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
