"""Command-line front end.

Subcommands: ``analyze`` (fit a model roster to one dataset), ``simulate``
(replicated study from a config), ``prior-ar`` (prior acceptance rates,
optionally swept), ``bounds`` (identification intervals and falsifiability),
``heckman`` (fit the selection model to row data).

Evidence against an assumption (budget exhaustion, falsification) is a
result and exits 0; only I/O and configuration problems exit nonzero.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cells import ObservedCellParams
from .evidence import bayes_factor, falsifiability_check, prior_acceptance_rate
from .heckman import GibbsConfig, heckman_fit
from .io import (
    InputFormatError,
    counts_from_heckman_data,
    fmt,
    parse_analysis_config,
    parse_study_config,
    read_counts_csv,
    read_qtable_csv,
    read_rows_csv,
    sniff_input_kind,
    write_chain_csv,
    write_counts_csv,
    write_draws_csv,
)
from .restrictions import (
    INFEASIBLE,
    AssumptionSpec,
    Infeasible,
    exact_iv_omega_intervals,
    exact_iv_posbias_intervals,
    imperfect_iv_omega_bounds,
)
from .saturated import (
    credible_interval,
    mar_estimate,
    risk_difference_bounds,
    risk_difference_draws,
)
from .simulate import ModelSpec, default_models, prior_ar_sweep, run_study

_DEFAULT_SEED = 20240801


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=_DEFAULT_SEED, help="64-bit master seed")
    parser.add_argument("--draws", type=int, default=None, help="accepted-draw target")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--config", type=Path, default=None, help="INI-style config file")


def _outdir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _interval_rows(name, psi, levels):
    rows = []
    for level in sorted(levels):
        summary = credible_interval(psi, level)
        rows.append([name, fmt(level), fmt(summary.lower), fmt(summary.mean), fmt(summary.upper)])
    return rows


def _manifest(path: Path, args, extra: dict) -> None:
    payload = {
        "seed": args.seed,
        "versions": {"mnarbounds": __version__, "numpy": np.__version__, "python": sys.version.split()[0]},
    }
    if args.config is not None:
        digest = hashlib.sha256(Path(args.config).read_bytes()).hexdigest()
        payload["config"] = {"path": str(args.config), "sha256": digest}
    payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_analyze(args) -> int:
    out = _outdir(args)
    kind = sniff_input_kind(args.input)
    rows = None
    if kind == "rows":
        rows = read_rows_csv(args.input)
        counts = counts_from_heckman_data(rows)
    elif kind == "counts":
        counts = read_counts_csv(args.input)
    else:
        raise InputFormatError(f"{args.input}: analyze expects counts or row-level input")

    if args.config is not None:
        cfg = parse_analysis_config(args.config)
    else:
        cfg = {"models": [], "draws": 4000, "seed": args.seed, "levels": [0.80, 0.95], "qz_fixed": None}
    if not cfg["models"]:
        models = [
            ModelSpec("MAR", "mar"),
            ModelSpec("Sat", "assumption", AssumptionSpec.none()),
            ModelSpec("BetaBias", "assumption", AssumptionSpec.lognormal_betabias(0.4, 5.0, 2.0)),
        ]
        if rows is not None:
            models.insert(2, ModelSpec("Heckman", "heckman", gibbs=GibbsConfig()))
        cfg["models"] = models
    draws = args.draws or cfg["draws"]
    seed = args.seed if args.seed != _DEFAULT_SEED else cfg["seed"]
    levels = cfg["levels"]
    qz_fixed = cfg["qz_fixed"]

    write_counts_csv(counts, out / "counts.csv")  # echo of the parsed input
    interval_rows = []
    report: dict = {"models": {}}
    for model in cfg["models"]:
        entry: dict = {"family": model.family}
        psi = None
        if model.family == "mar":
            post = mar_estimate(counts, draws, seed, qz_fixed=qz_fixed)
            psi = risk_difference_draws(post)
            write_draws_csv(post, psi, out / f"draws_{model.name}.csv")
        elif model.family == "heckman":
            if rows is None:
                raise InputFormatError("the selection model needs row-level input")
            chain = heckman_fit(rows, model.gibbs or GibbsConfig(), seed)
            psi = chain.psi
            write_chain_csv(chain, out / f"chain_{model.name}.csv")
        elif model.family == "oracle":
            raise InputFormatError("oracle models only exist inside simulations")
        else:
            spec = model.assumption
            acc, post = bayes_factor(spec, counts, draws, seed, qz_fixed=qz_fixed)
            entry["acceptance"] = acc.to_json_dict()
            entry["computed"] = acc.computed
            if post is not None:
                psi = risk_difference_draws(post)
                write_draws_csv(post, psi, out / f"draws_{model.name}.csv")
        if psi is not None:
            entry["psi_mean"] = float(np.mean(psi))
            entry["prob_positive"] = float(np.mean(psi > 0))
            entry["intervals"] = {
                fmt(level): {
                    "lower": credible_interval(psi, level).lower,
                    "upper": credible_interval(psi, level).upper,
                }
                for level in levels
            }
            interval_rows.extend(_interval_rows(model.name, psi, levels))
        report["models"][model.name] = entry

    with open(out / "intervals.csv", "w", newline="") as fh:
        fh.write("model,level,lo,mean,hi\n")
        for row in interval_rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _manifest(out / "manifest.json", args, {"input": str(args.input), "command": "analyze"})
    return 0


def cmd_simulate(args) -> int:
    out = _outdir(args)
    if args.config is None:
        raise InputFormatError("simulate needs --config with [dgp], [study] and model sections")
    cfg = parse_study_config(args.config)
    models = cfg["models"] or default_models()
    seed = args.seed if args.seed != _DEFAULT_SEED else cfg["seed"]
    replicates = args.replicates if args.replicates is not None else cfg["replicates"]
    result = run_study(
        cfg["dgp"],
        models,
        replicates,
        seed,
        draws=args.draws or cfg["draws"],
        level=cfg["level"],
        qz_fixed=cfg["qz_fixed"],
    )
    with open(out / "results.csv", "w", newline="") as fh:
        fh.write("model,ar,bf_geomean,computed,coverage,width\n")
        for s in result.summaries:
            cells = [
                s.model,
                fmt(s.mean_ar) if s.mean_ar is not None else "",
                fmt(s.bf_geomean) if s.bf_geomean is not None else "",
                fmt(s.computed_frac),
                fmt(s.coverage) if s.coverage is not None else "",
                fmt(s.mean_width) if s.mean_width is not None else "",
            ]
            fh.write(",".join(cells) + "\n")
    _manifest(
        out / "manifest.json",
        args,
        {
            "command": "simulate",
            "replicates": result.replicates,
            "level": result.level,
            "dgp": {
                "kind": result.dgp.kind,
                "n": result.dgp.n,
                "target_missing": result.dgp.target_missing,
                "iv_holds": result.dgp.iv_holds,
                "bias_direction": result.dgp.bias_direction,
            },
        },
    )
    return 0


_FIVE_DEFAULT_SPECS = (
    AssumptionSpec.exact_iv(),
    AssumptionSpec.threshold_iv(2.0 / 3.0, 1.5),
    AssumptionSpec.lognormal_iv(0.4),
    AssumptionSpec.exact_iv_posbias(),
    AssumptionSpec.lognormal_betabias(0.4, 4.0, 2.0),
)


def cmd_prior_ar(args) -> int:
    out = _outdir(args)
    if args.attempts < 1:
        raise InputFormatError("--attempts must be positive")
    rows = []
    if args.sweep:
        grid = list(range(1, args.sweep_max + 1))
        rows = prior_ar_sweep(grid, _FIVE_DEFAULT_SPECS, args.attempts, args.seed)
    else:
        for spec in _FIVE_DEFAULT_SPECS:
            rate, se = prior_acceptance_rate(spec, args.attempts, args.seed)
            rows.append({"kind": spec.kind.value, "alpha3": 1.0, "ar": rate, "se": se})
    with open(out / "prior_ar.csv", "w", newline="") as fh:
        fh.write("kind,alpha3,ar,se\n")
        for row in rows:
            fh.write(f"{row['kind']},{fmt(row['alpha3'])},{fmt(row['ar'])},{fmt(row['se'])}\n")
    for row in rows:
        print(f"{row['kind']:>20s}  alpha3={row['alpha3']:g}  ar={row['ar']:.4f}  se={row['se']:.4f}")
    return 0


def _interval_json(iv):
    if isinstance(iv, Infeasible) or iv is INFEASIBLE:
        return "infeasible"
    return {"lo": iv.lo, "hi": iv.hi}


def cmd_bounds(args) -> int:
    out = _outdir(args)
    kind = sniff_input_kind(args.input)
    if kind == "counts":
        counts = read_counts_csv(args.input)
        q = []
        for cell in counts.cells:
            total = cell.total
            if total == 0:
                raise InputFormatError(f"{args.input}: empty cell, no q-table to derive")
            q.append(ObservedCellParams(cell.n10 / total, cell.n11 / total, cell.n0dot / total))
        q = tuple(q)
    elif kind == "qtable":
        q = read_qtable_csv(args.input)
    else:
        raise InputFormatError(f"{args.input}: bounds expects counts or a q-table")

    t_l = args.t_l
    t_h = args.t_h
    report = {
        "psi_bounds_no_assumptions": risk_difference_bounds(q, args.qz),
        "falsifiability": {k.value: v for k, v in falsifiability_check(q, t_l, t_h).items()},
        "exact_iv": {},
        "exact_iv_posbias": {},
        "threshold_iv": {"t_l": t_l, "t_h": t_h},
    }
    for x, stratum in enumerate(exact_iv_omega_intervals(q)):
        report["exact_iv"][f"arm_x{x}"] = {
            "omega_z1": _interval_json(stratum.omega_z1),
            "omega_z0": _interval_json(stratum.omega_z0),
            "dirac_offset": stratum.dirac_offset,
            "dirac_slope": stratum.dirac_slope,
        }
    for x, stratum in enumerate(exact_iv_posbias_intervals(q)):
        report["exact_iv_posbias"][f"arm_x{x}"] = {
            "omega_z1": _interval_json(stratum.omega_z1),
            "omega_z0": _interval_json(stratum.omega_z0),
        }
    for x in (0, 1):
        iv_z0, iv_z1 = imperfect_iv_omega_bounds(q[2 * x], q[2 * x + 1], t_l, t_h)
        report["threshold_iv"][f"arm_x{x}"] = {
            "omega_z0": _interval_json(iv_z0),
            "omega_z1": _interval_json(iv_z1),
        }
    text = json.dumps(report, indent=2, sort_keys=True)
    (out / "bounds.json").write_text(text + "\n")
    print(text)
    return 0


def cmd_heckman(args) -> int:
    out = _outdir(args)
    rows = read_rows_csv(args.input)
    config = GibbsConfig(iterations=args.iterations, burn_in=args.burn_in)
    chain = heckman_fit(rows, config, args.seed)
    write_chain_csv(chain, out / "chain.csv")
    summary = {
        "gamma_mean": [float(v) for v in chain.gamma.mean(axis=0)],
        "beta_mean": [float(v) for v in chain.beta.mean(axis=0)],
        "rho_mean": float(chain.rho.mean()),
        "psi_mean": float(chain.psi.mean()),
        "psi_interval_90": {
            "lower": credible_interval(chain.psi, 0.90).lower,
            "upper": credible_interval(chain.psi, 0.90).upper,
        },
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnarbounds",
        description="Partially identified treatment effects under nonignorable missingness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="fit a model roster to one dataset")
    p.add_argument("input", type=Path, help="counts CSV or row-level CSV")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="replicated study from a config file")
    _add_common(p)
    p.add_argument(
        "--replicates", type=int, default=None,
        help="override the config's replicate count (e.g. 200 for full-scale runs)",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prior-ar", help="prior acceptance rates of the restricted samplers")
    _add_common(p)
    p.add_argument("--attempts", type=int, default=200_000, help="proposals per treatment arm")
    p.add_argument("--sweep", action="store_true", help="sweep the missing-mass pseudo-count")
    p.add_argument("--sweep-max", type=int, default=10, help="largest grid value for --sweep")
    p.set_defaults(func=cmd_prior_ar)

    p = sub.add_parser("bounds", help="identification intervals and falsifiability flags")
    p.add_argument("input", type=Path, help="counts CSV or q-table CSV")
    _add_common(p)
    p.add_argument("--qz", type=float, default=0.5, help="weight P(Z=1) for the contrast")
    p.add_argument("--t-l", dest="t_l", type=float, default=2.0 / 3.0)
    p.add_argument("--t-h", dest="t_h", type=float, default=1.5)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("heckman", help="fit the selection model to row-level data")
    p.add_argument("input", type=Path, help="row-level CSV")
    _add_common(p)
    p.add_argument("--iterations", type=int, default=5000)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=1000)
    p.set_defaults(func=cmd_heckman)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
