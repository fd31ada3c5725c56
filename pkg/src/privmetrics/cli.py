"""Command-line front end: every engine on file inputs, machine-readable out.

Exit codes: 0 success, 2 invalid input, 3 an SDC criterion is infinite,
4 a tradeoff point failed to converge or was infeasible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import jsonio
from .bayes import LossMatrix, Scenario, privacy_report
from .errors import ConvergenceError, InvalidArgumentError, PrivmetricsError
from .information import (DEFAULT_ENUMERATION_CAP, jointly_typical_fraction,
                          kl_divergence, mutual_information, pinsker_bound,
                          renyi_entropy, typical_set)
from .microdata import epsilon_max_log_ratio, sdc_report, table_from_csv
from .probability import JointPmf, Pmf
from .scenarios import (CrowdsConfig, crowds_posterior, crowds_privacy,
                        crowds_simulate, lbs_privacy, make_grid,
                        posterior_z_scores)
from .tradeoff import frontier


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _read_json(path: str):
    return json.loads(_read_text(path))


def _load_pmf(path: str) -> Pmf:
    return Pmf.from_dict(_read_json(path))


def cmd_metrics(args) -> tuple[str, int]:
    pmf = _load_pmf(args.pmf)
    h_inf = renyi_entropy(pmf, math.inf)
    out = {
        "h0": renyi_entropy(pmf, 0.0),
        "h1": renyi_entropy(pmf, 1.0),
        "h_inf": h_inf,
    }
    if args.alpha:
        out["alpha_entropies"] = {
            jsonio.format_float(a): renyi_entropy(pmf, a) for a in args.alpha
        }
    if args.second is not None:
        second = _load_pmf(args.second)
        tv, bound = pinsker_bound(pmf, second)
        out["comparison"] = {
            "kl": kl_divergence(pmf, second),
            "tv": tv,
            "pinsker_bound": bound,
            "epsilon_max_log_ratio": epsilon_max_log_ratio(pmf, second),
        }
    if args.joint is not None:
        joint = JointPmf.from_dict(_read_json(args.joint))
        out["mutual_information"] = mutual_information(joint)
    return jsonio.dumps(out), 0


def cmd_privacy(args) -> tuple[str, int]:
    scenario = Scenario.from_dict(_read_json(args.scenario))
    return jsonio.dumps(privacy_report(scenario).to_dict()), 0


def cmd_sdc(args) -> tuple[str, int]:
    roles_obj = _read_json(args.roles)
    if not isinstance(roles_obj, dict) or "roles" not in roles_obj:
        raise InvalidArgumentError("roles file must contain a 'roles' object")
    table = table_from_csv(_read_text(args.csv), roles_obj["roles"])
    prior = _load_pmf(args.prior) if args.prior else None
    if args.confidential:
        columns = [args.confidential]
    else:
        columns = list(table.columns_with_role("confidential"))
        if not columns:
            raise InvalidArgumentError("no column has the confidential role")
    reports = [sdc_report(table, column, prior) for column in columns]
    code = 3 if any(r.has_infinite_criterion() for r in reports) else 0
    return jsonio.dumps({"reports": [r.to_dict() for r in reports]}), code


def cmd_tradeoff(args) -> tuple[str, int]:
    prior = _load_pmf(args.prior)
    loss = LossMatrix.from_dict(_read_json(args.loss), prior.alphabet)
    curve = frontier(prior, loss, args.budget)
    code = 0 if all(p.status == "ok" for p in curve.points) else 4
    if args.dump_channels:
        directory = Path(args.dump_channels)
        directory.mkdir(parents=True, exist_ok=True)
        for i, point in enumerate(curve.points):
            if point.channel is not None:
                path = directory / f"point{i}.json"
                path.write_text(jsonio.dumps(point.channel.to_dict()),
                                encoding="utf-8")

    def field(value):
        return None if value is None or math.isnan(value) else value

    if args.format == "json":
        payload = {
            "points": [
                {
                    "D": p.distortion_budget,
                    "achieved_D": field(p.achieved_distortion),
                    "I_bits": field(p.mutual_info),
                    "slope": field(p.slope),
                    "status": p.status,
                }
                for p in curve.points
            ]
        }
        return jsonio.dumps(payload), code
    lines = ["D,achieved_D,I_bits,slope,status"]
    for p in curve.points:
        slope = p.slope if p.slope is not None else math.nan
        achieved = p.achieved_distortion
        info = p.mutual_info
        if p.status != "ok" and math.isnan(achieved):
            lines.append(f"{jsonio.format_float(p.distortion_budget)},,,,{p.status}")
        else:
            lines.append(jsonio.csv_line(
                [p.distortion_budget, achieved, info, slope]) + f",{p.status}")
    return "\n".join(lines) + "\n", code


def cmd_crowds(args) -> tuple[str, int]:
    config = CrowdsConfig(n=args.n, p=args.p, trials=args.trials, seed=args.seed)
    analytic = crowds_privacy(args.n, args.p)
    post = crowds_posterior(args.n, args.p, 0)
    empirical = crowds_simulate(config, threads=args.threads)
    z = posterior_z_scores(empirical, args.n, args.p, config.trials)
    empirical_map_error = 1.0 - float(empirical.probs.max(axis=0).sum())

    out = {
        "n": args.n,
        "p": args.p,
        "trials": config.trials,
        "seed": config.seed,
        "analytic": {
            "privacy": analytic.formula_privacy,
            "pipeline_privacy": analytic.pipeline_privacy,
            "posterior_max": float(post.probs.max()),
            "h_min": analytic.h_min,
            "h_shannon": analytic.h_shannon,
            "h_hartley": analytic.h_hartley,
        },
        "empirical": {
            "map_error": empirical_map_error,
            "max_abs_z": float(np.abs(z).max()),
            "max_abs_z_per_observation": [
                float(v) for v in np.abs(z).max(axis=0)
            ],
        },
    }
    return jsonio.dumps(out), 0


def cmd_lbs(args) -> tuple[str, int]:
    config = _read_json(args.grid)
    if not isinstance(config, dict):
        raise InvalidArgumentError("grid config must be a JSON object")
    known = {"width", "height", "cell_size", "prior", "noise"}
    unknown = config.keys() - known
    if unknown:
        raise InvalidArgumentError(f"unknown grid keys: {sorted(unknown)}")
    for key in ("width", "height"):
        if key not in config:
            raise InvalidArgumentError(f"grid config is missing {key!r}")
    sigma = None
    noise_rows = None
    noise = config.get("noise")
    if noise is not None:
        kind = noise.get("kind")
        if kind == "gaussian":
            sigma = float(noise["sigma"])
        elif kind == "rows":
            noise_rows = noise["rows"]
        elif kind != "identity":
            raise InvalidArgumentError(f"unknown noise kind {kind!r}")
    prior = config.get("prior")
    if prior == "uniform":
        prior = None
    grid = make_grid(int(config["width"]), int(config["height"]),
                     float(config.get("cell_size", 1.0)),
                     prior=prior, sigma=sigma, noise_rows=noise_rows)
    result = lbs_privacy(grid)
    out = {
        "width": grid.width,
        "height": grid.height,
        "cell_size": grid.cell_size,
        "mse_grid": result.mse_grid,
        "mse_mean": result.mse_mean,
        "per_observation": [
            {
                "y": obs.y_symbol,
                "probability": obs.probability,
                "grid_estimate": obs.grid_estimate,
                "grid_risk": obs.grid_risk,
                "mean_point": list(obs.mean_point),
                "mean_risk": obs.mean_risk,
            }
            for obs in result.per_observation
        ],
    }
    return jsonio.dumps(out), 0


def cmd_typical(args) -> tuple[str, int]:
    if (args.pmf is None) == (args.joint is None):
        raise InvalidArgumentError("give either a pmf or --joint, not both")
    cap = args.cap if args.cap is not None else DEFAULT_ENUMERATION_CAP
    if args.pmf is not None:
        result = typical_set(_load_pmf(args.pmf), args.k, args.eps,
                             cap=cap, threads=args.threads)
        out = {
            "k": result.k,
            "epsilon": result.epsilon,
            "member_count": result.member_count,
            "total_probability": result.total_probability,
            "cardinality_bound": result.cardinality_bound,
            "min_member_rate": result.min_member_rate,
            "max_member_rate": result.max_member_rate,
        }
    else:
        joint = JointPmf.from_dict(_read_json(args.joint))
        fraction = jointly_typical_fraction(joint, args.k, args.eps,
                                            cap=cap, threads=args.threads)
        out = {"k": args.k, "epsilon": args.eps,
               "jointly_typical_fraction": fraction}
    return jsonio.dumps(out), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privmetrics",
        description="Privacy metrics as an attacker's estimation error.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("metrics", help="entropies and divergences of pmfs")
    p.add_argument("pmf", help="pmf JSON file")
    p.add_argument("second", nargs="?", help="second pmf for divergences")
    p.add_argument("--joint", help="joint pmf JSON for mutual information")
    p.add_argument("--alpha", action="append", type=float, default=[],
                   help="additional entropy orders (repeatable)")
    add_out(p)

    p = sub.add_parser("privacy", help="privacy report for a scenario")
    p.add_argument("scenario", help="scenario JSON file")
    add_out(p)

    p = sub.add_parser("sdc", help="disclosure criteria for a released table")
    p.add_argument("csv", help="table CSV with header row")
    p.add_argument("roles", help="roles JSON file")
    p.add_argument("--confidential", help="evaluate just this column")
    p.add_argument("--prior", help="external prior pmf JSON")
    add_out(p)

    p = sub.add_parser("tradeoff", help="information-distortion frontier")
    p.add_argument("prior", help="prior pmf JSON")
    p.add_argument("loss", help="loss JSON ({'kind': ...})")
    p.add_argument("--budget", action="append", type=float, required=True,
                   help="distortion budget (repeatable, ascending)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dump-channels", metavar="DIR",
                   help="write the optimizing channel per point")
    add_out(p)

    p = sub.add_parser("crowds", help="forwarding-protocol privacy")
    p.add_argument("--n", type=int, required=True, help="number of users")
    p.add_argument("--p", type=float, required=True,
                   help="direct-submission probability")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    add_out(p)

    p = sub.add_parser("lbs", help="grid-perturbation location privacy")
    p.add_argument("--grid", required=True, help="grid config JSON")
    add_out(p)

    p = sub.add_parser("typical", help="typical-set enumeration")
    p.add_argument("pmf", nargs="?", help="pmf JSON file")
    p.add_argument("--joint", help="joint pmf JSON (jointly typical fraction)")
    p.add_argument("--k", type=int, required=True, help="sequence length")
    p.add_argument("--eps", type=float, required=True,
                   help="typicality width in bits/symbol")
    p.add_argument("--cap", type=int, default=None,
                   help="enumeration cap override")
    p.add_argument("--threads", type=int, default=1)
    add_out(p)

    return parser


_COMMANDS = {
    "metrics": cmd_metrics,
    "privacy": cmd_privacy,
    "sdc": cmd_sdc,
    "tradeoff": cmd_tradeoff,
    "crowds": cmd_crowds,
    "lbs": cmd_lbs,
    "typical": cmd_typical,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = _COMMANDS[args.command](args)
    except json.JSONDecodeError as err:
        print(f"error: invalid JSON at line {err.lineno} column {err.colno}: "
              f"{err.msg}", file=sys.stderr)
        return 2
    except ConvergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except (PrivmetricsError, OSError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
