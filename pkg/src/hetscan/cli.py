"""Command-line front end.

Subcommands: assess, simulate, benchmark, verify-derivatives.  All commands
are deterministic functions of their arguments, input files and seed, and
every output artifact embeds the seed and resolved configuration.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from pydantic import ValidationError

from hetscan.benchmark import BenchmarkError
from hetscan.config import ConfigError, parse_sim_config
from hetscan.data import BERNOULLI, FAMILIES, GAUSSIAN, DataError
from hetscan.gp import CholeskyError, ConvergenceError
from hetscan.service.handlers import (
    handle_assess,
    handle_benchmark,
    handle_simulate,
    handle_verify,
)
from hetscan.service.schemas import (
    AssessRequest,
    BenchmarkRequest,
    SimulateRequest,
    VerifyRequest,
)
from hetscan.tuning import OptimizationError

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return fh.read()


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _parse_thresholds(raw: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse thresholds {raw!r}") from None
    if not values:
        raise ConfigError("no thresholds given")
    for t in values:
        if not (0.0 <= t <= 1.0):
            raise ConfigError(f"threshold {t} outside [0, 1]")
    return values


def cmd_assess(args) -> int:
    if not (0.0 <= args.threshold <= 1.0):
        raise ConfigError(f"threshold {args.threshold} outside [0, 1]")
    request = AssessRequest(
        csv_text=_read_text(args.data),
        response=args.response,
        groups=[g.strip() for g in args.groups.split(",") if g.strip()],
        family=args.family,
        threshold=args.threshold,
        seed=args.seed,
        restarts=args.restarts,
    )
    response = handle_assess(request)
    _write_text(args.out, _json_text(response.model_dump(exclude_none=True)))

    print(response.formula)
    print(f"chosen grouping: {response.chosen_grouping}")
    for k, gname in enumerate(response.groupings):
        column = [(response.slope_matrix[d][k], d) for d in range(len(response.predictors))]
        column.sort(key=lambda pair: (-pair[0], pair[1]))
        ranked = " ".join(
            f"{response.predictors[d]}={value:.6g}" for value, d in column
        )
        print(f"{gname}: {ranked}")
    return 0


def cmd_simulate(args) -> int:
    cfg = parse_sim_config(_read_text(args.config)) if args.config else None
    fields = asdict(cfg) if cfg else {}
    fields.pop("seed", None)
    request = SimulateRequest(seed=args.seed, **fields)
    response = handle_simulate(request)
    _write_text(args.out_data, response.data_csv)
    _write_text(args.out_truth, _json_text(response.truth))
    print(f"wrote {args.out_data} and {args.out_truth}")
    return 0


def cmd_benchmark(args) -> int:
    if args.reps < 2:
        raise ConfigError("percentile intervals need --reps >= 2")
    request = BenchmarkRequest(
        reps=args.reps,
        thresholds=_parse_thresholds(args.thresholds),
        seed=args.seed,
        restarts=args.restarts,
        grid_text=_read_text(args.grid) if args.grid else None,
    )
    response = handle_benchmark(request)
    _write_text(args.out, response.csv_text)
    print(f"wrote {args.out}")
    return 0


def cmd_verify_derivatives(args) -> int:
    request = VerifyRequest(
        family=args.family, trials=args.trials, seed=args.seed, tol=args.tol
    )
    response = handle_verify(request)
    print(
        f"family={response.family} trials={response.trials} "
        f"tol={response.tolerance:g} seed={args.seed}"
    )
    for name, err in response.errors.items():
        status = "PASS" if err < response.tolerance else "FAIL"
        print(f"{name:20s} max rel err {err:.3e}  {status}")
    if not response.passed:
        print("failing checks: " + ", ".join(response.failing), file=sys.stderr)
        return RUNTIME_ERROR
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetscan",
        description="Detect group heterogeneity and recommend a multilevel model formula.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="assess a CSV dataset and recommend a formula")
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument("--response", required=True, help="response column name")
    p.add_argument("--groups", required=True, help="comma-separated grouping columns")
    p.add_argument("--family", required=True, choices=list(FAMILIES))
    p.add_argument("--threshold", type=float, default=1.0, help="top-T fraction t")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--out", required=True, help="output report JSON path")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("simulate", help="generate a dataset with ground truth")
    p.add_argument("--config", help="key=value settings file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-data", required=True, help="output dataset CSV path")
    p.add_argument("--out-truth", required=True, help="output ground-truth JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="run the replication ROC benchmark")
    p.add_argument("--grid", help="grid file with one [section] per cell")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated fractions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser(
        "verify-derivatives", help="check analytic derivatives against oracles"
    )
    p.add_argument("--family", required=True, choices=list(FAMILIES))
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify_derivatives)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except BenchmarkError as err:
        print(f"error: cell aborted: {err.cell}: {err}", file=sys.stderr)
        return RUNTIME_ERROR
    except (
        DataError,
        OptimizationError,
        CholeskyError,
        ConvergenceError,
        OSError,
        ValueError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
