"""Request handlers shared by the HTTP routes and the command-line client.

Each handler is a pure function of its request model, so the CLI can call
them in-process and the service stays a thin transport wrapper.
"""

from __future__ import annotations

from dataclasses import asdict

from hetscan.benchmark import default_grid, results_to_csv, run_benchmark
from hetscan.config import parse_grid
from hetscan.data import load_csv_text, write_csv_text
from hetscan.heterogeneity import (
    Selection,
    assess,
    choose_grouping,
    recommend_formula,
    report_to_dict,
    select_top_t,
)
from hetscan.service.schemas import (
    AssessRequest,
    AssessResponse,
    BenchmarkRequest,
    BenchmarkResponse,
    SimulateRequest,
    SimulateResponse,
    VerifyRequest,
    VerifyResponse,
)
from hetscan.simulate import SimConfig, generate
from hetscan.tuning import OptConfig
from hetscan.verify import verify_derivatives


def handle_assess(req: AssessRequest) -> AssessResponse:
    """Assess a dataset and recommend a formula.

    Varying slopes go to the grouping with the largest total interaction;
    the remaining groupings keep varying intercepts only.
    """
    dataset = load_csv_text(req.csv_text, req.response, req.groups, req.family)
    report = assess(dataset, OptConfig(rng_seed=req.seed, restarts=req.restarts))
    chosen = choose_grouping(report)
    ranked = select_top_t(report, req.threshold)
    restricted = Selection(
        selected=tuple(
            ranked.selected[k] if k == chosen else ()
            for k in range(len(ranked.selected))
        ),
        threshold=req.threshold,
    )
    formula = recommend_formula(report, restricted)
    payload = report_to_dict(report, formula, req.threshold)
    payload["chosen_grouping"] = report.grouping_names[chosen]
    payload["seed"] = req.seed
    payload["config"] = {
        "response": req.response,
        "groups": list(req.groups),
        "family": req.family,
        "threshold": req.threshold,
        "seed": req.seed,
        "restarts": req.restarts,
    }
    return AssessResponse(**payload)


def _truth_payload(truth, cfg: SimConfig) -> dict:
    return {
        "seed": cfg.seed,
        "config": asdict(cfg),
        "z": [float(v) for v in truth.z],
        "a": float(truth.a),
        "b": [float(v) for v in truth.b],
        "group_intercepts": [[float(v) for v in row] for row in truth.group_intercepts],
        "group_slopes": [
            [[float(v) for v in col] for col in row] for row in truth.group_slopes
        ],
        "mu": [float(v) for v in truth.mu],
        "noise_sd": None if truth.noise_sd is None else float(truth.noise_sd),
        "latent_scale": None
        if truth.latent_scale is None
        else float(truth.latent_scale),
    }


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    """Generate one dataset plus its ground truth."""
    cfg = SimConfig(**req.model_dump())
    dataset, truth = generate(cfg)
    return SimulateResponse(
        data_csv=write_csv_text(dataset), truth=_truth_payload(truth, cfg)
    )


def handle_benchmark(req: BenchmarkRequest) -> BenchmarkResponse:
    """Run the replication benchmark and render its CSV."""
    grid = parse_grid(req.grid_text) if req.grid_text else default_grid()
    results = run_benchmark(
        grid,
        replications=req.reps,
        thresholds=req.thresholds,
        master_seed=req.seed,
        restarts=req.restarts,
    )
    comments = [
        f"seed={req.seed}",
        f"reps={req.reps}",
        "thresholds=" + ",".join(repr(float(t)) for t in req.thresholds),
        f"restarts={req.restarts}",
        "grid=" + ";".join(
            f"family={c.family},D={c.n_predictors},K={c.n_groupings},"
            f"L={c.n_levels},N={c.n_obs}"
            for c in grid
        ),
    ]
    return BenchmarkResponse(csv_text=results_to_csv(results, comments))


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    """Run the analytic-versus-finite-difference check suite."""
    result = verify_derivatives(req.family, req.trials, req.seed, req.tol)
    return VerifyResponse(
        family=result.family,
        trials=result.trials,
        tolerance=result.tolerance,
        errors={name: float(err) for name, err in result.errors.items()},
        passed=result.passed,
        failing=result.failing(),
    )
