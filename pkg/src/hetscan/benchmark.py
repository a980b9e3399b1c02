"""Replication benchmark producing ROC curves across simulation settings.

Each grid cell (a SimConfig) is replicated R times: generate, assess,
select at every threshold, score against ground truth.  Per-replication
seeds derive from (master seed, cell index, replication index), so results
do not depend on the worker schedule.  True/false positive rates are
aggregated into means with 95% percentile intervals.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .data import BERNOULLI, GAUSSIAN
from .heterogeneity import assess, select_top_t
from .simulate import SimConfig, generate, score_selection
from .tuning import OptConfig

CSV_HEADER = (
    "family,D,K,L,N,threshold,tpr_mean,tpr_lo,tpr_hi,"
    "fpr_mean,fpr_lo,fpr_hi,n_ok,n_fail"
)

THREADS_ENV = "HETSCAN_THREADS"

TABLE_D = (5, 10, 15, 20)
TABLE_K = (1, 2, 3)


class BenchmarkError(RuntimeError):
    """A grid cell lost more than 20% of its replications."""

    def __init__(self, message: str, cell: str):
        super().__init__(message)
        self.cell = cell


@dataclass(frozen=True)
class RocPoint:
    """Aggregated ROC coordinates at one selection threshold."""

    threshold: float
    tpr_mean: float
    tpr_lo: float
    tpr_hi: float
    fpr_mean: float
    fpr_lo: float
    fpr_hi: float


@dataclass(frozen=True)
class CellResult:
    """All ROC points for one grid cell, with replication bookkeeping."""

    cfg: SimConfig
    points: tuple[RocPoint, ...]
    n_ok: int
    n_fail: int
    failures: tuple[str, ...]


def default_grid() -> list[SimConfig]:
    """Full crossing of families, predictor counts, and grouping counts."""
    return [
        SimConfig(family=family, n_predictors=d, n_groupings=k)
        for family in (GAUSSIAN, BERNOULLI)
        for d in TABLE_D
        for k in TABLE_K
    ]


def replication_seed(master_seed: int, cell_index: int, rep: int) -> int:
    """Stable per-replication seed, independent of execution order."""
    seq = np.random.SeedSequence((master_seed, cell_index, rep))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _cell_label(cfg: SimConfig) -> str:
    return (
        f"family={cfg.family},D={cfg.n_predictors},K={cfg.n_groupings},"
        f"L={cfg.n_levels},N={cfg.n_obs}"
    )


def _run_one(cfg: SimConfig, seed: int, thresholds, restarts: int):
    dataset, truth = generate(replace(cfg, seed=seed))
    report = assess(dataset, OptConfig(rng_seed=seed, restarts=restarts))
    rates = []
    for t in thresholds:
        selection = select_top_t(report, t)
        rates.append(score_selection(selection, truth))
    return rates


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        count = int(raw)
        if count < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1")
        return count
    return os.cpu_count() or 1


def run_benchmark(
    grid,
    replications: int,
    thresholds,
    master_seed: int = 0,
    restarts: int = 5,
    max_workers: int | None = None,
) -> list[CellResult]:
    """Run every (cell, replication) pair and aggregate ROC points.

    Failed replications are recorded and excluded from the aggregates; a
    cell with more than 20% failures raises :class:`BenchmarkError`.
    """
    grid = list(grid)
    thresholds = [float(t) for t in thresholds]
    if replications < 2:
        raise ValueError("replications must be >= 2 for percentile intervals")
    if not thresholds:
        raise ValueError("need at least one threshold")

    tasks = [
        (ci, rep, replication_seed(master_seed, ci, rep))
        for ci in range(len(grid))
        for rep in range(replications)
    ]
    outcomes: dict[tuple[int, int], object] = {}
    workers = max_workers or worker_count()

    def run_task(task):
        ci, rep, seed = task
        try:
            return (ci, rep), _run_one(grid[ci], seed, thresholds, restarts)
        except Exception as err:  # recorded and judged per cell below
            return (ci, rep), err

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for key, value in pool.map(run_task, tasks):
            outcomes[key] = value

    results = []
    for ci, cfg in enumerate(grid):
        ok_rates = []
        failures = []
        for rep in range(replications):
            value = outcomes[(ci, rep)]
            if isinstance(value, Exception):
                failures.append(f"rep {rep}: {value}")
            else:
                ok_rates.append(value)
        if len(failures) > 0.2 * replications:
            raise BenchmarkError(
                f"cell [{_cell_label(cfg)}] lost {len(failures)} of "
                f"{replications} replications: {failures[0]}",
                cell=_cell_label(cfg),
            )
        points = []
        for ti, t in enumerate(thresholds):
            tprs = np.array([rates[ti][0] for rates in ok_rates])
            fprs = np.array([rates[ti][1] for rates in ok_rates])
            points.append(
                RocPoint(
                    threshold=t,
                    tpr_mean=float(tprs.mean()),
                    tpr_lo=float(np.percentile(tprs, 2.5)),
                    tpr_hi=float(np.percentile(tprs, 97.5)),
                    fpr_mean=float(fprs.mean()),
                    fpr_lo=float(np.percentile(fprs, 2.5)),
                    fpr_hi=float(np.percentile(fprs, 97.5)),
                )
            )
        results.append(
            CellResult(
                cfg=cfg,
                points=tuple(points),
                n_ok=len(ok_rates),
                n_fail=len(failures),
                failures=tuple(failures),
            )
        )
    return results


def results_to_csv(results, comments: list[str] | None = None) -> str:
    """Render cell results as CSV, rows sorted by (family, D, K, threshold).

    ``comments`` become leading '#' lines carrying the seed and resolved
    configuration; the header line below them is fixed.
    """
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(CSV_HEADER)
    rows = []
    for res in results:
        cfg = res.cfg
        for pt in res.points:
            rows.append(
                (
                    cfg.family,
                    cfg.n_predictors,
                    cfg.n_groupings,
                    cfg.n_levels,
                    cfg.n_obs,
                    pt.threshold,
                    pt,
                    res.n_ok,
                    res.n_fail,
                )
            )
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[5]))
    for family, d, k, levels, n, t, pt, n_ok, n_fail in rows:
        values = [
            pt.tpr_mean, pt.tpr_lo, pt.tpr_hi,
            pt.fpr_mean, pt.fpr_lo, pt.fpr_hi,
        ]
        lines.append(
            f"{family},{d},{k},{levels},{n},{repr(float(t))},"
            + ",".join(repr(float(v)) for v in values)
            + f",{n_ok},{n_fail}"
        )
    return "\n".join(lines) + "\n"


def auc_of_points(points) -> float:
    """Trapezoidal area under the mean ROC, anchored at (0,0) and (1,1)."""
    coords = sorted(
        [(0.0, 0.0), (1.0, 1.0)] + [(p.fpr_mean, p.tpr_mean) for p in points]
    )
    area = 0.0
    for (x0, y0), (x1, y1) in zip(coords[:-1], coords[1:]):
        area += 0.5 * (y0 + y1) * (x1 - x0)
    return area
