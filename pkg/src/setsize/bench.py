"""Seeded trial batteries, per-cell summaries and CSV/JSON output.

Every trial draws its seed from ``(master seed, w, epsilon, trial index)``
through :class:`numpy.random.SeedSequence`, then splits it into three
independent streams: the hidden set, the oracle session and the estimator.
Reports are sorted cell-major, trial-minor before they are written, so the
output bytes do not depend on how many worker processes ran the trials.
Wall time is only recorded with ``timing=True``; otherwise the column is
empty so that repeated runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .config import EstimatorConfig
from .domain import Grid, HiddenSet, Hypercube, Line, SubsetFamily
from .errors import InvalidParams
from .oracle import OracleSession
from .registry import ESTIMATORS

SHAPE_FAMILIES = {
    "line": [SubsetFamily.UNIVERSE_ONLY, SubsetFamily.INTERVALS, SubsetFamily.UNRESTRICTED],
    "grid": [SubsetFamily.UNIVERSE_ONLY, SubsetFamily.SUBGRIDS, SubsetFamily.UNRESTRICTED],
    "cube": [SubsetFamily.UNIVERSE_ONLY, SubsetFamily.SUBCUBES, SubsetFamily.UNRESTRICTED],
}


@dataclass
class BenchConfig:
    estimator: str
    w: list
    eps: list
    trials: int = 100
    seed: int = 0
    n: int | None = None
    dims: list | None = None
    cube_d: int | None = None
    family: str | None = None
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    timing: bool = False

    def shape(self):
        given = [x is not None for x in (self.n, self.dims, self.cube_d)]
        if sum(given) != 1:
            raise InvalidParams("give exactly one of n, dims or cube_d")
        if self.dims is not None:
            return Grid(tuple(self.dims))
        if self.cube_d is not None:
            return Hypercube(int(self.cube_d))
        return Line(int(self.n))

    def subset_family(self) -> SubsetFamily:
        entry = ESTIMATORS[self.estimator]
        if self.family is None:
            return entry.family
        try:
            return SubsetFamily(self.family)
        except ValueError:
            raise InvalidParams(f"unknown family {self.family!r}") from None

    def validate(self) -> None:
        if self.estimator not in ESTIMATORS:
            raise InvalidParams(
                f"unknown estimator {self.estimator!r}; choose from {sorted(ESTIMATORS)}"
            )
        if self.trials < 1:
            raise InvalidParams("trials must be >= 1")
        if not self.w or not self.eps:
            raise InvalidParams("w and eps lists must be non-empty")
        if self.format not in ("csv", "json"):
            raise InvalidParams(f"format must be csv or json, got {self.format!r}")
        if self.workers < 1:
            raise InvalidParams("workers must be >= 1")
        shape = self.shape()
        entry = ESTIMATORS[self.estimator]
        kind = "cube" if isinstance(shape, Hypercube) else ("grid" if shape.d > 1 else "line")
        if entry.shape == "cube" and kind != "cube":
            raise InvalidParams(f"{self.estimator} needs a hypercube (--cube-d)")
        if entry.shape == "grid" and kind == "cube":
            raise InvalidParams(f"{self.estimator} needs a grid (--dims)")
        if entry.family is SubsetFamily.INTERVALS and kind != "line":
            raise InvalidParams(f"{self.estimator} needs a line universe (--n)")
        chain = SHAPE_FAMILIES[entry.shape if entry.shape != "line" else kind]
        family = self.subset_family()
        if family not in chain[chain.index(entry.family):]:
            raise InvalidParams(f"{self.estimator} cannot run with family {family.value}")
        for w in self.w:
            if not 0 <= int(w) <= shape.n:
                raise InvalidParams(f"w = {w} outside [0, n = {shape.n}]")
        for eps in self.eps:
            EstimatorConfig.from_dict({**self.params, "epsilon": float(eps)})

    def cells(self) -> list[tuple[int, float]]:
        return [(int(w), float(e)) for w in self.w for e in self.eps]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrialReport:
    estimator: str
    n: int
    w: int
    epsilon: float
    seed: int
    w_hat: float | None
    queries: int
    samples: int
    status: str
    wall_time: float | None = None

    @property
    def cost(self) -> int:
        return self.queries + self.samples


REPORT_FIELDS = [f.name for f in fields(TrialReport)]


def trial_seed(master: int, w: int, epsilon: float, trial: int) -> int:
    ss = np.random.SeedSequence(int(master), spawn_key=(int(w), round(epsilon * 1_000_000), trial))
    lo, hi = ss.generate_state(2, np.uint32).tolist()
    return (hi << 32) | lo


def run_trial(estimator: str, shape, family: SubsetFamily, w: int, epsilon: float, seed: int,
              params: dict | None = None, timing: bool = False) -> TrialReport:
    entry = ESTIMATORS[estimator]
    inst_ss, sess_ss, est_ss = np.random.SeedSequence(seed).spawn(3)
    hidden = HiddenSet.random(shape.n, w, np.random.default_rng(inst_ss))
    session = OracleSession(shape, hidden, family, rng=np.random.default_rng(sess_ss))
    config = EstimatorConfig.from_dict({**(params or {}), "epsilon": epsilon})
    start = time.perf_counter()
    est = entry.run(session, config, np.random.default_rng(est_ss))
    elapsed = time.perf_counter() - start
    status, value = est.status, est.value
    if estimator == "exact-recover" and est.info.get("elements") != hidden.elements.tolist():
        status, value = "failed", None
    return TrialReport(estimator, shape.n, w, epsilon, seed, value, est.queries, est.samples,
                       status, round(elapsed, 6) if timing else None)


def _run_task(task):
    return run_trial(*task)


def run_trials(config: BenchConfig) -> list[TrialReport]:
    """One report per (cell, trial) in canonical order."""
    config.validate()
    shape = config.shape()
    family = config.subset_family()
    tasks = []
    for w, eps in config.cells():
        for t in range(config.trials):
            seed = trial_seed(config.seed, w, eps, t)
            tasks.append((config.estimator, shape, family, w, eps, seed, config.params, config.timing))
    if config.workers > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(_run_task, tasks, chunksize=chunk))
    else:
        reports = [_run_task(t) for t in tasks]
    order = {(w, e): i for i, (w, e) in enumerate(config.cells())}
    keyed = sorted(zip(range(len(reports)), reports),
                   key=lambda p: (order[(p[1].w, p[1].epsilon)], p[0]))
    return [r for _, r in keyed]


# --- summaries ---------------------------------------------------------------------


@dataclass
class CellSummary:
    estimator: str
    n: int
    w: int
    epsilon: float
    trials: int
    completed: int
    success_rate: float | None
    success_rate_all: float
    median_cost: float
    mean_cost: float
    p95_cost: float
    failed: int
    cap: int


SUMMARY_FIELDS = [f.name for f in fields(CellSummary)]


def report_success(r: TrialReport) -> bool:
    if r.status != "ok":
        return False
    if r.estimator == "exact-recover":
        return True
    return r.w / (1 + r.epsilon) <= r.w_hat <= (1 + r.epsilon) * r.w


def summarize(reports: list[TrialReport]) -> list[CellSummary]:
    """Per-cell aggregates, cells in order of first appearance.

    ``success_rate`` is over completed trials; ``success_rate_all`` counts
    failed and capped trials as misses. For exact recovery a trial succeeds
    when the recovered set is exactly ``S``.
    """
    cells: dict = {}
    for r in reports:
        cells.setdefault((r.estimator, r.n, r.w, r.epsilon), []).append(r)
    out = []
    for (est, n, w, eps), rs in cells.items():
        costs = np.array([r.cost for r in rs], dtype=np.float64)
        done = [r for r in rs if r.status == "ok"]
        hits = sum(report_success(r) for r in rs)
        out.append(
            CellSummary(
                estimator=est,
                n=n,
                w=w,
                epsilon=eps,
                trials=len(rs),
                completed=len(done),
                success_rate=(sum(report_success(r) for r in done) / len(done)) if done else None,
                success_rate_all=hits / len(rs),
                median_cost=float(np.median(costs)),
                mean_cost=float(costs.mean()),
                p95_cost=float(np.percentile(costs, 95)),
                failed=sum(r.status == "failed" for r in rs),
                cap=sum(r.status == "cap" for r in rs),
            )
        )
    return out


# --- output ----------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, names: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([_cell(getattr(row, k)) for k in names])


def _write_json(path: Path, rows) -> None:
    payload = [asdict(r) for r in rows]
    path.write_text(json.dumps(payload, indent=1, sort_keys=False) + "\n")


def emit(reports, summaries, out, fmt: str = "csv") -> list[Path]:
    """Write ``reports.<fmt>`` and ``summaries.<fmt>`` into directory ``out``."""
    if fmt not in ("csv", "json"):
        raise InvalidParams(f"format must be csv or json, got {fmt!r}")
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rp, sp = out / f"reports.{fmt}", out / f"summaries.{fmt}"
        if fmt == "csv":
            _write_csv(rp, REPORT_FIELDS, reports)
            _write_csv(sp, SUMMARY_FIELDS, summaries)
        else:
            _write_json(rp, reports)
            _write_json(sp, summaries)
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc
    return [rp, sp]


_INT_FIELDS = {"n", "w", "seed", "queries", "samples"}
_FLOAT_FIELDS = {"epsilon", "w_hat", "wall_time"}


def load_reports(path) -> list[TrialReport]:
    path = Path(path)
    if path.suffix == ".json":
        return [TrialReport(**row) for row in json.loads(path.read_text())]
    out = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            vals = {}
            for k, v in row.items():
                if v == "":
                    vals[k] = None
                elif k in _INT_FIELDS:
                    vals[k] = int(v)
                elif k in _FLOAT_FIELDS:
                    vals[k] = float(v)
                else:
                    vals[k] = v
            out.append(TrialReport(**vals))
    return out


def load_schema(name: str) -> dict:
    return json.loads(resources.files("setsize").joinpath("schemas", name).read_text())
