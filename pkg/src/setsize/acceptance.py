"""Acceptance checks, shared by ``setsize verify`` and the test suite.

Each check returns a :class:`CheckResult`; a criterion passes when all of its
checks do. Checks are deterministic: every battery runs from a fixed master
seed.
"""
from __future__ import annotations

import math
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import lemmas
from .bench import BenchConfig, run_trials, summarize
from .config import EstimatorConfig
from .domain import Grid, HiddenSet, Hypercube, Interval, Line, SubsetFamily, Whole
from .hard_instances import gen_collision_pair, gen_interval_query_pair, transcript_distinguishable
from .interval import estimate_interval_sample_adaptive, exact_recover_binary_search, recovery_bound
from .oracle import OracleSession
from .registry import ESTIMATORS
from .structured import estimate_grid_sample_adaptive, estimate_hypercube_sample_adaptive
from .unrestricted import accept_window, level_size, rho

SEED = 20240601

SUCCESS_FLOOR = 0.66 - 0.06
SUCCESS_TRIALS = 500
TIME_LIMIT = 300.0
WS = (1, 4, 16, 256, 4096)
EPSILONS = (0.5, 1.0)
LINE_NS = (1 << 12, 1 << 16, 1 << 20)
GRID_DIMS = ((1 << 6, 1 << 6), (1 << 8, 1 << 8), (1 << 10, 1 << 10))
CUBE_DS = (12, 16, 20)
SCALING_TRIALS = 300


@dataclass
class CheckResult:
    key: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key}: {self.detail}"


@dataclass(frozen=True)
class Check:
    key: str
    criterion: str
    run: Callable[[], CheckResult]


# --- 1. success contract ----------------------------------------------------------------


def _shapes_for(entry) -> list[dict]:
    if entry.shape == "grid":
        return [{"dims": list(d)} for d in GRID_DIMS]
    if entry.shape == "cube":
        return [{"cube_d": d} for d in CUBE_DS]
    return [{"n": n} for n in LINE_NS]


def check_success(estimator: str, trials: int = SUCCESS_TRIALS) -> CheckResult:
    entry = ESTIMATORS[estimator]
    start = time.perf_counter()
    summaries = []
    for shape in _shapes_for(entry):
        cfg = BenchConfig(estimator, w=[1], eps=list(EPSILONS), trials=trials, seed=SEED, **shape)
        n = cfg.shape().n
        cfg.w = [w for w in WS if w <= n]
        summaries.extend(summarize(run_trials(cfg)))
    elapsed = time.perf_counter() - start
    worst = min(summaries, key=lambda s: s.success_rate_all)
    ok_rate = worst.success_rate_all >= SUCCESS_FLOOR
    ok_time = elapsed <= TIME_LIMIT
    detail = (f"worst cell n={worst.n} w={worst.w} eps={worst.epsilon} rate={worst.success_rate_all:.3f} "
              f"(floor {SUCCESS_FLOOR:.2f}) over {len(summaries)} cells; {elapsed:.0f}s "
              f"(limit {TIME_LIMIT:.0f}s)")
    rates = {f"{s.n}/{s.w}/{s.epsilon}": s.success_rate_all for s in summaries}
    return CheckResult(f"1:{estimator}", ok_rate and ok_time, detail,
                       {"rates": rates, "seconds": elapsed})


# --- 2. exact recovery --------------------------------------------------------------------


def _recover_case(n: int, elements, failures: list) -> None:
    hidden = HiddenSet.of(elements, n)
    session = OracleSession(Line(n), hidden, SubsetFamily.INTERVALS)
    found, _ = exact_recover_binary_search(session)
    bound = recovery_bound(n, hidden.w)
    if found != hidden.elements.tolist() or session.tally.queries > bound:
        failures.append((n, hidden.w, session.tally.queries, bound))


def check_exact_recovery(instances: int = 1000) -> CheckResult:
    rng = np.random.default_rng(SEED)
    failures: list = []
    for _ in range(instances):
        n = int(rng.integers(1, (1 << 12) + 1))
        w = int(rng.integers(0, n + 1))
        _recover_case(n, rng.choice(np.arange(1, n + 1), size=w, replace=False), failures)
    edges = 0
    for n in (1, 2, 3, 5, 64, 1000, 4095, 4096):
        for elements in ([], [1], [n], [(n + 1) // 2], range(1, n + 1)):
            _recover_case(n, elements, failures)
            edges += 1
    detail = f"{instances} random + {edges} edge instances, {len(failures)} failures"
    if failures:
        detail += f"; first {failures[0]}"
    return CheckResult("2:exact-recovery", not failures, detail)


# --- 3. scaling laws ----------------------------------------------------------------------


def _median_costs(estimator: str, ws, n: int, trials: int = SCALING_TRIALS) -> dict:
    cfg = BenchConfig(estimator, w=list(ws), eps=[1.0], trials=trials, seed=SEED, n=n)
    return {s.w: s.median_cost for s in summarize(run_trials(cfg))}


def _ratio_check(key: str, estimator: str, lo: float, hi: float) -> CheckResult:
    ws = (16, 64, 256, 1024, 4096)
    med = _median_costs(estimator, ws, 1 << 20)
    ratios = [med[4 * w] / med[w] for w in ws[:-1]]
    ok = all(lo <= r <= hi for r in ratios)
    shown = ", ".join(f"{r:.3f}" for r in ratios)
    return CheckResult(key, ok, f"cost(4w)/cost(w) for w=16..1024: [{shown}] in [{lo}, {hi}]",
                       {"median": med, "ratios": ratios})


def check_collision_scaling() -> CheckResult:
    return _ratio_check("3:collision-sqrt", "collision", 1.4, 2.8)


def check_singleton_scaling() -> CheckResult:
    return _ratio_check("3:interval-query-na-inverse", "interval-query-na", 0.15, 0.45)


def check_sample_n_independence() -> CheckResult:
    ws = (1 << 4, 1 << 8, 1 << 12)
    small = _median_costs("interval-sample-a", ws, 1 << 16)
    large = _median_costs("interval-sample-a", ws, 1 << 24)
    ratios = [large[w] / small[w] for w in ws]
    ok = all(0.6 <= r <= 1.6 for r in ratios)
    shown = ", ".join(f"{r:.3f}" for r in ratios)
    return CheckResult("3:interval-sample-a-n-free", ok,
                       f"cost(n=2^24)/cost(n=2^16) at w=2^4,2^8,2^12: [{shown}] in [0.6, 1.6]",
                       {"small": small, "large": large})


def check_sample_polylog() -> CheckResult:
    med = _median_costs("interval-sample-a", (1 << 4, 1 << 16), 1 << 20)
    r = med[1 << 16] / med[1 << 4]
    return CheckResult("3:interval-sample-a-polylog", r <= 50,
                       f"cost(w=2^16)/cost(w=2^4) = {med[1 << 16]:.4g}/{med[1 << 4]:.4g} = {r:.1f} "
                       f"(limit 50)", {"median": med, "ratio": r})


def check_unrestricted_scaling() -> CheckResult:
    na = _median_costs("unrestricted-na", (1 << 7, 1 << 14), 1 << 20)
    ad = _median_costs("unrestricted-a", (1 << 14,), 1 << 20)
    r = na[1 << 14] / na[1 << 7]
    ok = ad[1 << 14] < na[1 << 14] and 1.5 <= r <= 3.0
    return CheckResult("3:unrestricted", ok,
                       f"adaptive {ad[1 << 14]:.0f} vs non-adaptive {na[1 << 14]:.0f} at w=2^14; "
                       f"non-adaptive cost(2^14)/cost(2^7) = {r:.2f} in [1.5, 3.0]",
                       {"na": na, "a": ad})


# --- 4. exact-mode telescoping -------------------------------------------------------------


def _telescoping(key: str, salt: int, make, run, instances: int) -> CheckResult:
    rng = np.random.default_rng([SEED, salt])
    config = EstimatorConfig(epsilon=1.0, exact_ratios=True)
    wrong, single, other = [], 0, 0
    for _ in range(instances):
        shape = make(rng)
        w = int(rng.integers(1, min(shape.n, 512) + 1))
        hidden = HiddenSet.random(shape.n, w, rng)
        family = SubsetFamily.SUBCUBES if isinstance(shape, Hypercube) else (
            SubsetFamily.SUBGRIDS if shape.d > 1 else SubsetFamily.INTERVALS)
        session = OracleSession(shape, hidden, family, rng=np.random.default_rng(rng.integers(2**63)))
        est = run(session, config, np.random.default_rng(rng.integers(2**63)))
        if not est.ok or est.info.get("terminal_size") != 1:
            other += 1
            continue
        single += 1
        if Fraction(est.info["exact_value"]) != w:
            wrong.append((shape, w, est.info["exact_value"]))
    detail = f"{single} runs ended on one element, {len(wrong)} wrong; {other} other endings"
    return CheckResult(key, not wrong and single > 0, detail)


def check_telescoping_interval(instances: int = 1000) -> CheckResult:
    return _telescoping("4:telescoping-interval", 1,
                        lambda rng: Line(int(rng.integers(1, (1 << 12) + 1))),
                        estimate_interval_sample_adaptive, instances)


def check_telescoping_grid(instances: int = 1000) -> CheckResult:
    return _telescoping("4:telescoping-grid", 2,
                        lambda rng: Grid(tuple(int(k) for k in rng.integers(1, 65, size=2))),
                        estimate_grid_sample_adaptive, instances)


def check_telescoping_cube(instances: int = 1000) -> CheckResult:
    return _telescoping("4:telescoping-cube", 3,
                        lambda rng: Hypercube(int(rng.integers(1, 13))),
                        estimate_hypercube_sample_adaptive, instances)


# --- 5. window mathematics ------------------------------------------------------------------


def _rho_decimal(e: int) -> Decimal:
    d = Decimal(e)
    return (d * (1 - 1 / d).ln()).exp()


def check_windows() -> CheckResult:
    problems = []
    with localcontext() as ctx:
        ctx.prec = 60
        r2, rh = Decimal(2).sqrt(), Decimal(1) / Decimal(2).sqrt()
        inv_e = Decimal(-1).exp()
        prev = None
        min_low_gap = min_high_gap = Decimal(1)
        for i in range(2, 65):
            e = level_size(i, 1.0)
            r = _rho_decimal(e)
            if prev is not None and not r > prev:
                problems.append(f"rho not increasing at i={i}")
            if not Decimal(1) / 4 <= r <= inv_e:
                problems.append(f"rho({i}) = {r} outside [1/4, 1/e]")
            low_gap = (r.ln() * r2).exp() - r * r
            high_gap = r.sqrt() - (r.ln() * rh).exp()
            min_low_gap, min_high_gap = min(min_low_gap, low_gap), min(min_high_gap, high_gap)
            if not (low_gap > Decimal("0.04") and high_gap > Decimal("0.04")):
                problems.append(f"gap fails at i={i}")
            # the implemented window must separate the two off-range values
            low, high = accept_window(e, 1.0)
            if abs(Decimal(rho(e)) - r) > Decimal("1e-12"):
                problems.append(f"rho({e}) float error")
            if not (float(r * r) < low and high < float(r.sqrt())):
                problems.append(f"window at i={i} does not separate rho^2 and rho^(1/2)")
            prev = r
    detail = (f"i=2..64: min rho^sqrt2-rho^2 = {float(min_low_gap):.4f}, "
              f"min rho^(1/2)-rho^(1/sqrt2) = {float(min_high_gap):.4f}; {len(problems)} problems")
    if problems:
        detail += f"; {problems[0]}"
    return CheckResult("5:windows", not problems, detail)


# --- 6. indistinguishability fixtures ------------------------------------------------------------


def _query_sets(n: int, q: int, block: int, rng) -> dict:
    starts = np.sort(rng.choice(np.arange(1, n + 1), size=q, replace=False))
    return {
        "random": [Interval(int(a), int(min(n, a + rng.integers(0, 4 * block)))) for a in starts],
        "block-starts": [Interval(k * block + 1, (k + 1) * block) for k in range(1, q + 1)],
        "singletons": [Interval(k * (n // q), k * (n // q)) for k in range(1, q + 1)],
        "prefixes": [Interval(1, k * (n // q)) for k in range(1, q + 1)],
    }


def check_interval_query_pair(n: int = 1 << 16, w_tilde: int = 1 << 6, draws: int = 2000) -> CheckResult:
    q = n // (24 * w_tilde)
    rng = np.random.default_rng(SEED)
    sets = _query_sets(n, q, w_tilde, rng)
    rates = {}
    for name, specs in sets.items():
        same = 0
        for _ in range(draws):
            pair = gen_interval_query_pair(n, w_tilde, rng)
            same += not transcript_distinguishable(specs, pair.s1, pair.s2)
        rates[name] = same / draws
    ok = all(r >= 2 / 3 for r in rates.values())
    shown = ", ".join(f"{k} {v:.3f}" for k, v in rates.items())
    return CheckResult("6:interval-query-pair", ok,
                       f"q={q} queries, identical-transcript rate: {shown} (need >= 0.667)", rates)


def check_collision_pair(n: int = 1 << 16, trials: int = 2000) -> CheckResult:
    rng = np.random.default_rng(SEED)
    rates = {}
    for w_tilde in (1 << 8, 1 << 10, 1 << 12):
        s = math.isqrt(w_tilde // 6)
        hits = [0, 0]
        for _ in range(trials):
            pair = gen_collision_pair(n, w_tilde, rng)
            for k, hidden in enumerate((pair.s1, pair.s2)):
                session = OracleSession(Line(n), hidden, SubsetFamily.UNIVERSE_ONLY, rng=rng)
                hits[k] += session.sample_batch(Whole(), s).values.size < s
        rates[w_tilde] = (hits[0] / trials, hits[1] / trials)
    ok = all(a <= 1 / 3 and b <= 1 / 3 for a, b in rates.values())
    shown = ", ".join(f"w~={k}: {a:.3f}/{b:.3f}" for k, (a, b) in rates.items())
    return CheckResult("6:collision-pair", ok, f"collision rate on S1/S2: {shown} (limit 0.333)",
                       {str(k): v for k, v in rates.items()})


# --- 7. splitting facts by exhaustion ----------------------------------------------------------


def check_grid_lemma() -> CheckResult:
    by_marginals = lemmas.grid_counterexamples_by_marginals(6)
    direct = lemmas.grid_counterexamples_direct(4)
    band = lemmas.grid_band_counterexamples(6)
    axis_only = lemmas.axis_cut_counterexamples(6)
    ok = not by_marginals and not direct and not band
    detail = (f"6x6 boxes (marginals): {len(by_marginals)} counterexamples; 4x4 boxes (direct): "
              f"{len(direct)}; estimator band 1/8: {len(band)}; axis cuts without the slab step "
              f"fail on {len(axis_only)} marginal pairs (e.g. the 3x3 plus)")
    return CheckResult("7:grid-lemma", ok, detail)


def check_cube_lemma() -> CheckResult:
    found = lemmas.cube_counterexamples(4)
    return CheckResult("7:cube-lemma", not found,
                       f"all 81 sub-cubes of {{0,1}}^4, every subset with >= 2 points: "
                       f"{len(found)} counterexamples")


# --- 8. determinism -----------------------------------------------------------------------------


def _bench_once(out: Path, fmt: str) -> dict:
    cmd = [sys.executable, "-m", "setsize", "bench", "--estimator", "interval-query-a",
           "--n", "4096", "--w", "1,16,256", "--eps", "0.5,1", "--trials", "40", "--seed", "7",
           "--workers", "2", "--format", fmt, "--out", str(out)]
    subprocess.run(cmd, check=True, capture_output=True)
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def check_determinism() -> CheckResult:
    with tempfile.TemporaryDirectory() as tmp:
        results = {}
        for fmt in ("csv", "json"):
            a = _bench_once(Path(tmp) / f"a-{fmt}", fmt)
            b = _bench_once(Path(tmp) / f"b-{fmt}", fmt)
            results[fmt] = (a == b and len(a) == 2, sorted(a))
    ok = all(same for same, _ in results.values())
    files = sorted(f for _, names in results.values() for f in names)
    return CheckResult("8:determinism", ok,
                       f"two bench runs with 2 workers, files {files}: "
                       f"{'byte-identical' if ok else 'differ'}")


# --- registry ------------------------------------------------------------------------------------


CRITERIA = {
    "1": "success contract",
    "2": "exact recovery",
    "3": "scaling laws",
    "4": "exact-mode telescoping",
    "5": "window mathematics",
    "6": "indistinguishability fixtures",
    "7": "splitting facts by exhaustion",
    "8": "determinism",
}

CHECKS = [Check(f"1:{name}", "1", (lambda name=name: check_success(name))) for name in ESTIMATORS] + [
    Check("2:exact-recovery", "2", check_exact_recovery),
    Check("3:collision-sqrt", "3", check_collision_scaling),
    Check("3:interval-query-na-inverse", "3", check_singleton_scaling),
    Check("3:interval-sample-a-n-free", "3", check_sample_n_independence),
    Check("3:interval-sample-a-polylog", "3", check_sample_polylog),
    Check("3:unrestricted", "3", check_unrestricted_scaling),
    Check("4:telescoping-interval", "4", check_telescoping_interval),
    Check("4:telescoping-grid", "4", check_telescoping_grid),
    Check("4:telescoping-cube", "4", check_telescoping_cube),
    Check("5:windows", "5", check_windows),
    Check("6:interval-query-pair", "6", check_interval_query_pair),
    Check("6:collision-pair", "6", check_collision_pair),
    Check("7:grid-lemma", "7", check_grid_lemma),
    Check("7:cube-lemma", "7", check_cube_lemma),
    Check("8:determinism", "8", check_determinism),
]


def criterion_line(criterion: str, results: list[CheckResult]) -> str:
    passed = all(r.passed for r in results)
    failing = [r.key for r in results if not r.passed]
    tail = f" (failing: {', '.join(failing)})" if failing else ""
    return (f"criterion {criterion} {CRITERIA[criterion]}: {'PASS' if passed else 'FAIL'} "
            f"[{sum(r.passed for r in results)}/{len(results)} checks]{tail}")


def run_checks(criteria=None, log=print) -> dict[str, list[CheckResult]]:
    """Run the checks of the selected criteria (all by default), logging each line."""
    wanted = set(criteria) if criteria else set(CRITERIA)
    out: dict[str, list[CheckResult]] = {}
    for check in CHECKS:
        if check.criterion not in wanted:
            continue
        result = check.run()
        log("  " + result.line())
        out.setdefault(check.criterion, []).append(result)
    for criterion in sorted(out, key=int):
        log(criterion_line(criterion, out[criterion]))
    return out
