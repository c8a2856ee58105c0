"""Command line: ``setsize bench | estimate | hard-instance | verify | list``.

Exit codes: 0 success, 1 acceptance failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import BenchConfig, emit, run_trials, summarize
from .config import EstimatorConfig
from .domain import Grid, Hypercube, Line, SubsetFamily, load_hidden_set
from .errors import SetSizeError
from .hard_instances import GENERATORS, export_pair
from .oracle import OracleSession
from .registry import ESTIMATORS

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _param(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _default_seed() -> int:
    raw = os.environ.get("SETSIZE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"SETSIZE_SEED must be an integer, got {raw!r}") from None


def _add_shape(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="line universe [1, n]")
    p.add_argument("--dims", type=_int_list, help="grid side lengths, e.g. 64,64")
    p.add_argument("--cube-d", type=int, dest="cube_d", help="hypercube dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="setsize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run a seeded trial battery and write reports")
    b.add_argument("--config", type=Path, help="JSON file with bench settings; flags override it")
    b.add_argument("--estimator", choices=sorted(ESTIMATORS))
    b.add_argument("--family", choices=[f.value for f in SubsetFamily])
    _add_shape(b)
    b.add_argument("--w", type=_int_list)
    b.add_argument("--eps", type=_float_list)
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int, help="master seed (default: $SETSIZE_SEED or 0)")
    b.add_argument("--out", type=Path)
    b.add_argument("--format", choices=["csv", "json"])
    b.add_argument("--workers", type=int)
    b.add_argument("--timing", action="store_true", default=None, help="record wall time per trial")
    b.add_argument("--param", type=_param, action="append", default=[],
                   help="estimator constant override, e.g. kappa=12")

    e = sub.add_parser("estimate", help="one estimate on a hidden-set file, printed as JSON")
    e.add_argument("--estimator", required=True, choices=sorted(ESTIMATORS))
    e.add_argument("--hidden", required=True, type=Path, help="hidden-set file")
    _add_shape(e)
    e.add_argument("--family", choices=[f.value for f in SubsetFamily])
    e.add_argument("--eps", type=float, default=0.5)
    e.add_argument("--seed", type=int)
    e.add_argument("--param", type=_param, action="append", default=[])

    h = sub.add_parser("hard-instance", help="write a pair of hard-to-distinguish hidden sets")
    h.add_argument("kind", choices=sorted(GENERATORS))
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--w-tilde", type=int, dest="w_tilde", default=1)
    h.add_argument("--seed", type=int)
    h.add_argument("--out", type=Path, required=True)
    h.add_argument("--stem")

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--only", type=lambda s: s.split(","), help="criteria to run, e.g. 2,5,7")

    sub.add_parser("list", help="list estimator ids")
    return parser


def _bench_config(args) -> BenchConfig:
    data: dict = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("estimator", "family", "n", "dims", "cube_d", "w", "eps", "trials", "seed",
                "format", "workers", "timing"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.out is not None:
        data["out"] = str(args.out)
    if args.param:
        data["params"] = {**data.get("params", {}), **dict(args.param)}
    data.setdefault("seed", _default_seed())
    for key in ("estimator", "w", "eps", "out"):
        if data.get(key) is None:
            raise ConfigError(f"missing required setting: {key}")
    if sum(data.get(k) is not None for k in ("n", "dims", "cube_d")) != 1:
        raise ConfigError("give exactly one of --n, --dims or --cube-d")
    try:
        return BenchConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"bad bench settings: {exc}") from None


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    cfg.validate()
    reports = run_trials(cfg)
    paths = emit(reports, summarize(reports), cfg.out, cfg.format)
    for p in paths:
        print(p)
    return EXIT_OK


def _shape_from(args, n_hint: int | None):
    given = [x is not None for x in (args.n, args.dims, args.cube_d)]
    if sum(given) > 1:
        raise ConfigError("give at most one of --n, --dims or --cube-d")
    if args.dims is not None:
        return Grid(tuple(args.dims))
    if args.cube_d is not None:
        return Hypercube(args.cube_d)
    n = args.n if args.n is not None else n_hint
    if n is None:
        raise ConfigError("universe size unknown: add --n or an '# n=' header to the file")
    return Line(n)


def cmd_estimate(args) -> int:
    entry = ESTIMATORS[args.estimator]
    given = None
    if args.dims is not None or args.cube_d is not None or args.n is not None:
        given = _shape_from(args, None).n
    try:
        hidden = load_hidden_set(args.hidden, n=given)
    except OSError as exc:
        raise ConfigError(f"cannot read hidden set: {exc}") from None
    shape = _shape_from(args, hidden.n)
    family = SubsetFamily(args.family) if args.family else entry.family
    seed = args.seed if args.seed is not None else _default_seed()
    sess_ss, est_ss = np.random.SeedSequence(seed).spawn(2)
    session = OracleSession(shape, hidden, family, rng=np.random.default_rng(sess_ss))
    config = EstimatorConfig.from_dict({**dict(args.param), "epsilon": args.eps})
    est = entry.run(session, config, np.random.default_rng(est_ss))
    out = {
        "estimator": args.estimator,
        "n": shape.n,
        "epsilon": args.eps,
        "seed": seed,
        "w_hat": est.value,
        "queries": est.queries,
        "samples": est.samples,
        "status": est.status,
    }
    print(json.dumps(out))
    return EXIT_OK


def cmd_hard_instance(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    pair = GENERATORS[args.kind](args.n, args.w_tilde, np.random.default_rng(seed))
    for p in export_pair(pair, args.out, args.stem):
        print(p)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import CRITERIA, run_checks

    wanted = args.only or list(CRITERIA)
    unknown = [c for c in wanted if c not in CRITERIA]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}; choose from {list(CRITERIA)}")
    results = run_checks(wanted, log=lambda line: print(line, flush=True))
    ok = all(r.passed for rs in results.values() for r in rs)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_list(args) -> int:
    for key, entry in ESTIMATORS.items():
        print(f"{key:20s} {entry.shape:5s} {entry.family.value:12s} {entry.description}")
    return EXIT_OK


COMMANDS = {
    "bench": cmd_bench,
    "estimate": cmd_estimate,
    "hard-instance": cmd_hard_instance,
    "verify": cmd_verify,
    "list": cmd_list,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SetSizeError) as exc:
        print(f"setsize: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
