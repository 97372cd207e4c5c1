"""Command line front end.

Subcommands:

* ``eval``      one strategy at one operating point, JSON on stdout
* ``sweep``     grid of operating points to a CSV file with the fixed
                header ``strategy,alloc,ps_db,pr_db,coop_mode,rate,units,
                stderr,n_samples,seed,warnings``
* ``validate``  the Monte Carlo / analytic self-validation suites

Powers are given in dB; the relay power either absolutely (``--pr-db``) or
relative to the source (``--pr-rel-db``), matching the usual Pr/Ps sweep
axes.  Rates are nats by default, bits on request.  The environment
variable ``RELAYLAB_SEED`` overrides the default Monte Carlo seed; a
``--seed`` flag overrides both.  Exit codes: 0 success, 1 validation
failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from . import numerics, oracle, rate_engine, strategies, validation
from .fading import PowerConfig
from .strategies import ConfigurationError, RatePoint

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CSV_HEADER = "strategy,alloc,ps_db,pr_db,coop_mode,rate,units,stderr,n_samples,seed,warnings"

_NUMERICAL_ERRORS = (numerics.IntegrationError, numerics.BracketError,
                     rate_engine.MonotonicityError, FloatingPointError,
                     ZeroDivisionError)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return format(x, ".9g")
    return str(x)


def _point_row(pt: RatePoint, units: str) -> str:
    rate = pt.rate_in(units)
    stderr = pt.stderr / math.log(2.0) if (pt.stderr is not None and
                                           units == "bits") else pt.stderr
    warn = ";".join(w.replace(",", ";") for w in pt.warnings)
    cells = [pt.strategy, pt.alloc, _fmt(pt.ps_db), _fmt(pt.pr_db),
             pt.coop_mode, _fmt(rate), units, _fmt(stderr),
             _fmt(pt.n_samples), _fmt(pt.seed), warn]
    return ",".join(cells)


def _point_json(pt: RatePoint, units: str) -> dict:
    out = dataclasses.asdict(pt)
    out["rate"] = pt.rate_in(units)
    if pt.stderr is not None and units == "bits":
        out["stderr"] = pt.stderr / math.log(2.0)
    out["units"] = units
    out["warnings"] = list(pt.warnings)
    return out


def _resolve_powers(args) -> tuple[float, float]:
    ps_db = args.ps_db
    if args.pr_db is not None and args.pr_rel_db is not None:
        raise ConfigurationError("give either --pr-db or --pr-rel-db, not both")
    if args.pr_db is not None:
        pr_db = args.pr_db
    elif args.pr_rel_db is not None:
        pr_db = ps_db + args.pr_rel_db
    else:
        pr_db = ps_db
    return ps_db, pr_db


def _config_from_db(ps_db, pr_db, mode) -> PowerConfig:
    return PowerConfig.from_db(ps_db, pr_db, mode)


def cmd_eval(args) -> int:
    ps_db, pr_db = _resolve_powers(args)
    cfg = _config_from_db(ps_db, pr_db, args.mode)
    spec = strategies.parse_strategy(args.strategy, args.alloc)
    sc = oracle.SampleConfig(args.n_samples, args.seed)
    pt = strategies.evaluate(spec, cfg, sc)
    pt = dataclasses.replace(pt, ps_db=ps_db, pr_db=pr_db)
    json.dump(_point_json(pt, args.units), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _sweep_task(task):
    name, alloc_name, ps_db, pr_db, mode, n_samples, seed, units = task
    spec = strategies.parse_strategy(name, alloc_name)
    cfg = _config_from_db(ps_db, pr_db, mode)
    pt = strategies.evaluate(spec, cfg, oracle.SampleConfig(n_samples, seed))
    pt = dataclasses.replace(pt, ps_db=ps_db, pr_db=pr_db)
    return _point_row(pt, units)


def cmd_sweep(args) -> int:
    names = strategies.expand_strategy_names(
        [s.strip() for s in args.strategies.split(",") if s.strip()])
    if not names:
        raise ConfigurationError("no strategies given")
    for name in names:
        strategies.parse_strategy(name, args.alloc)  # fail fast

    if args.stop < args.start:
        raise ConfigurationError("sweep requires start <= stop")
    if not args.step > 0:
        raise ConfigurationError("sweep requires step > 0")
    n_points = int(round((args.stop - args.start) / args.step)) + 1
    axis = [args.start + i * args.step for i in range(n_points)]

    tasks = []
    for name in names:  # strategy-major row order
        for value in axis:
            if args.axis == "ps_db":
                ps_db = value
                pr_db = value + args.pr_rel_db if args.pr_rel_db is not None \
                    else (args.pr_db if args.pr_db is not None else value)
            else:  # pr_rel_db axis
                if args.ps_db is None:
                    raise ConfigurationError("pr_rel_db sweeps need --ps-db")
                ps_db = args.ps_db
                pr_db = ps_db + value
            tasks.append((name, args.alloc, ps_db, pr_db, args.mode,
                          args.n_samples, args.seed, args.units))

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_task, tasks, chunksize=1))
    else:
        rows = [_sweep_task(t) for t in tasks]

    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    sys.stderr.write(f"wrote {len(rows)} rows to {args.out}\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validation.run_validation(args.level, seed=args.seed)
    for line in report.lines():
        print(line)
    print(f"validation {'PASSED' if report.passed else 'FAILED'} "
          f"({report.level}, {report.elapsed_s:.1f}s)")
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaylab",
        description="Broadcast-approach rates for two cooperating receivers")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--mode", choices=["narrow_band", "wide_band"],
                       default="narrow_band")
        p.add_argument("--units", choices=["nats", "bits"], default="nats")
        p.add_argument("--alloc", default=None,
                       help="allocation override (su_opt, joint_opt, sel_opt, "
                            "naf_opt, nwz_opt)")
        p.add_argument("--n-samples", type=int, default=200_000)
        p.add_argument("--seed", type=int, default=oracle.default_seed())

    p_eval = sub.add_parser("eval", help="evaluate one strategy at one point")
    p_eval.add_argument("--strategy", required=True)
    p_eval.add_argument("--ps-db", type=float, required=True)
    p_eval.add_argument("--pr-db", type=float, default=None)
    p_eval.add_argument("--pr-rel-db", type=float, default=None)
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="grid sweep to CSV")
    p_sweep.add_argument("--axis", choices=["ps_db", "pr_rel_db"],
                         default="ps_db")
    p_sweep.add_argument("--start", type=float, required=True)
    p_sweep.add_argument("--stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--ps-db", type=float, default=None,
                         help="fixed source power for pr_rel_db sweeps")
    p_sweep.add_argument("--pr-db", type=float, default=None,
                         help="fixed absolute relay power for ps_db sweeps")
    p_sweep.add_argument("--pr-rel-db", type=float, default=None,
                         help="fixed Pr/Ps in dB for ps_db sweeps")
    p_sweep.add_argument("--strategies", default=",".join(
        strategies.default_strategies()))
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int, default=1)
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the self-validation suites")
    p_val.add_argument("--level", choices=["fast", "full"], default="fast")
    p_val.add_argument("--json-out", default=None)
    p_val.add_argument("--seed", type=int, default=oracle.default_seed())
    p_val.set_defaults(func=cmd_validate)
    return parser


def _error_json(kind: str, exc: Exception) -> str:
    return json.dumps({"error": {"type": kind, "message": str(exc)}})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches the
        # configuration-error contract
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigurationError as exc:
        sys.stderr.write(_error_json("configuration", exc) + "\n")
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(_error_json("numerical", exc) + "\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
