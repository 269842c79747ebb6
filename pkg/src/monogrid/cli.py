"""Command-line entry point.

Subcommands: ``design`` (static design CSV), ``run`` (strategy trace),
``bench`` (experiment plans), ``theory`` (formula-vs-simulation checks),
``serve`` (session HTTP service). Exit codes: 0 success, 1 validation,
2 runtime failure, 3 theory-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import secrets
import sys

log = logging.getLogger("monogrid")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_THEORY = 3


class ValidationError(Exception):
    pass


def _effective_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = secrets.randbelow(2**31)
    log.info("seed=%d", seed)
    return int(seed)


def _data_dir(args) -> str:
    return args.data_dir or os.environ.get("MONOGRID_DATA_DIR", os.path.join(os.getcwd(), "sessions"))


def cmd_design(args) -> int:
    from .designs import GridSizeError, gen_lhd, gen_mc, gen_sg, gen_si

    seed = _effective_seed(args) if args.kind in ("mc", "lhd") else (args.seed or 0)
    try:
        if args.kind == "sg":
            points = gen_sg(args.dimension, args.n)
        elif args.kind == "si":
            points = gen_si(args.dimension, args.n)
        elif args.kind == "mc":
            points = gen_mc(args.dimension, args.n, seed)
        elif args.kind == "lhd":
            points = gen_lhd(args.dimension, args.n, seed)
        else:
            raise ValidationError(f"unknown design kind {args.kind!r}")
    except (GridSizeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k + 1}" for k in range(args.dimension)])
        for row in points:
            writer.writerow([repr(float(v)) for v in row])
    summary = {"kind": args.kind, "p": args.dimension, "n": int(points.shape[0]), "out": args.out}
    _emit(args, summary, f"wrote {points.shape[0]} points to {args.out}")
    return EXIT_OK


def _build_oracle(args):
    from .oracles import make_oracle

    kwargs = {}
    if args.oracle == "arctan":
        if args.mu is None:
            raise ValidationError("--mu is required for the arctan oracle")
        kwargs["mu"] = args.mu
    if args.oracle == "staircase":
        kwargs["resolution"] = args.resolution
        kwargs["seed"] = args.oracle_seed
    if args.oracle == "threshold":
        kwargs["threshold"] = args.threshold
    if args.oracle == "tabular":
        if not args.table or not args.transform:
            raise ValidationError("tabular oracle needs --table and --transform")
        kwargs["table_path"] = args.table
        kwargs["transform_path"] = args.transform
    try:
        oracle = make_oracle(args.oracle, args.dimension, **kwargs)
    except (ValueError, OSError) as exc:
        raise ValidationError(str(exc)) from exc
    if oracle.dimension is not None and oracle.dimension != args.dimension:
        raise ValidationError(
            f"oracle {args.oracle!r} has dimension {oracle.dimension}, got -p {args.dimension}"
        )
    return oracle


def cmd_run(args) -> int:
    from .strategies import StrategySpec, run_strategy, serialize_trace, state_from_trace
    from .volume import uncertain_volume_auto

    oracle = _build_oracle(args)
    seed = _effective_seed(args)
    try:
        spec = StrategySpec(
            kind=args.strategy,
            dimension=args.dimension,
            budget=args.n,
            seed=seed,
            amc_max_attempts=args.amc_max_attempts,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    trace = run_strategy(spec, oracle)
    text = serialize_trace(trace)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    report = uncertain_volume_auto(state_from_trace(args.dimension, trace), seed=seed)
    summary = {
        "strategy": args.strategy,
        "oracle": oracle.oracle_id,
        "evaluations": len(trace),
        "v_uncertain": report.v_uncertain,
        "v_negative": report.v_negative,
        "v_positive": report.v_positive,
        "volume_method": report.method,
        "seed": seed,
        "out": args.out,
    }
    # displays round to three decimals; --json carries full precision
    _emit(args, summary, f"{len(trace)} evaluations, v_uncertain={report.v_uncertain:.3f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import ExperimentPlan, emit_results, run_plan

    try:
        plan = ExperimentPlan.load(args.plan)
    except (OSError, KeyError, ValueError) as exc:
        raise ValidationError(f"invalid plan: {exc}") from exc
    if args.full is False and plan.test_points > 10_000:
        plan = ExperimentPlan.from_dict({**plan.to_dict(), "test_points": 10_000})
    rows, errors = run_plan(plan)
    emit_results(rows, args.out, plan=plan, errors=errors)
    summary = {"rows": len(rows), "errors": errors, "out": args.out}
    _emit(args, summary, f"wrote {len(rows)} rows to {args.out}; {len(errors)} errors")
    return EXIT_RUNTIME if errors else EXIT_OK


def cmd_theory(args) -> int:
    from .checks import ALL_CHECKS, run_checks

    names = None if args.all else args.check
    if not names and not args.all:
        raise ValidationError(f"name a check or pass --all; known: {', '.join(ALL_CHECKS)}")
    try:
        results = run_checks(names)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    payload = []
    failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed |= not res.passed
        if not args.json:
            print(f"[{status}] {res.name} ({res.elapsed_s:.1f}s): {res.detail}")
        payload.append(
            {"name": res.name, "passed": res.passed, "detail": res.detail, "elapsed_s": res.elapsed_s}
        )
    if args.json:
        print(json.dumps(payload, indent=2))
    return EXIT_THEORY if failed else EXIT_OK


def _parse_bind(bind: str):
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValidationError(f"--bind must look like HOST:PORT, got {bind!r}")
    return host, int(port)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, port = _parse_bind(args.bind)
    loopback = host in ("127.0.0.1", "localhost", "::1")
    if not loopback and not args.token:
        raise ValidationError(
            "refusing to bind a non-loopback address without --token "
            "(the API is unauthenticated by default)"
        )
    data_dir = _data_dir(args)
    app = create_app(data_dir, token=args.token)
    if args.static and os.path.isdir(args.static):
        from starlette.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.static, html=True), name="ui")
    print(f"serving sessions from {data_dir} on http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise ValidationError(f"cannot bind {args.bind}: {exc}") from exc
    return EXIT_OK


def _emit(args, summary: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(summary, indent=2))
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monogrid", description=__doc__)
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="generate a static design CSV")
    d.add_argument("--kind", required=True, choices=["sg", "si", "mc", "lhd"])
    d.add_argument("-p", "--dimension", type=int, required=True)
    d.add_argument("-n", type=int, required=True)
    d.add_argument("--seed", type=int)
    d.add_argument("--out", required=True)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_design)

    r = sub.add_parser("run", help="run a sequential strategy against an oracle")
    r.add_argument("--strategy", required=True, choices=["amc", "gg", "ag", "gi", "ai", "ale"])
    r.add_argument(
        "--oracle",
        required=True,
        choices=["illustration", "arctan", "halfspace", "corner", "threshold", "staircase", "tabular"],
    )
    r.add_argument("-p", "--dimension", type=int, default=2)
    r.add_argument("-n", "--budget", dest="n", type=int, required=True)
    r.add_argument("--mu", type=float)
    r.add_argument("--threshold", type=float, default=0.5)
    r.add_argument("--resolution", type=int, default=8)
    r.add_argument("--oracle-seed", type=int, default=0)
    r.add_argument("--table")
    r.add_argument("--transform")
    r.add_argument("--seed", type=int)
    r.add_argument("--amc-max-attempts", type=int, default=1_000_000)
    r.add_argument("--out")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="execute an experiment plan")
    b.add_argument("--plan", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--full", action="store_true", help="keep the plan's full test-point budget")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("theory", help="run formula-vs-simulation checks")
    t.add_argument("--check", action="append", help="check name (repeatable)")
    t.add_argument("--all", action="store_true")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_theory)

    s = sub.add_parser("serve", help="serve the session HTTP API")
    s.add_argument("--bind", default="127.0.0.1:8765")
    s.add_argument("--data-dir")
    s.add_argument("--token")
    s.add_argument("--static", help="directory of UI assets to serve at /")
    s.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO))
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
