"""Command-line entry point: ``orgmine {stats,similar-task,sub-contract,bench}``.

Exit codes: 0 success, 2 input or configuration error, 3 engine error,
4 engine result disagreeing with the reference implementation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import bench, export
from .backends import ENGINES, make_engine
from .errors import BenchError, EngineError, InvariantViolation, LogError
from .event_log import (
    BPI2014_DELIMITER,
    BPI2014_SCHEMA,
    ColumnMapping,
    EventLog,
    read_log,
    stats,
)
from .metrics import Sociogram, SubContractParams, similar_task_log, sub_contract_log
from .synthetic import synthetic_log

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ENGINE = 3
EXIT_INVARIANT = 4
TOLERANCE = 1e-9


class CliError(Exception):
    def __init__(self, message: str, exit_code: int) -> None:
        super().__init__(message)
        self.exit_code = exit_code


def _column(value: str | None, fallback: str | int, indexed: bool) -> str | int | None:
    if value is None:
        return fallback
    if indexed:
        try:
            return int(value)
        except ValueError:
            raise CliError(f"--no-header needs integer column indices (got {value!r})", EXIT_INPUT) from None
    return value


def _schema(args: argparse.Namespace) -> tuple[ColumnMapping, str]:
    indexed = args.no_header
    if args.preset == "bpi2014":
        base, delimiter = BPI2014_SCHEMA, BPI2014_DELIMITER
    elif indexed:
        base, delimiter = ColumnMapping(0, 1, 2), ","
    else:
        base, delimiter = ColumnMapping(), ","
    schema = ColumnMapping(
        case=_column(args.case_col, base.case, indexed),
        activity=_column(args.activity_col, base.activity, indexed),
        actor=_column(args.actor_col, base.actor, indexed),
        timestamp=_column(args.timestamp_col, None, indexed) if args.timestamp_col else None,
    )
    if args.delimiter is not None:
        delimiter = "\t" if args.delimiter == "\\t" else args.delimiter
    return schema, delimiter


def load_input(args: argparse.Namespace) -> EventLog:
    if args.input.startswith("synthetic:"):
        _, _, shape = args.input.partition(":")
        size, _, seed = shape.partition(":")
        try:
            return synthetic_log(int(size), seed=int(seed or 0))
        except ValueError as exc:
            raise CliError(f"bad synthetic input {args.input!r}: {exc}", EXIT_INPUT) from None
    schema, delimiter = _schema(args)
    log = read_log(
        args.input,
        schema=schema,
        delimiter=delimiter,
        has_header=not args.no_header,
        lenient=args.lenient,
        sort_by_timestamp=args.sort_by_timestamp,
    )
    if log.skipped_rows:
        print(f"skipped {log.skipped_rows} malformed row(s)", file=sys.stderr)
    return log


def _params(args: argparse.Namespace) -> SubContractParams:
    try:
        return SubContractParams(
            beta=args.beta,
            depth=args.depth,
            require_distinct_activities=args.distinct_activities,
            loop_bounds=args.loop_bounds,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _write(data: bytes, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(output, "wb") as fh:
            fh.write(data)


def _checked(result: Sociogram, reference: Sociogram, engine: str) -> Sociogram:
    diff = result.max_abs_diff(reference)
    if diff > TOLERANCE:
        raise InvariantViolation(f"{engine} engine differs from reference by {diff:.3g}")
    return result


def cmd_stats(args: argparse.Namespace) -> int:
    print(stats(load_input(args)).as_line())
    return EXIT_OK


def cmd_similar_task(args: argparse.Namespace) -> int:
    log = load_input(args)
    reference = similar_task_log(log)
    if args.engine == "reference":
        result = reference
    else:
        result = _checked(make_engine(args.engine, "similar").load(log).build_similar_task(), reference, args.engine)
    _write(export.render(result, args.format), args.output)
    return EXIT_OK


def cmd_sub_contract(args: argparse.Namespace) -> int:
    params = _params(args)
    log = load_input(args)
    reference = sub_contract_log(log, params)
    if args.engine == "reference":
        result = reference
    else:
        engine = make_engine(args.engine, "subcontract").load(log)
        result = _checked(engine.build_sub_contract(params), reference, args.engine)
    _write(export.render(result, args.format), args.output)
    return EXIT_OK


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args: argparse.Namespace) -> int:
    params = _params(args)
    engines = tuple(e for e in args.engines.split(",") if e)
    log = load_input(args)
    config = bench.BenchConfig(
        engines=engines,
        algorithm=args.algorithm.replace("-", "_"),
        params=params,
        chunk_sizes=args.chunks,
        runs=args.runs,
        warmup_runs=args.warmup,
        source=args.input,
    )
    config.resolve_chunks(log)
    report = bench.run_bench(log, config)
    _write(bench.emit_report(report, args.format), args.output)
    if len(engines) >= 2 and args.compare:
        rows = bench.compare_engines(report, engines[0], engines[1])
        print(bench.format_comparison(rows, engines[0], engines[1]), file=sys.stderr)
    return EXIT_OK


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="event log path, '-' for stdin, or synthetic:N[:SEED]")
    g = p.add_argument_group("input schema")
    g.add_argument("--preset", choices=["bpi2014"], help="BPI-2014 columns with ';' delimiter")
    g.add_argument("--case-col", help="case id column (default: case)")
    g.add_argument("--activity-col", help="activity column (default: activity)")
    g.add_argument("--actor-col", help="actor column (default: actor)")
    g.add_argument("--timestamp-col", help="timestamp column (ISO-8601 or epoch milliseconds)")
    g.add_argument("--sort-by-timestamp", action="store_true", help="reorder events by timestamp")
    g.add_argument("--delimiter", help="field delimiter (default ',')")
    g.add_argument("--no-header", action="store_true", help="no header row; columns are 0-based indices")
    g.add_argument("--lenient", action="store_true", help="skip malformed rows instead of failing")


def _add_params_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sub-contract parameters")
    g.add_argument("--beta", type=float, default=0.5, help="causality fall factor (default 0.5)")
    g.add_argument("--depth", type=int, default=5, help="maximum bounding gap minus one (default 5)")
    g.add_argument(
        "--distinct-activities",
        action="store_true",
        help="only count bounding events whose activities differ",
    )
    g.add_argument(
        "--loop-bounds", choices=["exclusive", "inclusive", "unbounded"], default="exclusive",
        help=argparse.SUPPRESS,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orgmine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    engines = sorted(ENGINES)

    p = sub.add_parser("stats", help="event/case/actor/activity counts")
    _add_input_args(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("similar-task", help="Similar-Task sociogram")
    _add_input_args(p)
    p.add_argument("--engine", choices=engines, default="reference")
    p.add_argument("--format", choices=export.FORMATS, default="csv")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_similar_task)

    p = sub.add_parser("sub-contract", help="Sub-Contract sociogram")
    _add_input_args(p)
    _add_params_args(p)
    p.add_argument("--engine", choices=engines, default="reference")
    p.add_argument("--format", choices=export.FORMATS, default="csv")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_sub_contract)

    p = sub.add_parser("bench", help="benchmark engines over prefix chunks")
    _add_input_args(p)
    _add_params_args(p)
    p.add_argument("--engines", default="reference,tabular,graph", help="comma-separated engine names")
    p.add_argument("--algorithm", choices=["similar-task", "sub-contract"], default="similar-task")
    p.add_argument("--chunks", type=_int_list, default=(), help="comma-separated prefix sizes (default: whole log)")
    p.add_argument("--runs", type=int, default=5, help="measured runs per cell (default 5)")
    p.add_argument("--warmup", type=int, default=1, help="discarded warm-up runs (default 1)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--compare", action="store_true", help="print a speed ratio table for the first two engines")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (LogError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EngineError, BenchError) as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
