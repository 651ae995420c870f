"""Benchmark harness: per-phase timings over prefix chunks, storage, reports.

Each (chunk, engine) cell runs ``warmup_runs`` discarded runs and then
``runs`` measured runs, every run on a freshly loaded engine. Engines run one
after another, never interleaved, and every sociogram produced is checked
against the reference before its timings are kept.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

from .backends import (
    ENGINES,
    SIMILAR_TASK_PHASES,
    SUB_CONTRACT_PHASES,
    Phase,
    PhaseTiming,
    StorageReport,
    make_engine,
)
from .errors import BenchError, InvariantViolation, LogError, MissingPair, SizeOutOfRange
from .event_log import EventLog, LogStats, chunk_prefixes, stats
from .metrics import Sociogram, SubContractParams, similar_task_log, sub_contract_log

Algorithm = Literal["similar_task", "sub_contract"]
ALGORITHMS: tuple[Algorithm, ...] = ("similar_task", "sub_contract")
SCHEMA_VERSION = 1
REPORT_NOTE = (
    "Durations are process-internal monotonic wall-clock times. CPU usage and OS "
    "disk counters are not collected. Storage bytes follow each engine's "
    "documented accounting rules, not on-disk file sizes."
)
CSV_COLUMNS = [
    "engine",
    "algorithm",
    "chunk_size",
    "unique_actors",
    "phase",
    "run",
    "duration_ms",
    "storage_total_bytes",
    "storage_parts",
]


def phases_for(algorithm: Algorithm) -> tuple[Phase, ...]:
    build = SIMILAR_TASK_PHASES if algorithm == "similar_task" else SUB_CONTRACT_PHASES
    return ("load",) + build


@dataclass(frozen=True)
class BenchConfig:
    engines: tuple[str, ...] = ("reference", "tabular", "graph")
    algorithm: Algorithm = "similar_task"
    params: SubContractParams = field(default_factory=SubContractParams)
    chunk_sizes: tuple[int, ...] = ()
    runs: int = 5
    warmup_runs: int = 1
    tolerance: float = 1e-9
    source: str = ""

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise LogError("runs must be >= 1")
        if self.warmup_runs < 0:
            raise LogError("warmup_runs must be >= 0")
        if self.algorithm not in ALGORITHMS:
            raise LogError(f"unknown algorithm {self.algorithm!r}")
        if not self.engines:
            raise LogError("at least one engine is required")
        for name in self.engines:
            if name not in ENGINES:
                raise LogError(f"unknown engine {name!r}")
        if len(set(self.engines)) != len(self.engines):
            raise LogError("engines must be distinct")

    def resolve_chunks(self, log: EventLog) -> list[int]:
        """Chunk sizes for this log; no sizes means one chunk holding the whole log."""
        sizes = list(self.chunk_sizes) or [len(log)]
        previous = 0
        for size in sizes:
            if size < 1 or size > len(log):
                raise SizeOutOfRange(size, f"log has {len(log)} events")
            if size <= previous:
                raise SizeOutOfRange(size, "sizes must be strictly increasing")
            previous = size
        return sizes

    def as_dict(self) -> dict[str, object]:
        return {
            "engines": list(self.engines),
            "algorithm": self.algorithm,
            "params": self.params.as_dict(),
            "chunk_sizes": list(self.chunk_sizes),
            "runs": self.runs,
            "warmup_runs": self.warmup_runs,
            "tolerance": self.tolerance,
            "source": self.source,
        }


@dataclass
class ChunkResult:
    engine: str
    chunk_size: int
    stats: LogStats
    storage: StorageReport
    durations_ns: dict[str, list[int]]
    max_abs_diff: float

    def runs_ms(self, phase: str) -> list[float]:
        return [ns / 1e6 for ns in self.durations_ns[phase]]

    def mean_ms(self, phase: str) -> float:
        return statistics.fmean(self.runs_ms(phase))


@dataclass
class BenchReport:
    config: BenchConfig
    results: list[ChunkResult] = field(default_factory=list)

    def result(self, engine: str, chunk_size: int) -> ChunkResult:
        for r in self.results:
            if r.engine == engine and r.chunk_size == chunk_size:
                return r
        raise KeyError((engine, chunk_size))

    @property
    def chunk_sizes(self) -> list[int]:
        return sorted({r.chunk_size for r in self.results})


def _reference(log: EventLog, config: BenchConfig) -> Sociogram:
    if config.algorithm == "similar_task":
        return similar_task_log(log)
    return sub_contract_log(log, config.params)


def _run_once(name: str, chunk: EventLog, config: BenchConfig) -> tuple[Sociogram, list[PhaseTiming], StorageReport]:
    mode = "similar" if config.algorithm == "similar_task" else "subcontract"
    engine = make_engine(name, mode)
    engine.load(chunk)
    if config.algorithm == "similar_task":
        result = engine.build_similar_task()
    else:
        result = engine.build_sub_contract(config.params)
    return result, engine.phase_timings(), engine.storage_report()


def run_bench(log: EventLog, config: BenchConfig) -> BenchReport:
    sizes = config.resolve_chunks(log)
    report = BenchReport(config)
    expected_phases = phases_for(config.algorithm)
    for size, chunk in zip(sizes, chunk_prefixes(log, sizes)):
        reference = _reference(chunk, config)
        chunk_stats = stats(chunk)
        for name in config.engines:
            durations: dict[str, list[int]] = {p: [] for p in expected_phases}
            worst = 0.0
            storage = StorageReport(name)
            try:
                for run in range(config.warmup_runs + config.runs):
                    result, timings, storage = _run_once(name, chunk, config)
                    diff = result.max_abs_diff(reference)
                    if diff > config.tolerance:
                        raise InvariantViolation(
                            f"[engine={name} chunk={size}] sociogram differs from reference by {diff:.3g}"
                        )
                    worst = max(worst, diff)
                    if run < config.warmup_runs:
                        continue
                    for t in timings:
                        t = replace(t, run_index=run - config.warmup_runs)
                        durations[t.phase].append(t.duration_ns)
            except InvariantViolation:
                raise
            except Exception as exc:
                raise BenchError(name, size, exc) from exc
            report.results.append(ChunkResult(name, size, chunk_stats, storage, durations, worst))
    return report


# -- emission ------------------------------------------------------------------


def _result_doc(r: ChunkResult, algorithm: str) -> dict[str, object]:
    return {
        "engine": r.engine,
        "algorithm": algorithm,
        "chunk_size": r.chunk_size,
        "stats": {
            "event_count": r.stats.event_count,
            "case_count": r.stats.case_count,
            "unique_actors": r.stats.unique_actors,
            "unique_activities": r.stats.unique_activities,
        },
        "storage": r.storage.as_dict(),
        "phases": list(r.durations_ns),
        "max_abs_diff_vs_reference": r.max_abs_diff,
    }


def _measurement_doc(r: ChunkResult) -> dict[str, object]:
    phases = {}
    for phase, runs in r.durations_ns.items():
        ms = r.runs_ms(phase)
        phases[phase] = {
            "runs_ns": list(runs),
            "runs_ms": ms,
            "mean_ms": r.mean_ms(phase) if ms else None,
            "min_ms": min(ms) if ms else None,
            "max_ms": max(ms) if ms else None,
        }
    return {"engine": r.engine, "chunk_size": r.chunk_size, "phases": phases}


def report_to_dict(report: BenchReport) -> dict[str, object]:
    """Everything except ``measurements`` is deterministic for fixed inputs."""
    algorithm = report.config.algorithm
    return {
        "schema_version": SCHEMA_VERSION,
        "note": REPORT_NOTE,
        "config": report.config.as_dict(),
        "results": [_result_doc(r, algorithm) for r in report.results],
        "measurements": [_measurement_doc(r) for r in report.results],
    }


def _flat_config(prefix: str, value: object, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flat_config(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, list):
        out.append((prefix, " ".join(str(v) for v in value)))
    else:
        out.append((prefix, json.dumps(value) if isinstance(value, bool) else str(value)))


def emit_report(report: BenchReport, fmt: Literal["json", "csv"] = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")

    buf = io.StringIO(newline="")
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    buf.write(f"# note={REPORT_NOTE}\n")
    echo: list[tuple[str, str]] = []
    _flat_config("", report.config.as_dict(), echo)
    for key, value in echo:
        buf.write(f"# config.{key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    algorithm = report.config.algorithm
    for r in report.results:
        base = [r.engine, algorithm, r.chunk_size, r.stats.unique_actors]
        for phase in r.durations_ns:
            for run, ms in enumerate(r.runs_ms(phase)):
                writer.writerow(base + [phase, run, repr(ms), "", ""])
        parts = ";".join(f"{k}={v}" for k, v in r.storage.parts.items())
        for phase in r.durations_ns:
            writer.writerow(base + [phase, "mean", repr(r.mean_ms(phase)), r.storage.total, parts])
    return buf.getvalue().encode("utf-8")


def read_report_csv(data: bytes) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Split an emitted CSV report into its config echo and data rows."""
    echo: dict[str, str] = {}
    body = []
    for line in data.decode("utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            echo[key] = value
        else:
            body.append(line)
    return echo, list(csv.DictReader(body))


# -- comparison ----------------------------------------------------------------


@dataclass(frozen=True)
class PhaseComparison:
    chunk_size: int
    phase: str
    mean_a_ms: float
    mean_b_ms: float
    ratio: float
    faster: str


def compare_engines(
    report: BenchReport, engine_a: str | None = None, engine_b: str | None = None
) -> list[PhaseComparison]:
    """Ratio of mean durations ``engine_a / engine_b`` per (chunk, phase).

    A ratio above 1 means ``engine_b`` was faster.
    """
    engines: Sequence[str] = report.config.engines
    if engine_a is None or engine_b is None:
        if len(engines) < 2:
            raise MissingPair("comparison needs two engines in the report")
        engine_a, engine_b = engines[0], engines[1]
    rows = []
    for size in report.chunk_sizes:
        try:
            ra = report.result(engine_a, size)
            rb = report.result(engine_b, size)
        except KeyError as exc:
            raise MissingPair(f"no result for engine {exc.args[0][0]!r} at chunk {size}") from None
        for phase in ra.durations_ns:
            if phase not in rb.durations_ns:
                continue
            a, b = ra.mean_ms(phase), rb.mean_ms(phase)
            if a == b:
                ratio, faster = 1.0, "tie"
            elif b == 0:
                ratio, faster = float("inf"), engine_b
            else:
                ratio = a / b
                faster = engine_b if ratio > 1 else engine_a
            rows.append(PhaseComparison(size, phase, a, b, ratio, faster))
    return rows


def format_comparison(rows: list[PhaseComparison], engine_a: str, engine_b: str) -> str:
    lines = [f"{'chunk':>10} {'phase':<20} {engine_a + ' ms':>14} {engine_b + ' ms':>14} {'ratio':>8}  faster"]
    for r in rows:
        lines.append(
            f"{r.chunk_size:>10} {r.phase:<20} {r.mean_a_ms:>14.3f} {r.mean_b_ms:>14.3f} {r.ratio:>8.2f}  {r.faster}"
        )
    return "\n".join(lines)
