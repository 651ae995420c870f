"""Common engine surface: load a log, build either sociogram, report timings and storage."""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Literal

from ..errors import EmptyLog, NotLoaded, WrongMode
from ..event_log import EventLog
from ..metrics import Sociogram, SubContractParams

Phase = Literal[
    "load",
    "compute_similarity",
    "write_result",
    "update_normal",
    "detection",
    "update_result",
    "normalize",
]
SIMILAR_TASK_PHASES: tuple[Phase, ...] = ("compute_similarity", "write_result")
SUB_CONTRACT_PHASES: tuple[Phase, ...] = ("update_normal", "detection", "update_result", "normalize")

Mode = Literal["similar", "subcontract", "full"]
MODES: tuple[Mode, ...] = ("similar", "subcontract", "full")


@dataclass(frozen=True)
class PhaseTiming:
    phase: Phase
    duration_ns: int
    run_index: int = 0

    @property
    def duration_ms(self) -> float:
        return self.duration_ns / 1e6


@dataclass(frozen=True)
class StorageReport:
    """Byte accounting per structure; ``total`` is the sum of ``parts``."""

    engine: str
    parts: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.parts.values())

    def as_dict(self) -> dict[str, object]:
        return {"engine": self.engine, "parts": dict(self.parts), "total": self.total}


class Engine(ABC):
    """One storage-engine design.

    ``mode`` selects which structures ``load`` populates: ``"similar"`` for
    Similar-Task only, ``"subcontract"`` for Sub-Contract only, ``"full"`` for
    both. An instance is single-writer; distinct instances are independent.
    """

    name: str = "engine"

    def __init__(self, mode: Mode = "full") -> None:
        if mode not in MODES:
            raise ValueError(f"unknown engine mode {mode!r}")
        self.mode = mode
        self.log: EventLog | None = None
        self._load_timing: PhaseTiming | None = None
        self._build_timings: list[PhaseTiming] = []
        self._reset()

    @contextmanager
    def _phase(self, phase: Phase, sink: list[PhaseTiming]) -> Iterator[None]:
        start = time.perf_counter_ns()
        yield
        sink.append(PhaseTiming(phase, time.perf_counter_ns() - start))

    def _require(self, needed: Literal["similar", "subcontract"]) -> EventLog:
        if self.log is None:
            raise NotLoaded(self.name)
        if self.mode not in (needed, "full"):
            raise WrongMode(self.name, self.mode, needed)
        return self.log

    @property
    def has_similar(self) -> bool:
        return self.mode in ("similar", "full")

    @property
    def has_subcontract(self) -> bool:
        return self.mode in ("subcontract", "full")

    def load(self, log: EventLog) -> Engine:
        if not log.events:
            raise EmptyLog()
        self._reset()
        sink: list[PhaseTiming] = []
        with self._phase("load", sink):
            self._load(log)
        self.log = log
        self._load_timing = sink[0]
        self._build_timings = []
        return self

    def build_similar_task(self) -> Sociogram:
        self._require("similar")
        sink: list[PhaseTiming] = []
        result = self._similar_task(sink)
        self._build_timings = sink
        return result

    def build_sub_contract(self, params: SubContractParams = SubContractParams()) -> Sociogram:
        self._require("subcontract")
        sink: list[PhaseTiming] = []
        result = self._sub_contract(params, sink)
        self._build_timings = sink
        return result

    def phase_timings(self) -> list[PhaseTiming]:
        """Load timing followed by the phases of the most recent build."""
        head = [self._load_timing] if self._load_timing is not None else []
        return head + list(self._build_timings)

    @abstractmethod
    def _reset(self) -> None: ...

    @abstractmethod
    def _load(self, log: EventLog) -> None: ...

    @abstractmethod
    def _similar_task(self, sink: list[PhaseTiming]) -> Sociogram: ...

    @abstractmethod
    def _sub_contract(self, params: SubContractParams, sink: list[PhaseTiming]) -> Sociogram: ...

    @abstractmethod
    def storage_report(self) -> StorageReport: ...
