from __future__ import annotations

from .base import (
    MODES,
    SIMILAR_TASK_PHASES,
    SUB_CONTRACT_PHASES,
    Engine,
    Mode,
    Phase,
    PhaseTiming,
    StorageReport,
)
from .graph import GraphEngine, GraphStore
from .reference import ReferenceEngine
from .tabular import Table, TabularEngine

ENGINES: dict[str, type[Engine]] = {
    "reference": ReferenceEngine,
    "tabular": TabularEngine,
    "graph": GraphEngine,
}


def make_engine(name: str, mode: Mode = "full") -> Engine:
    try:
        cls = ENGINES[name]
    except KeyError:
        raise ValueError(f"unknown engine {name!r}; choose from {sorted(ENGINES)}") from None
    return cls(mode)


__all__ = [
    "ENGINES",
    "MODES",
    "SIMILAR_TASK_PHASES",
    "SUB_CONTRACT_PHASES",
    "Engine",
    "GraphEngine",
    "GraphStore",
    "Mode",
    "Phase",
    "PhaseTiming",
    "ReferenceEngine",
    "StorageReport",
    "Table",
    "TabularEngine",
    "make_engine",
]
