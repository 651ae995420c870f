"""The reference metrics behind the engine surface, so the bench can time them too."""

from __future__ import annotations

import numpy as np

from ..event_log import EventLog, group_by_case
from ..metrics import (
    ActorActivityMatrix,
    FlatTraces,
    Sociogram,
    SubContractParams,
    accumulate_subcontracts,
    build_actor_activity_matrix,
    detect_subcontracts,
    flatten_traces,
    normalize_subcontracts,
    similar_task,
    sub_contract_normal,
)
from .base import Engine, PhaseTiming, StorageReport


class ReferenceEngine(Engine):
    """Dense numpy arrays; storage is the ``nbytes`` of every array held."""

    name = "reference"

    def _reset(self) -> None:
        self.matrix: ActorActivityMatrix | None = None
        self.flat: FlatTraces | None = None
        self.result: Sociogram | None = None

    def _load(self, log: EventLog) -> None:
        if self.has_similar:
            self.matrix = build_actor_activity_matrix(log)
        if self.has_subcontract:
            self.flat = flatten_traces(group_by_case(log), len(log.actors))

    def _similar_task(self, sink: list[PhaseTiming]) -> Sociogram:
        assert self.matrix is not None
        with self._phase("compute_similarity", sink):
            values = similar_task(self.matrix).values
        with self._phase("write_result", sink):
            self.result = Sociogram(values.copy(), self.matrix.actors, "similar_task")
        return self.result

    def _sub_contract(self, params: SubContractParams, sink: list[PhaseTiming]) -> Sociogram:
        assert self.flat is not None and self.log is not None
        n = len(self.log.actors)
        with self._phase("update_normal", sink):
            normal = sub_contract_normal(self.flat.sizes, params)
        with self._phase("detection", sink):
            found = detect_subcontracts(self.flat, params)
        with self._phase("update_result", sink):
            acc = accumulate_subcontracts(found, n, params)
        with self._phase("normalize", sink):
            values = normalize_subcontracts(acc, normal)
        self.result = Sociogram(values, self.log.actors, "sub_contract", normal, params)
        return self.result

    def storage_report(self) -> StorageReport:
        if self.log is None:
            return StorageReport(self.name, {})
        parts: dict[str, int] = {}
        if self.matrix is not None:
            parts["actor_activity_matrix"] = int(self.matrix.counts.nbytes)
        if self.flat is not None:
            parts["event_arrays"] = int(
                sum(np.asarray(a).nbytes for a in (self.flat.actors, self.flat.activities,
                                                   self.flat.trace_index, self.flat.position))
            )
        if self.result is not None:
            parts["result"] = int(self.result.values.nbytes)
        return StorageReport(self.name, parts)
