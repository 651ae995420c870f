"""Reference organizational-mining metrics.

These are the ground-truth implementations every storage engine is checked
against: the actor-activity matrix, the Similar-Task sociogram (cosine of matrix
rows) and the Sub-Contract sociogram, plus an independent brute-force
Sub-Contract validator used only in tests and acceptance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import ActorIdOutOfRange, LengthMismatch
from .event_log import EventLog, Trace, group_by_case

SociogramKind = Literal["similar_task", "sub_contract"]
LoopBounds = Literal["exclusive", "inclusive", "unbounded"]

ORACLE_MAX_EVENTS = 10_000


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ActorActivityMatrix:
    counts: np.ndarray
    actors: tuple[str, ...]
    activities: tuple[str, ...]

    def cell(self, actor: str, activity: str) -> int:
        return int(self.counts[self.actors.index(actor), self.activities.index(activity)])

    def row(self, actor: str) -> dict[str, int]:
        i = self.actors.index(actor)
        return {a: int(v) for a, v in zip(self.activities, self.counts[i])}

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def build_actor_activity_matrix(log: EventLog) -> ActorActivityMatrix:
    counts = np.zeros((len(log.actors), len(log.activities)), dtype=np.int64)
    np.add.at(counts, (log.actor_ids, log.activity_ids), 1)
    return ActorActivityMatrix(_frozen(counts), log.actors, log.activities)


def cosine_similarity(p: Sequence[float], q: Sequence[float]) -> float:
    """Cosine of the angle between ``p`` and ``q``; 0.0 when either is all zero."""
    if len(p) != len(q):
        raise LengthMismatch(f"vectors differ in length ({len(p)} vs {len(q)})")
    dot = sum(a * b for a, b in zip(p, q))
    norm_p = math.sqrt(sum(a * a for a in p))
    norm_q = math.sqrt(sum(b * b for b in q))
    if norm_p == 0 or norm_q == 0:
        return 0.0
    return float(dot / (norm_p * norm_q))


@dataclass(frozen=True)
class SubContractParams:
    """Parameters of the Sub-Contract metric.

    ``beta`` is the causality fall factor: a bounding interval of gap ``k``
    weighs ``beta ** (k - 2)``. ``depth`` caps the gap. ``loop_bounds`` is an
    experimentation toggle and stays ``"exclusive"`` for normal use.
    """

    beta: float = 0.5
    depth: int = 5
    require_distinct_activities: bool = False
    loop_bounds: LoopBounds = "exclusive"

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1] (got {self.beta})")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1 (got {self.depth})")
        if self.loop_bounds not in ("exclusive", "inclusive", "unbounded"):
            raise ValueError(f"unknown loop_bounds {self.loop_bounds!r}")

    def k_range(self, size: int) -> range:
        """Gaps between bounding events processed for a trace of ``size`` events."""
        if size < 3:
            return range(0)
        if self.loop_bounds == "unbounded":
            return range(2, size)
        min_k = size if size < self.depth else self.depth + 1
        min_k = max(min_k, 3)
        if self.loop_bounds == "inclusive":
            return range(2, min_k + 1)
        return range(2, min_k)

    def weight(self, k: int) -> float:
        return self.beta ** (k - 2)

    def as_dict(self) -> dict[str, object]:
        return {
            "beta": self.beta,
            "depth": self.depth,
            "require_distinct_activities": self.require_distinct_activities,
            "loop_bounds": self.loop_bounds,
        }


@dataclass(frozen=True)
class Sociogram:
    """Actor x actor weighted matrix.

    Similar-Task sociograms are symmetric with a zero diagonal; Sub-Contract
    ones are directed (row = bounding actor, column = intermediate actor).
    """

    values: np.ndarray
    actors: tuple[str, ...]
    kind: SociogramKind
    normalizer: float = 0.0
    params: SubContractParams | None = field(default=None)

    def value(self, source: str, target: str) -> float:
        return float(self.values[self.actors.index(source), self.actors.index(target)])

    @property
    def directed(self) -> bool:
        return self.kind == "sub_contract"

    def edges(self) -> list[tuple[str, str, float]]:
        """Non-zero entries; each unordered pair once for undirected sociograms."""
        out = []
        n = len(self.actors)
        for i in range(n):
            for j in range(n):
                if not self.directed and j <= i:
                    continue
                v = float(self.values[i, j])
                if v > 0:
                    out.append((self.actors[i], self.actors[j], v))
        return out

    def max_abs_diff(self, other: Sociogram) -> float:
        if self.actors != other.actors:
            raise ValueError("sociograms are over different actor sets")
        if self.values.size == 0:
            return 0.0
        return float(np.max(np.abs(self.values - other.values)))


def similar_task(m: ActorActivityMatrix) -> Sociogram:
    """Cosine similarity between every pair of actor rows.

    Dot products are taken over the integer counts, so they are exact; only the
    final division rounds.
    """
    counts = m.counts.astype(np.int64)
    gram = counts @ counts.T
    norms = np.sqrt(np.diag(gram).astype(np.float64))
    denom = np.outer(norms, norms)
    values = np.zeros(gram.shape, dtype=np.float64)
    nz = denom > 0
    values[nz] = gram[nz] / denom[nz]
    np.fill_diagonal(values, 0.0)
    return Sociogram(_frozen(values), m.actors, "similar_task")


# --- Sub-Contract -----------------------------------------------------------
#
# The reference route below is vectorized per gap k over the concatenated log;
# the steps are separate functions so engines can time them individually.


@dataclass(frozen=True)
class FlatTraces:
    actors: np.ndarray
    activities: np.ndarray
    trace_index: np.ndarray
    position: np.ndarray
    sizes: np.ndarray


def flatten_traces(traces: Sequence[Trace], actor_count: int) -> FlatTraces:
    sizes = np.fromiter((len(t) for t in traces), dtype=np.int64, count=len(traces))
    actors = np.fromiter((a for t in traces for a in t.actor_ids), dtype=np.int64, count=int(sizes.sum()))
    activities = np.fromiter(
        (a for t in traces for a in t.activity_ids), dtype=np.int64, count=int(sizes.sum())
    )
    if actors.size:
        bad = actors[(actors < 0) | (actors >= actor_count)]
        if bad.size:
            raise ActorIdOutOfRange(int(bad[0]), actor_count)
    trace_index = np.repeat(np.arange(len(traces), dtype=np.int64), sizes)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1])) if len(traces) else np.zeros(0, np.int64)
    position = np.arange(actors.size, dtype=np.int64) - np.repeat(starts, sizes)
    return FlatTraces(actors, activities, trace_index, position, sizes)


def sub_contract_normal(sizes: Sequence[int], params: SubContractParams) -> float:
    normal = 0.0
    for size in sizes:
        for k in params.k_range(int(size)):
            normal += params.weight(k)
    return normal


def detect_subcontracts(flat: FlatTraces, params: SubContractParams) -> dict[int, np.ndarray]:
    """Per gap k, the distinct ``(trace, bounding actor, intermediate actor)`` rows.

    Distinctness per (trace, k) is the 0/1 collapse of the per-case matrix.
    """
    kmax_per_trace = np.array(
        [max(params.k_range(int(s)), default=0) for s in flat.sizes], dtype=np.int64
    )
    if kmax_per_trace.size == 0 or kmax_per_trace.max() < 2:
        return {}
    kmax_at = kmax_per_trace[flat.trace_index]
    size_at = flat.sizes[flat.trace_index]
    n = flat.actors.size
    found: dict[int, np.ndarray] = {}
    for k in range(2, int(kmax_per_trace.max()) + 1):
        if k >= n:
            break
        head = np.arange(n - k)
        ok = (flat.position[head] + k < size_at[head]) & (kmax_at[head] >= k)
        ok &= flat.actors[head] == flat.actors[head + k]
        if params.require_distinct_activities:
            ok &= flat.activities[head] != flat.activities[head + k]
        bounds = head[ok]
        if bounds.size == 0:
            continue
        rows = np.concatenate(
            [
                np.stack([flat.trace_index[bounds], flat.actors[bounds], flat.actors[bounds + d]], axis=1)
                for d in range(1, k)
            ]
        )
        found[k] = np.unique(rows, axis=0)
    return found


def accumulate_subcontracts(
    detections: dict[int, np.ndarray], actor_count: int, params: SubContractParams
) -> np.ndarray:
    acc = np.zeros((actor_count, actor_count), dtype=np.float64)
    for k in sorted(detections):
        rows = detections[k]
        cells = np.bincount(rows[:, 1] * actor_count + rows[:, 2], minlength=actor_count * actor_count)
        acc += params.weight(k) * cells.reshape(actor_count, actor_count)
    return acc


def normalize_subcontracts(acc: np.ndarray, normal: float) -> np.ndarray:
    if normal == 0:
        return np.zeros_like(acc)
    return acc / normal


def _actor_labels(actors: Sequence[str] | None, actor_count: int) -> tuple[str, ...]:
    if actors is None:
        return tuple(str(i) for i in range(actor_count))
    if len(actors) != actor_count:
        raise ValueError("actor labels do not match actor_count")
    return tuple(actors)


def sub_contract(
    traces: Sequence[Trace],
    actor_count: int,
    params: SubContractParams = SubContractParams(),
    actors: Sequence[str] | None = None,
) -> Sociogram:
    """Normalized Sub-Contract sociogram.

    For every trace of at least three events and every gap ``k`` in
    ``params.k_range``: an actor ``i`` bounding positions ``p`` and ``p + k``
    subcontracts every actor strictly between them. Each (trace, k) marks a
    cell at most once, weighted ``beta ** (k - 2)``; the total is divided by the
    sum of those weights over all processed (trace, k).
    """
    if actor_count < 1:
        raise ValueError("actor_count must be >= 1")
    labels = _actor_labels(actors, actor_count)
    flat = flatten_traces(traces, actor_count)
    normal = sub_contract_normal(flat.sizes, params)
    acc = accumulate_subcontracts(detect_subcontracts(flat, params), actor_count, params)
    values = normalize_subcontracts(acc, normal)
    return Sociogram(_frozen(values), labels, "sub_contract", normal, params)


def sub_contract_log(log: EventLog, params: SubContractParams = SubContractParams()) -> Sociogram:
    return sub_contract(group_by_case(log), len(log.actors), params, log.actors)


def similar_task_log(log: EventLog) -> Sociogram:
    return similar_task(build_actor_activity_matrix(log))


def sub_contract_oracle(
    traces: Sequence[Trace],
    actor_count: int,
    params: SubContractParams = SubContractParams(),
    actors: Sequence[str] | None = None,
) -> Sociogram:
    """Brute-force Sub-Contract: enumerate every (trace, k, i, j) tuple.

    Shares no code with :func:`sub_contract` beyond the params object; the gap
    bounds are re-derived here from the algorithm text.
    """
    total = sum(len(t) for t in traces)
    if total > ORACLE_MAX_EVENTS:
        raise ValueError(f"oracle refuses {total} events (limit {ORACLE_MAX_EVENTS})")
    labels = _actor_labels(actors, actor_count)
    for t in traces:
        for a in t.actor_ids:
            if not 0 <= a < actor_count:
                raise ActorIdOutOfRange(a, actor_count)

    d = [[0.0] * actor_count for _ in range(actor_count)]
    normal = 0.0
    for t in traces:
        size = len(t.actor_ids)
        if size < 3:
            continue
        if params.loop_bounds == "unbounded":
            ks = list(range(2, size))
        else:
            min_k = size if size < params.depth else params.depth + 1
            if min_k < 3:
                min_k = 3
            top = min_k + 1 if params.loop_bounds == "inclusive" else min_k
            ks = [k for k in range(2, top)]
        for k in ks:
            w = params.beta ** (k - 2)
            normal += w
            m = [[0] * actor_count for _ in range(actor_count)]
            for i in range(size):
                for j in range(size):
                    if i + k >= size or not i < j < i + k:
                        continue
                    if t.actor_ids[i] != t.actor_ids[i + k]:
                        continue
                    if params.require_distinct_activities and t.activity_ids[i] == t.activity_ids[i + k]:
                        continue
                    m[t.actor_ids[i]][t.actor_ids[j]] = 1
            for r in range(actor_count):
                for c in range(actor_count):
                    d[r][c] += m[r][c] * w
    values = np.array(d, dtype=np.float64).reshape(actor_count, actor_count)
    if normal > 0:
        values = values / normal
    else:
        values = np.zeros_like(values)
    return Sociogram(_frozen(values), labels, "sub_contract", normal, params)
