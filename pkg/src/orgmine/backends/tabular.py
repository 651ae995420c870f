"""Row-store engine modelled on a relational implementation.

Data lives in materialized tables of plain Python rows. Joins are honest
nested loops over row storage (no hash joins), so cost follows the
Cartesian-product-then-select model of a naive SQL plan.

Storage accounting rules:

* ``INT`` = 4 bytes, ``DOUBLE`` = 8 bytes, ``VARCHAR(n)`` = n + 1 bytes
  (length prefix), where n is the longest value the column was declared for.
* A table with a primary key carries an index of ``rows * (key width + 8)``
  bytes (key copy plus an 8-byte row pointer).
* Reported bytes per table = data + index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Literal

import numpy as np

from ..event_log import EventLog
from ..metrics import Sociogram, SubContractParams
from .base import Engine, PhaseTiming, StorageReport

ColumnType = Literal["INT", "DOUBLE", "VARCHAR"]
ROW_POINTER_BYTES = 8


@dataclass(frozen=True)
class Column:
    name: str
    type: ColumnType
    length: int = 0

    @property
    def width(self) -> int:
        if self.type == "INT":
            return 4
        if self.type == "DOUBLE":
            return 8
        return self.length + 1


class Table:
    """A heap of rows with an optional primary-key index and auto-increment id."""

    def __init__(
        self,
        name: str,
        columns: list[Column],
        primary_key: str | None = None,
        auto_increment: bool = False,
    ) -> None:
        self.name = name
        self.columns = columns
        self.positions: dict[str, int] = {}
        for i, c in enumerate(columns):
            self.positions.setdefault(c.name, i)
        self.primary_key = primary_key
        self.auto_increment = auto_increment
        self.rows: list[list[Any]] = []
        self._pk: dict[Any, int] = {}
        self._next_id = 1

    def col(self, name: str) -> int:
        return self.positions[name]

    def insert(self, values: Iterable[Any]) -> list[Any]:
        row = list(values)
        if self.auto_increment:
            row.insert(0, self._next_id)
            self._next_id += 1
        if len(row) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(row)}")
        if self.primary_key is not None:
            key = row[self.positions[self.primary_key]]
            if key in self._pk:
                raise ValueError(f"{self.name}: duplicate primary key {key!r}")
            self._pk[key] = len(self.rows)
        self.rows.append(row)
        return row

    def lookup(self, key: Any) -> list[Any]:
        return self.rows[self._pk[key]]

    def data_bytes(self) -> int:
        return len(self.rows) * sum(c.width for c in self.columns)

    def index_bytes(self) -> int:
        if self.primary_key is None:
            return 0
        key_width = self.columns[self.positions[self.primary_key]].width
        return len(self.rows) * (key_width + ROW_POINTER_BYTES)

    def __len__(self) -> int:
        return len(self.rows)


def _varchar(name: str, values: Iterable[str]) -> Column:
    return Column(name, "VARCHAR", max((len(v) for v in values), default=1))


class TabularEngine(Engine):
    name = "tabular"

    def _reset(self) -> None:
        self.tables: dict[str, Table] = {}

    # -- load ----------------------------------------------------------------

    def _load(self, log: EventLog) -> None:
        case_col = _varchar("case_id", log.cases)
        actor_col = _varchar("actor", log.actors)
        activity_col = _varchar("activity", log.activities)
        schema = [Column("id", "INT"), case_col, actor_col, activity_col]

        dataset = Table("dataset", schema, primary_key="id", auto_increment=True)
        for ev in log.events:
            dataset.insert((ev.case_id, ev.actor, ev.activity))
        self.tables["dataset"] = dataset

        if self.has_subcontract:
            # ORDER BY case_id, id, then ids reassigned contiguously
            ordered = sorted(dataset.rows, key=lambda r: (r[1], r[0]))
            organised = Table("organiseddata", schema, primary_key="id", auto_increment=True)
            for row in ordered:
                organised.insert(row[1:])
            self.tables["organiseddata"] = organised

        if self.has_similar:
            self.tables["aamatrix"] = self._count_if_matrix(dataset, actor_col)

    def _count_if_matrix(self, dataset: Table, actor_col: Column) -> Table:
        actor_pos, activity_pos = dataset.col("actor"), dataset.col("activity")
        # cursor over DISTINCT activity, in scan order
        activities: list[str] = []
        seen: set[str] = set()
        for row in dataset.rows:
            if row[activity_pos] not in seen:
                seen.add(row[activity_pos])
                activities.append(row[activity_pos])
        aam = Table(
            "aamatrix",
            [actor_col] + [Column(a, "INT") for a in activities],
            primary_key="actor",
        )
        groups: dict[str, list[list[Any]]] = {}
        for row in dataset.rows:
            groups.setdefault(row[actor_pos], []).append(row)
        # SELECT actor, COUNT(IF(activity='X', 1, NULL)), ... GROUP BY actor
        for actor, rows in groups.items():
            counts = []
            for activity in activities:
                n = 0
                for row in rows:
                    if row[activity_pos] == activity:
                        n += 1
                counts.append(n)
            aam.insert([actor] + counts)
        return aam

    # -- Similar-Task --------------------------------------------------------

    def _similar_task(self, sink: list[PhaseTiming]) -> Sociogram:
        log = self.log
        assert log is not None
        aam = self.tables["aamatrix"]
        width = len(aam.columns) - 1

        with self._phase("compute_similarity", sink):
            triples = []
            # AAMatrix T1 JOIN AAMatrix T2 WHERE T1.actor <> T2.actor
            for t1 in aam.rows:
                for t2 in aam.rows:
                    if t1[0] == t2[0]:
                        continue
                    dot = 0
                    sq1 = 0
                    sq2 = 0
                    for c in range(1, width + 1):
                        a, b = t1[c], t2[c]
                        dot += a * b
                        sq1 += a * a
                        sq2 += b * b
                    denom = math.sqrt(sq1) * math.sqrt(sq2)
                    triples.append((t1[0], t2[0], dot / denom if denom > 0 else 0.0))
            triples.sort(key=lambda t: (t[0], t[1]))

        with self._phase("write_result", sink):
            actor_col = aam.columns[0]
            init_sim = Table(
                "initsim",
                [Column("sourceactor", "VARCHAR", actor_col.length),
                 Column("targetactor", "VARCHAR", actor_col.length),
                 Column("similarity", "DOUBLE")],
            )
            for triple in triples:
                init_sim.insert(triple)
            actors = [row[0] for row in aam.rows]
            final_sim = Table(
                "finalsim",
                [Column("sourceactor", "VARCHAR", actor_col.length)]
                + [Column(a, "DOUBLE") for a in actors],
                primary_key="sourceactor",
            )
            col_of = {a: i + 1 for i, a in enumerate(actors)}
            for actor in actors:
                final_sim.insert([actor] + [0.0] * len(actors))
            for source, target, value in init_sim.rows:
                final_sim.lookup(source)[col_of[target]] = value
            self.tables["initsim"] = init_sim
            self.tables["finalsim"] = final_sim

        return Sociogram(self._read_matrix(final_sim), log.actors, "similar_task")

    def _read_matrix(self, table: Table) -> np.ndarray:
        log = self.log
        assert log is not None
        n = len(log.actors)
        values = np.zeros((n, n), dtype=np.float64)
        col_of = {c.name: i for i, c in enumerate(table.columns) if i > 0}
        for i, source in enumerate(log.actors):
            row = table.lookup(source)
            for j, target in enumerate(log.actors):
                values[i, j] = row[col_of[target]]
        return values

    # -- Sub-Contract --------------------------------------------------------

    def _sub_contract(self, params: SubContractParams, sink: list[PhaseTiming]) -> Sociogram:
        log = self.log
        assert log is not None
        org = self.tables["organiseddata"]
        id_pos, case_pos = org.col("id"), org.col("case_id")
        actor_pos, activity_pos = org.col("actor"), org.col("activity")

        with self._phase("update_normal", sink):
            segments: list[tuple[int, int]] = []
            start = 0
            rows = org.rows
            for i in range(1, len(rows) + 1):
                if i == len(rows) or rows[i][case_pos] != rows[start][case_pos]:
                    segments.append((start, i))
                    start = i
            normal = 0.0
            for lo, hi in segments:
                for k in params.k_range(hi - lo):
                    normal += params.weight(k)

        with self._phase("detection", sink):
            # per case: organiseddata T1 JOIN organiseddata T2
            #   ON T2.id >= T1.id + 2 AND T2.id - T1.id <= kmax AND T1.actor = T2.actor
            #   [AND T1.activity <> T2.activity]  ORDER BY diff ASC
            detections: list[tuple[int, int, str, str]] = []
            for case_no, (lo, hi) in enumerate(segments):
                ks = params.k_range(hi - lo)
                if not ks:
                    continue
                kmax = ks[-1]
                case_rows = rows[lo:hi]
                pairs = []
                for t1 in case_rows:
                    for t2 in case_rows:
                        diff = t2[id_pos] - t1[id_pos]
                        if diff < 2 or diff > kmax:
                            continue
                        if t1[actor_pos] != t2[actor_pos]:
                            continue
                        if params.require_distinct_activities and t1[activity_pos] == t2[activity_pos]:
                            continue
                        pairs.append((diff, t1[id_pos], t2[id_pos]))
                pairs.sort()
                for diff, id1, id2 in pairs:
                    performer = org.lookup(id1)[actor_pos]
                    for mid in range(id1 + 1, id2):
                        detections.append((case_no, diff, performer, org.lookup(mid)[actor_pos]))

        with self._phase("update_result", sink):
            actor_col = org.columns[actor_pos]
            actors = list(log.actors)
            result = Table(
                "resulttable",
                [Column("performer", "VARCHAR", actor_col.length)]
                + [Column(a, "DOUBLE") for a in actors],
                primary_key="performer",
            )
            for actor in actors:
                result.insert([actor] + [0.0] * len(actors))
            col_of = {a: i + 1 for i, a in enumerate(actors)}
            marked: set[tuple[int, int, str, str]] = set()
            for det in detections:
                if det in marked:
                    continue
                marked.add(det)
                _, diff, performer, target = det
                row = result.lookup(performer)
                row[col_of[target]] += params.weight(diff)
            self.tables["resulttable"] = result

        with self._phase("normalize", sink):
            if normal > 0:
                for row in result.rows:
                    for c in range(1, len(row)):
                        row[c] = row[c] / normal
            else:
                for row in result.rows:
                    for c in range(1, len(row)):
                        row[c] = 0.0

        return Sociogram(self._read_matrix(result), log.actors, "sub_contract", normal, params)

    def storage_report(self) -> StorageReport:
        return StorageReport(
            self.name,
            {name: t.data_bytes() + t.index_bytes() for name, t in self.tables.items()},
        )
