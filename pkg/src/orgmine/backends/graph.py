"""In-process property graph with index-free adjacency.

Every node holds direct references to its outgoing and incoming relationships,
so traversals never consult an index or join. The only index is the
uniqueness constraint used by MERGE on ``(label, key)``.

Storage accounting: 15 bytes per node, 33 bytes per relationship and 41 bytes
per property (node and relationship properties alike).
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from ..event_log import EventLog
from ..metrics import Sociogram, SubContractParams
from .base import Engine, PhaseTiming, StorageReport

NODE_BYTES = 15
RELATIONSHIP_BYTES = 33
PROPERTY_BYTES = 41


class Node:
    __slots__ = ("id", "label", "props", "out", "inc")

    def __init__(self, node_id: int, label: str, props: dict[str, Any]) -> None:
        self.id = node_id
        self.label = label
        self.props = props
        self.out: list[Relationship] = []
        self.inc: list[Relationship] = []

    def __repr__(self) -> str:
        return f"({self.label}#{self.id} {self.props})"


class Relationship:
    __slots__ = ("id", "type", "start", "end", "props")

    def __init__(self, rel_id: int, rel_type: str, start: Node, end: Node, props: dict[str, Any]) -> None:
        self.id = rel_id
        self.type = rel_type
        self.start = start
        self.end = end
        self.props = props

    def other(self, node: Node) -> Node:
        return self.end if self.start is node else self.start


class GraphStore:
    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.rels: dict[int, Relationship] = {}
        self._unique: dict[tuple[str, str], dict[Any, Node]] = {}
        self._next_node = 0
        self._next_rel = 0

    def create_node(self, label: str, **props: Any) -> Node:
        node = Node(self._next_node, label, props)
        self._next_node += 1
        self.nodes[node.id] = node
        return node

    def merge_node(self, label: str, key: str, value: Any, **on_create: Any) -> Node:
        index = self._unique.setdefault((label, key), {})
        node = index.get(value)
        if node is None:
            node = self.create_node(label, **{key: value}, **on_create)
            index[value] = node
        return node

    def nodes_with_label(self, label: str) -> list[Node]:
        return [n for n in self.nodes.values() if n.label == label]

    def create_rel(self, rel_type: str, start: Node, end: Node, **props: Any) -> Relationship:
        rel = Relationship(self._next_rel, rel_type, start, end, props)
        self._next_rel += 1
        self.rels[rel.id] = rel
        start.out.append(rel)
        if end is not start:
            end.inc.append(rel)
        else:
            start.inc.append(rel)
        return rel

    def find_rel(
        self, start: Node, rel_type: str, end: Node, directed: bool = True, **match: Any
    ) -> Relationship | None:
        """Scan ``start``'s adjacency for a matching relationship."""
        candidates = start.out if directed else start.out + start.inc
        for rel in candidates:
            if rel.type != rel_type or rel.other(start) is not end:
                continue
            if directed and rel.start is not start:
                continue
            if all(rel.props.get(k) == v for k, v in match.items()):
                return rel
        return None

    def merge_rel(
        self, start: Node, rel_type: str, end: Node, directed: bool = True, **match: Any
    ) -> tuple[Relationship, bool]:
        rel = self.find_rel(start, rel_type, end, directed, **match)
        if rel is not None:
            return rel, False
        return self.create_rel(rel_type, start, end, **match), True

    def delete_rels(self, rel_type: str) -> None:
        doomed = [r for r in self.rels.values() if r.type == rel_type]
        if not doomed:
            return
        touched: set[int] = set()
        for rel in doomed:
            del self.rels[rel.id]
            touched.add(rel.start.id)
            touched.add(rel.end.id)
        for node_id in touched:
            node = self.nodes[node_id]
            node.out = [r for r in node.out if r.type != rel_type]
            node.inc = [r for r in node.inc if r.type != rel_type]

    def delete_nodes(self, label: str) -> None:
        """DETACH DELETE every node with ``label``."""
        for node in [n for n in self.nodes.values() if n.label == label]:
            for rel in node.out + node.inc:
                if rel.id in self.rels:
                    del self.rels[rel.id]
                    other = rel.other(node)
                    other.out = [r for r in other.out if r is not rel]
                    other.inc = [r for r in other.inc if r is not rel]
            del self.nodes[node.id]
        for (lbl, key) in list(self._unique):
            if lbl == label:
                del self._unique[(lbl, key)]

    def property_count(self) -> int:
        return sum(len(n.props) for n in self.nodes.values()) + sum(
            len(r.props) for r in self.rels.values()
        )


class GraphEngine(Engine):
    """Similar mode: unique Actor/Activity nodes joined by PERFORMS{times}.

    Sub-contract mode: unique Case nodes with a running OccID counter, one
    Person node per event (name, OccID, activity) reached via CONTAINS.
    """

    name = "graph"

    def _reset(self) -> None:
        self.store = GraphStore()

    def _load(self, log: EventLog) -> None:
        store = self.store
        for ev in log.events:
            if self.has_similar:
                actor = store.merge_node("Actor", "name", ev.actor)
                activity = store.merge_node("Activity", "name", ev.activity)
                rel, created = store.merge_rel(actor, "PERFORMS", activity)
                rel.props["times"] = rel.props.get("times", 0) + 1
            if self.has_subcontract:
                case = store.merge_node("Case", "name", ev.case_id, occ=0)
                person = store.create_node(
                    "Person", name=ev.actor, OccID=case.props["occ"], activity=ev.activity
                )
                case.props["occ"] += 1
                store.create_rel("CONTAINS", case, person)

    # -- Similar-Task --------------------------------------------------------

    @staticmethod
    def _performs(node: Node) -> list[Relationship]:
        return [r for r in node.out if r.type == "PERFORMS"]

    def _similar_task(self, sink: list[PhaseTiming]) -> Sociogram:
        log = self.log
        assert log is not None
        store = self.store
        actors = list(store.nodes_with_label("Actor"))

        with self._phase("compute_similarity", sink):
            norms: dict[int, float] = {}
            for a in actors:
                norms[a.id] = math.sqrt(sum(r.props["times"] ** 2 for r in self._performs(a)))
            found = []
            for p1 in actors:
                # (p1)-[x:PERFORMS]->(m:Activity)<-[y:PERFORMS]-(p2)
                dots: dict[int, tuple[Node, int]] = {}
                for x in self._performs(p1):
                    for y in x.end.inc:
                        if y.type != "PERFORMS":
                            continue
                        p2 = y.start
                        if p2.id <= p1.id:
                            continue
                        prev = dots.get(p2.id)
                        acc = prev[1] if prev else 0
                        dots[p2.id] = (p2, acc + x.props["times"] * y.props["times"])
                for p2, dot in dots.values():
                    denom = norms[p1.id] * norms[p2.id]
                    found.append((p1, p2, dot / denom if denom > 0 else 0.0))

        with self._phase("write_result", sink):
            for p1, p2, value in found:
                rel, _ = store.merge_rel(p1, "SIMILARITY", p2, directed=False)
                rel.props["similarity"] = value

        n = len(log.actors)
        values = np.zeros((n, n), dtype=np.float64)
        for rel in store.rels.values():
            if rel.type == "SIMILARITY":
                i = log.actor_id(rel.start.props["name"])
                j = log.actor_id(rel.end.props["name"])
                values[i, j] = values[j, i] = rel.props["similarity"]
        return Sociogram(values, log.actors, "similar_task")

    # -- Sub-Contract --------------------------------------------------------

    @staticmethod
    def _persons(case: Node) -> list[Node]:
        persons = [r.end for r in case.out if r.type == "CONTAINS"]
        for occ, person in enumerate(persons):
            if person.props["OccID"] != occ:
                raise AssertionError(f"case {case.props['name']}: OccID order broken at {occ}")
        return persons

    def _sub_contract(self, params: SubContractParams, sink: list[PhaseTiming]) -> Sociogram:
        log = self.log
        assert log is not None
        store = self.store
        # derived elements from any earlier build
        store.delete_rels("RELATED_TO")
        store.delete_nodes("UniqueActor")
        cases = list(store.nodes_with_label("Case"))

        with self._phase("update_normal", sink):
            normal = 0.0
            for case in cases:
                size = sum(1 for r in case.out if r.type == "CONTAINS")
                for k in params.k_range(size):
                    normal += params.weight(k)

        with self._phase("detection", sink):
            for case in cases:
                persons = self._persons(case)
                ks = params.k_range(len(persons))
                if not ks:
                    continue
                kmax = ks[-1]
                by_name: dict[str, list[Node]] = {}
                for p in persons:
                    by_name.setdefault(p.props["name"], []).append(p)
                for same in by_name.values():
                    for a, first in enumerate(same):
                        for second in same[a + 1:]:
                            gap = second.props["OccID"] - first.props["OccID"]
                            if gap > kmax:
                                break
                            if gap < 2:
                                continue
                            if (params.require_distinct_activities
                                    and first.props["activity"] == second.props["activity"]):
                                continue
                            # RANGE(start.OccID + 1, end.OccID - 1)
                            for occ in range(first.props["OccID"] + 1, second.props["OccID"]):
                                store.merge_rel(first, "RELATED_TO", persons[occ], value=1, length=gap)

        with self._phase("update_result", sink):
            for person in store.nodes_with_label("Person"):
                store.merge_node("UniqueActor", "name", person.props["name"])
            for case in cases:
                # (n)-[:CONTAINS]->()-[r:RELATED_TO]->()<-[:CONTAINS]-(n), one mark per (length, pair)
                marked: dict[tuple[int, str, str], int] = {}
                for person in self._persons(case):
                    for r in person.out:
                        if r.type == "RELATED_TO":
                            key = (r.props["length"], r.start.props["name"], r.end.props["name"])
                            marked.setdefault(key, r.props["value"])
                for (length, source, target), value in marked.items():
                    p = store.merge_node("UniqueActor", "name", source)
                    q = store.merge_node("UniqueActor", "name", target)
                    rf, _ = store.merge_rel(p, "SUBCONTRACT", q)
                    rf.props["strength"] = rf.props.get("strength", 0.0) + params.weight(length) * value

        with self._phase("normalize", sink):
            for rel in store.rels.values():
                if rel.type == "SUBCONTRACT":
                    rel.props["strength"] = rel.props["strength"] / normal if normal > 0 else 0.0

        n = len(log.actors)
        values = np.zeros((n, n), dtype=np.float64)
        for rel in store.rels.values():
            if rel.type == "SUBCONTRACT":
                i = log.actor_id(rel.start.props["name"])
                j = log.actor_id(rel.end.props["name"])
                values[i, j] = rel.props["strength"]
        return Sociogram(values, log.actors, "sub_contract", normal, params)

    def storage_report(self) -> StorageReport:
        store = self.store
        return StorageReport(
            self.name,
            {
                "nodes": NODE_BYTES * len(store.nodes),
                "relationships": RELATIONSHIP_BYTES * len(store.rels),
                "properties": PROPERTY_BYTES * store.property_count(),
            },
        )
