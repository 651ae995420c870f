"""Sociogram serialization: CSV matrix, JSON nested map, Graphviz DOT."""

from __future__ import annotations

import csv
import io
import json
from typing import Literal

import numpy as np

from .metrics import Sociogram, SubContractParams

Format = Literal["csv", "json", "dot"]
FORMATS: tuple[Format, ...] = ("csv", "json", "dot")


def _header_lines(s: Sociogram) -> list[str]:
    lines = [f"kind={s.kind}"]
    if s.params is not None:
        p = s.params
        lines.append(
            f"beta={p.beta} depth={p.depth} "
            f"require_distinct_activities={str(p.require_distinct_activities).lower()}"
        )
        if p.loop_bounds != "exclusive":
            lines.append(f"loop_bounds={p.loop_bounds}")
        lines.append(f"normalizer={s.normalizer!r}")
    return lines


def to_csv(s: Sociogram) -> bytes:
    """Matrix with an actor header row and column, six decimal places."""
    buf = io.StringIO(newline="")
    for line in _header_lines(s):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(s.actors))
    for i, actor in enumerate(s.actors):
        writer.writerow([actor] + [f"{float(v):.6f}" for v in s.values[i]])
    return buf.getvalue().encode("utf-8")


def read_csv_matrix(data: bytes) -> dict[str, dict[str, float]]:
    lines = [ln for ln in data.decode("utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    header = rows[0][1:]
    return {row[0]: {a: float(v) for a, v in zip(header, row[1:])} for row in rows[1:]}


def to_json(s: Sociogram) -> bytes:
    doc: dict[str, object] = {
        "kind": s.kind,
        "actors": list(s.actors),
        "values": {
            a: {b: float(s.values[i, j]) for j, b in enumerate(s.actors)}
            for i, a in enumerate(s.actors)
        },
    }
    if s.params is not None:
        doc["params"] = s.params.as_dict()
        doc["normalizer"] = s.normalizer
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def from_json(data: bytes) -> Sociogram:
    doc = json.loads(data)
    actors = tuple(doc["actors"])
    values = np.array([[doc["values"][a][b] for b in actors] for a in actors], dtype=np.float64)
    values = values.reshape(len(actors), len(actors))
    params = SubContractParams(**doc["params"]) if "params" in doc else None
    return Sociogram(values, actors, doc["kind"], doc.get("normalizer", 0.0), params)


def _dot_id(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def to_dot(s: Sociogram) -> bytes:
    """Weighted graph: every actor as a node, edges only where the value is > 0."""
    directed = s.directed
    lines = [f"// {line}" for line in _header_lines(s)]
    lines.append(("digraph" if directed else "graph") + f" {s.kind} {{")
    for actor in s.actors:
        lines.append(f"  {_dot_id(actor)};")
    arrow = "->" if directed else "--"
    for a, b, v in s.edges():
        lines.append(f'  {_dot_id(a)} {arrow} {_dot_id(b)} [label="{v:.6f}", weight={v!r}];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def render(s: Sociogram, fmt: Format) -> bytes:
    if fmt == "csv":
        return to_csv(s)
    if fmt == "json":
        return to_json(s)
    if fmt == "dot":
        return to_dot(s)
    raise ValueError(f"unknown format {fmt!r}")
