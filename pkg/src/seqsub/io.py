"""Reading and writing hypergraph files.

JSON layout::

    {
      "schema_version": 1,
      "n": 3,
      "utility": "modular" | "coverage",
      "labels": ["F", "T", "R"],          # optional, one name per vertex
      "edges": [{"vertices": [0, 1], "value": 1.0}, ...],
      "meta": {...}                        # optional, free-form
    }

CSV layout: one edge per row, ``vertices,value`` where vertices are
semicolon-separated ids (``0;1;2,0.25``).  A header row is optional and
``n`` is one more than the largest vertex id.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError
from .hypergraph import DirectedHypergraph
from .utility import UTILITY_KINDS, UtilityFunction, make_utility

SCHEMA_VERSION = 1


@dataclass
class HypergraphFile:
    graph: DirectedHypergraph
    utility: str = "coverage"
    labels: list[str] | None = None
    meta: dict = field(default_factory=dict)

    def make_utility(self) -> UtilityFunction:
        return make_utility(self.utility, self.graph)


def to_json_dict(hf: HypergraphFile) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "n": hf.graph.n,
        "utility": hf.utility,
        "edges": [{"vertices": list(e.vertices), "value": e.value} for e in hf.graph.edges],
    }
    if hf.labels is not None:
        d["labels"] = list(hf.labels)
    if hf.meta:
        d["meta"] = hf.meta
    return d


def from_json_dict(d: dict) -> HypergraphFile:
    if not isinstance(d, dict):
        raise InputError("hypergraph JSON must be an object")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version}")
    try:
        n = int(d["n"])
        raw = d["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"hypergraph JSON needs integer 'n' and list 'edges': {exc}") from None
    utility = d.get("utility", "coverage")
    if utility not in UTILITY_KINDS:
        raise InputError(f"unknown utility {utility!r}")
    edges = []
    for i, item in enumerate(raw):
        try:
            edges.append((item["vertices"], item.get("value", 1.0)))
        except (KeyError, TypeError, AttributeError):
            raise InputError(f"edge {i} must be an object with 'vertices'") from None
    labels = d.get("labels")
    if labels is not None and len(labels) != n:
        raise InputError(f"{len(labels)} labels for {n} vertices")
    return HypergraphFile(DirectedHypergraph(n, edges), utility, labels, d.get("meta", {}))


def write_json(path, hf: HypergraphFile) -> None:
    text = json.dumps(to_json_dict(hf), indent=1, sort_keys=True)
    Path(path).write_text(text + "\n")


def read_json(path) -> HypergraphFile:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    return from_json_dict(d)


def read_csv(path, utility: str = "coverage") -> HypergraphFile:
    edges = []
    top = -1
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() == "vertices":
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 'vertices,value'")
            try:
                verts = [int(x) for x in row[0].split(";")]
                value = float(row[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: cannot parse {row!r}") from None
            edges.append((verts, value))
            top = max(top, *verts)
    return HypergraphFile(DirectedHypergraph(top + 1, edges), utility)


def write_csv(path, H: DirectedHypergraph) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertices", "value"])
        for e in H.edges:
            w.writerow([";".join(map(str, e.vertices)), repr(e.value)])


def load(path, utility: str | None = None) -> HypergraphFile:
    """Read JSON or CSV by file suffix."""
    if str(path).lower().endswith(".csv"):
        return read_csv(path, utility or "coverage")
    hf = read_json(path)
    if utility is not None:
        hf.utility = utility
    return hf
