"""Edge-list text format and dataset CSV serialization.

Graph format: a required ``class: dag|cpdag|maxpdag|admg`` header, one
edge per line (``A -> B``, ``A -- B``, ``A <-> B``), optional ``node: N``
lines for isolated nodes, and ``#`` comments. CPDAG/maxPDAG inputs are
rejected when an orientation rule still fires (not Meek-closed).
"""

from __future__ import annotations

import re

import numpy as np

from .graph import (ADMG, BIDIRECTED, CPDAG, DAG, DIRECTED, MAXPDAG,
                    UNDIRECTED, Graph, GraphError)
from .meek import first_firing_rule
from .scm import Dataset


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


_CLASS_RE = re.compile(r"^class:\s*(dag|cpdag|maxpdag|admg)$")
_NODE_RE = re.compile(r"^node:\s*(\S+)$")
_EDGE_RE = re.compile(r"^(\S+)\s*(<->|->|--)\s*(\S+)$")


def parse_graph(text: str) -> Graph:
    """Parse and validate a graph from the edge-list format."""
    graph_class: str | None = None
    nodes: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str, str]] = []

    def note(name: str):
        if name not in seen:
            seen.add(name)
            nodes.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CLASS_RE.match(line)
        if m:
            if graph_class is not None:
                raise ParseError("duplicate class header", lineno)
            graph_class = m.group(1)
            continue
        if graph_class is None:
            raise ParseError("a 'class: dag|cpdag|maxpdag|admg' header must "
                             "come before nodes and edges", lineno)
        m = _NODE_RE.match(line)
        if m:
            note(m.group(1))
            continue
        m = _EDGE_RE.match(line)
        if m:
            tail, kind, head = m.groups()
            note(tail)
            note(head)
            edges.append((tail, head, kind))
            continue
        raise ParseError(f"cannot parse {line!r}", lineno)

    if graph_class is None:
        raise ParseError("missing 'class:' header")
    try:
        g = Graph(nodes, edges, graph_class)
    except GraphError as err:
        raise ParseError(str(err)) from err
    if graph_class in (CPDAG, MAXPDAG):
        witness = first_firing_rule(g)
        if witness is not None:
            rule, (tail, head) = witness
            raise ParseError(
                f"not closed under the orientation rules: rule {rule} "
                f"would orient {tail} -> {head}")
    return g


def format_graph(g: Graph) -> str:
    """Serialize a graph; ``parse_graph(format_graph(g)) == g``."""
    lines = [f"class: {g.graph_class}"]
    touched: set[str] = set()
    for a, b, kind in sorted(g.edges):
        touched.update((a, b))
    for n in g.nodes:
        if n not in touched:
            lines.append(f"node: {n}")
    for a, b, kind in sorted(g.edges):
        lines.append(f"{a} {kind} {b}")
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: Graph, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))


def write_dataset_csv(data: Dataset, path: str):
    """Header of node names plus numeric rows at 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(data.columns) + "\n")
        for row in data.values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_dataset_csv(path: str) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ParseError("empty dataset file", 1)
        columns = tuple(name.strip() for name in header.split(","))
        try:
            values = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as err:
            raise ParseError(f"bad numeric row: {err}") from err
    if values.size == 0:
        raise ParseError("dataset has no rows")
    if values.shape[1] != len(columns):
        raise ParseError("row width does not match the header")
    return Dataset(columns, values)
