"""Built-in example graphs with their treatment/outcome roles.

The SSQ graph encodes the twelve-symptom questionnaire DAG; the FIG3-*
family are small worked DAG examples with known projections; FIG4-CPDAG is
the seven-node CPDAG used to illustrate enumeration over sibling subsets,
with FIG4-B..FIG4-F its five compatible orientations of the neighbourhood
of X.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import CPDAG, DAG, DIRECTED, MAXPDAG, UNDIRECTED, Graph


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: Graph
    x: frozenset[str]
    y: frozenset[str]


def _dag(nodes, arrows):
    return Graph(nodes, [(a, b, DIRECTED) for a, b in arrows], DAG)


SSQ_NODES = ("AFF", "AIS", "ALN", "APA", "CDR", "DET", "EGC", "FTW",
             "HOS", "PER", "SAN", "SUS")

SSQ_ARROWS = (
    ("ALN", "DET"), ("AFF", "ALN"), ("SAN", "AFF"), ("SAN", "AIS"),
    ("SAN", "APA"), ("SAN", "ALN"), ("SAN", "CDR"), ("CDR", "DET"),
    ("AFF", "APA"), ("AIS", "AFF"), ("AFF", "CDR"), ("ALN", "APA"),
    ("ALN", "PER"), ("ALN", "SUS"), ("ALN", "FTW"), ("AIS", "SUS"),
    ("AIS", "EGC"), ("SUS", "HOS"), ("EGC", "HOS"), ("FTW", "EGC"),
    ("SUS", "EGC"), ("PER", "DET"), ("SUS", "FTW"), ("FTW", "DET"),
)


def _fig4_panel(directed_at_x, extra_directed, still_undirected):
    """One orientation of the FIG4 neighbourhood plus its Meek consequences."""
    nodes = ("X", "V1", "V2", "V3", "V4", "V5", "Y")
    base_directed = [("V2", "Y"), ("V3", "Y"), ("V5", "Y")]
    edges = [(a, b, DIRECTED) for a, b in base_directed + directed_at_x + extra_directed]
    edges += [(a, b, UNDIRECTED) for a, b in still_undirected]
    return Graph(nodes, edges, MAXPDAG)


def _build() -> dict[str, Fixture]:
    reg: dict[str, Fixture] = {}

    def add(name, graph, x, y):
        reg[name] = Fixture(name, graph, frozenset(x), frozenset(y))

    add("SSQ-DAG", _dag(SSQ_NODES, SSQ_ARROWS), {"ALN"}, {"DET"})

    add("FIG3-A",
        _dag(("V1", "X", "V2", "Y"),
             [("V1", "X"), ("V2", "X"), ("V2", "Y"), ("X", "Y")]),
        {"X"}, {"Y"})
    add("FIG3-B",
        _dag(("X1", "V1", "V2", "Y", "X2"),
             [("X1", "V1"), ("V2", "V1"), ("V2", "Y"), ("Y", "X2")]),
        {"X1", "X2"}, {"Y"})
    add("FIG3-C",
        _dag(("V1", "X", "V2", "V3", "V4", "Y"),
             [("V1", "X"), ("V2", "X"), ("V2", "V3"), ("V4", "Y"),
              ("X", "V3"), ("V3", "Y")]),
        {"X"}, {"Y"})
    add("FIG3-D",
        _dag(("V1", "X", "V2", "V3", "V4", "V5", "V6", "V7", "Y", "V8"),
             [("V1", "X"), ("V2", "X"), ("X", "V3"), ("V2", "Y"),
              ("V4", "V5"), ("V5", "V6"), ("V7", "Y"), ("Y", "V8"),
              ("X", "V5"), ("V5", "Y")]),
        {"X"}, {"Y"})
    add("FIG3-E",
        _dag(("X", "VE", "Y1", "Y2"),
             [("X", "VE"), ("VE", "Y1"), ("VE", "Y2")]),
        {"X"}, {"Y1", "Y2"})
    add("FIG3-F",
        _dag(("V1", "X1", "V2", "X2", "Y"),
             [("V1", "X1"), ("V1", "V2"), ("X1", "V2"), ("V2", "X2"),
              ("X2", "Y"), ("X1", "X2"), ("V2", "Y")]),
        {"X1", "X2"}, {"Y"})

    fig4_nodes = ("X", "V1", "V2", "V3", "V4", "V5", "Y")
    fig4_und = [("X", "V1"), ("X", "V4"), ("X", "V3"), ("V1", "V2"),
                ("V1", "V3"), ("V2", "V3"), ("V3", "V5")]
    fig4_dir = [("V2", "Y"), ("V3", "Y"), ("V5", "Y")]
    add("FIG4-CPDAG",
        Graph(fig4_nodes,
              [(a, b, UNDIRECTED) for a, b in fig4_und]
              + [(a, b, DIRECTED) for a, b in fig4_dir],
              CPDAG),
        {"X"}, {"Y"})

    # The five compatible orientations of the edges at X (panels b-f).
    add("FIG4-B",
        _fig4_panel([("V1", "X"), ("X", "V3"), ("X", "V4")],
                    [("V1", "V2"), ("V1", "V3"), ("V3", "V2"), ("V3", "V5")],
                    []),
        {"X"}, {"Y"})
    add("FIG4-C",
        _fig4_panel([("V1", "X"), ("V3", "X"), ("X", "V4")],
                    [],
                    [("V1", "V2"), ("V1", "V3"), ("V2", "V3"), ("V3", "V5")]),
        {"X"}, {"Y"})
    add("FIG4-D",
        _fig4_panel([("X", "V1"), ("V4", "X"), ("X", "V3")],
                    [("V1", "V2"), ("V3", "V2"), ("V3", "V5")],
                    [("V1", "V3")]),
        {"X"}, {"Y"})
    add("FIG4-E",
        _fig4_panel([("X", "V1"), ("X", "V4"), ("X", "V3")],
                    [("V1", "V2"), ("V3", "V2"), ("V3", "V5")],
                    [("V1", "V3")]),
        {"X"}, {"Y"})
    add("FIG4-F",
        _fig4_panel([("X", "V1"), ("X", "V4"), ("V3", "X")],
                    [("V1", "V2"), ("V3", "V1"), ("V3", "V2")],
                    [("V3", "V5")]),
        {"X"}, {"Y"})
    return reg


_FIXTURES = _build()

FIXTURE_NAMES = tuple(sorted(_FIXTURES))


def get_fixture(name: str) -> Fixture:
    try:
        return _FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
