"""Orientation machinery for partially directed graphs.

Covers the four orientation rules, background-knowledge imposition
(``construct_max_pdag``), conversion of a DAG to the CPDAG of its
equivalence class, consistent extensions, and full enumeration of the DAGs
a CPDAG/maxPDAG represents (used as a test oracle elsewhere).
"""

from __future__ import annotations

from typing import Iterable

from .graph import (CPDAG, DAG, DIRECTED, MAXPDAG, UNDIRECTED, Graph,
                    GraphError, _kahn_order)


class _State:
    """Mutable PDAG scratchpad: parent/child/sibling sets per node."""

    def __init__(self, g: Graph):
        self.nodes = g.nodes
        self.pa = {n: set(g.pa(n)) for n in g.nodes}
        self.ch = {n: set(g.ch(n)) for n in g.nodes}
        self.sib = {n: set(g.sib(n)) for n in g.nodes}

    def adjacent(self, a: str, b: str) -> bool:
        return b in self.pa[a] or b in self.ch[a] or b in self.sib[a]

    def orient(self, tail: str, head: str):
        self.sib[tail].discard(head)
        self.sib[head].discard(tail)
        self.ch[tail].add(head)
        self.pa[head].add(tail)

    def undirected_pairs(self) -> list[tuple[str, str]]:
        return sorted((a, b) for a in self.nodes for b in self.sib[a] if a < b)

    def to_graph(self, graph_class: str, validate: bool = True) -> Graph:
        edges = [(a, b, DIRECTED) for a in self.nodes for b in self.ch[a]]
        edges += [(a, b, UNDIRECTED) for a, b in self.undirected_pairs()]
        return Graph(self.nodes, edges, graph_class, validate=validate)

    def acyclic(self) -> bool:
        try:
            _kahn_order(self.nodes, self.pa, self.ch)
            return True
        except GraphError:
            return False


def _rule_orients(state: _State, b: str, c: str) -> int | None:
    """Return the first rule number that forces b -> c, else None."""
    # Rule 1: a -> b - c with a, c non-adjacent.
    for a in state.pa[b]:
        if not state.adjacent(a, c):
            return 1
    # Rule 2: b -> w -> c with b - c.
    if state.ch[b] & state.pa[c]:
        return 2
    # Rule 3: b - w1, b - w2, w1 -> c <- w2 with w1, w2 non-adjacent.
    candidates = sorted(state.sib[b] & state.pa[c])
    for i, w1 in enumerate(candidates):
        for w2 in candidates[i + 1:]:
            if not state.adjacent(w1, w2):
                return 3
    # Rule 4: a - b, b - w, a -> w -> c with a, c non-adjacent.
    for w in state.sib[b] & state.pa[c]:
        for a in state.pa[w] & state.sib[b]:
            if not state.adjacent(a, c):
                return 4
    return None


def _close(state: _State):
    """Apply rules 1-4 cyclically until a full pass adds nothing."""
    changed = True
    while changed:
        changed = False
        for a, b in state.undirected_pairs():
            if b not in state.sib[a]:
                continue  # oriented earlier in this pass
            if _rule_orients(state, a, b) is not None:
                state.orient(a, b)
                changed = True
            elif _rule_orients(state, b, a) is not None:
                state.orient(b, a)
                changed = True


def first_firing_rule(g: Graph) -> tuple[int, tuple[str, str]] | None:
    """Witness that a graph is not closed: (rule number, edge it orients)."""
    state = _State(g)
    for a, b in state.undirected_pairs():
        rule = _rule_orients(state, a, b)
        if rule is not None:
            return rule, (a, b)
        rule = _rule_orients(state, b, a)
        if rule is not None:
            return rule, (b, a)
    return None


def v_structures(g: Graph | _State) -> frozenset[tuple[str, str, str]]:
    """Canonical (low, collider, high) triples with non-adjacent parents."""
    state = g if isinstance(g, _State) else _State(g)
    out = set()
    for b in state.nodes:
        ps = sorted(state.pa[b])
        for i, a in enumerate(ps):
            for c in ps[i + 1:]:
                if not state.adjacent(a, c):
                    out.add((a, b, c))
    return frozenset(out)


def close_under_meek(g: Graph) -> Graph:
    """Close a PDAG under the orientation rules.

    Raises :class:`GraphError` when closure breaks the input (directed
    cycle or new v-structure), which signals an inconsistent graph.
    """
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("close_under_meek expects a cpdag or maxpdag")
    before = v_structures(g)
    state = _State(g)
    _close(state)
    if not state.acyclic():
        raise GraphError("orientation rules produced a directed cycle")
    if v_structures(state) != before:
        raise GraphError("orientation rules produced a new v-structure")
    return state.to_graph(g.graph_class)


def construct_max_pdag(g: Graph, background: Iterable[tuple[str, str]]) -> Graph | None:
    """Impose required orientations and close under the rules.

    Returns the resulting maxPDAG, or ``None`` (FAIL) when the requested
    orientations are incompatible with ``g`` — they contradict an existing
    orientation, create a directed cycle or a new v-structure, or leave a
    graph with no consistent DAG extension.
    """
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("construct_max_pdag expects a cpdag or maxpdag")
    bg = list(background)
    g.check_nodes([n for e in bg for n in e])
    asked = set(bg)
    for tail, head in asked:
        if (head, tail) in asked:
            raise GraphError(f"background asks for both orientations of {tail!r}-{head!r}")
        if not g.adjacent(tail, head):
            raise GraphError(f"background references missing edge {tail!r}-{head!r}")

    state = _State(g)
    for tail, head in bg:
        if head in state.ch[tail]:
            continue  # already oriented as requested
        if head in state.pa[tail]:
            return None  # contradicts an existing orientation
        state.orient(tail, head)
    _close(state)
    if not state.acyclic():
        return None
    if v_structures(state) != v_structures(g):
        return None
    if _dor_tarsi(state) is None:
        return None
    return state.to_graph(MAXPDAG)


def _dor_tarsi(state: _State) -> dict[tuple[str, str], bool] | None:
    """Find a consistent DAG extension; None when none exists.

    Repeatedly removes a node that is a sink in the directed part and whose
    undirected neighbours are adjacent to all its other neighbours, orienting
    its undirected edges inward.
    """
    remaining = set(state.nodes)
    pa = {n: set(state.pa[n]) for n in state.nodes}
    ch = {n: set(state.ch[n]) for n in state.nodes}
    sib = {n: set(state.sib[n]) for n in state.nodes}
    oriented: dict[tuple[str, str], bool] = {}
    while remaining:
        progress = False
        for v in sorted(remaining):
            if ch[v] & remaining:
                continue
            und = sib[v] & remaining
            nbhd = (pa[v] | und) & remaining
            if all(state.adjacent(w, u) for w in und for u in nbhd if u != w):
                for w in und:
                    oriented[(w, v)] = True
                remaining.discard(v)
                progress = True
        if not progress:
            return None
    return oriented


def consistent_extension(g: Graph) -> Graph:
    """One DAG represented by a CPDAG/maxPDAG (identity on DAG input).

    Deterministic: each remaining undirected edge is oriented away from its
    lexicographically smaller endpoint whenever that direction is
    compatible, re-closing under the rules after every choice.
    """
    if g.graph_class == DAG:
        return g
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("consistent_extension expects a dag, cpdag or maxpdag")
    current = g
    while True:
        und = sorted(current.undirected_edges())
        if not und:
            break
        a, b = und[0]
        nxt = construct_max_pdag(current, [(a, b)])
        if nxt is None:
            nxt = construct_max_pdag(current, [(b, a)])
        if nxt is None:
            raise GraphError("input graph has no consistent DAG extension")
        current = nxt
    return Graph(current.nodes, [(a, b, DIRECTED) for a, b in current.directed_edges()], DAG)


_ENUM_EDGE_LIMIT = 20


def enumerate_class_dags(g: Graph) -> list[Graph]:
    """All DAGs represented by a CPDAG/maxPDAG, in a stable order."""
    if g.graph_class == DAG:
        return [g]
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("enumerate_class_dags expects a dag, cpdag or maxpdag")
    if len(g.undirected_edges()) > _ENUM_EDGE_LIMIT:
        raise GraphError(
            f"refusing to enumerate with more than {_ENUM_EDGE_LIMIT} undirected edges")
    out: list[Graph] = []

    def descend(cur: Graph):
        und = sorted(cur.undirected_edges())
        if not und:
            out.append(Graph(cur.nodes,
                             [(a, b, DIRECTED) for a, b in cur.directed_edges()], DAG))
            return
        a, b = und[0]
        for tail, head in ((a, b), (b, a)):
            nxt = construct_max_pdag(cur, [(tail, head)])
            if nxt is not None:
                descend(nxt)

    descend(g)
    out.sort(key=lambda d: tuple(sorted(d.directed_edges())))
    return out


def dag_in_class(g: Graph, d: Graph) -> bool:
    """Is the DAG ``d`` one of the DAGs represented by ``g``?"""
    if d.graph_class != DAG:
        raise GraphError("dag_in_class expects a dag as second argument")
    if g.graph_class == DAG:
        return g == d
    if set(g.nodes) != set(d.nodes):
        return False
    skeleton = lambda gr: ({(min(a, b), max(a, b)) for a, b in gr.directed_edges()}
                           | set(gr.undirected_edges()))
    if skeleton(g) != skeleton(d):
        return False
    if not g.directed_edges() <= d.directed_edges():
        return False
    background = [(a, b) if (a, b) in d.directed_edges() else (b, a)
                  for a, b in g.undirected_edges()]
    oriented = construct_max_pdag(g, background)
    return oriented is not None and oriented.directed_edges() == d.directed_edges()


def dag_to_cpdag(d: Graph) -> Graph:
    """CPDAG of the Markov equivalence class of a DAG.

    Uses compelled-edge labelling: edges are processed in the classical
    order (by head position ascending, tail position descending within a
    head) and labelled compelled or reversible in blocks per head node.
    """
    if d.graph_class != DAG:
        raise GraphError("dag_to_cpdag expects a dag")
    pos = _topo_positions(d)
    edge_order = sorted(d.directed_edges(), key=lambda e: (pos[e[1]], -pos[e[0]]))
    label: dict[tuple[str, str], str | None] = {e: None for e in edge_order}
    pa = {n: d.pa(n) for n in d.nodes}

    for x, y in edge_order:
        if label[(x, y)] is not None:
            continue
        done = False
        for w in sorted(pa[x]):
            if label[(w, x)] != "compelled":
                continue
            if w not in pa[y]:
                for p in pa[y]:
                    if label[(p, y)] is None:
                        label[(p, y)] = "compelled"
                done = True
                break
            label[(w, y)] = "compelled"
        if done:
            continue
        if any(z != x and z not in pa[x] for z in pa[y]):
            verdict = "compelled"
        else:
            verdict = "reversible"
        for p in pa[y]:
            if label[(p, y)] is None:
                label[(p, y)] = verdict

    edges = [(a, b, DIRECTED if label[(a, b)] == "compelled" else UNDIRECTED)
             for a, b in edge_order]
    return Graph(d.nodes, edges, CPDAG)


def _topo_positions(d: Graph) -> dict[str, int]:
    order = _kahn_order(sorted(d.nodes), {n: d.pa(n) for n in d.nodes},
                        {n: d.ch(n) for n in d.nodes})
    return {n: i for i, n in enumerate(order)}
