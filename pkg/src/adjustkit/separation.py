"""Blocking of definite-status paths and d-/m-separation queries.

DAGs and ADMGs (where every path has definite status) use a linear-time
reachability sweep over (node, arrival-mark) states. CPDAGs and maxPDAGs
fall back to exhaustive enumeration of definite-status paths, which the
reachability answer is also cross-checked against in the test suite.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .graph import (ADMG, DAG, Graph, GraphError, Path, STEP_BACKWARD,
                    STEP_BIDIRECTED, STEP_FORWARD, STEP_UNDIRECTED, ancestors,
                    is_definite_status, is_possibly_causal)

_ENUM_NODE_LIMIT = 24


def is_blocked(g: Graph, p: Path, c: Iterable[str]) -> bool:
    """Blocking of one definite-status path by a conditioning set.

    True iff the path contains a non-collider in ``c`` or a collider
    outside ``an(c, g)``.
    """
    c = frozenset(c)
    g.check_nodes(c)
    if not is_definite_status(g, p):
        raise GraphError("blocking is defined for definite-status paths only")
    anc_c = ancestors(g, c) if c else frozenset()
    for i in range(1, len(p.nodes) - 1):
        v = p.nodes[i]
        if _is_collider(p, i):
            if v not in anc_c:
                return True
        elif v in c:
            return True
    return False


def _is_collider(p: Path, i: int) -> bool:
    head_left = p.steps[i - 1] in (STEP_FORWARD, STEP_BIDIRECTED)
    head_right = p.steps[i] in (STEP_BACKWARD, STEP_BIDIRECTED)
    return head_left and head_right


def separated(g: Graph, a: Iterable[str], b: Iterable[str],
              c: Iterable[str] = ()) -> bool:
    """d-/m-separation of ``a`` and ``b`` given ``c``.

    True iff every definite-status path between the two sets is blocked.
    """
    a, b, c = _query_sets(g, a, b, c)
    if not a or not b:
        return True
    if g.graph_class in (DAG, ADMG) or not g.undirected_edges():
        return not _reachable(g, a, b, c)
    return connecting_path(g, a, b, c) is None


def connecting_path(g: Graph, a: Iterable[str], b: Iterable[str],
                    c: Iterable[str] = ()) -> Path | None:
    """One open definite-status path between ``a`` and ``b``, if any."""
    a, b, c = _query_sets(g, a, b, c)
    if len(g.nodes) > _ENUM_NODE_LIMIT:
        raise GraphError(
            f"witness search enumerates paths; capped at {_ENUM_NODE_LIMIT} nodes")
    for path in open_paths(g, a, b, c):
        return path
    return None


def _query_sets(g, a, b, c):
    a, b, c = frozenset(a), frozenset(b), frozenset(c)
    for s in (a, b, c):
        g.check_nodes(s)
    if a & b or a & c or b & c:
        raise GraphError("separation query sets must be pairwise disjoint")
    return a, b, c


# -- reachability over arrival marks (DAG / ADMG) ------------------------------

_HEAD, _TAIL = True, False


def _incident(g: Graph, v: str) -> Iterator[tuple[str, bool, str]]:
    """Edges at v as (other endpoint, mark at the other endpoint, step kind)."""
    for w in g.ch(v):
        yield w, _HEAD, STEP_FORWARD
    for w in g.pa(v):
        yield w, _TAIL, STEP_BACKWARD
    for w in g.spouses(v):
        yield w, _HEAD, STEP_BIDIRECTED
    for w in g.sib(v):
        yield w, _TAIL, STEP_UNDIRECTED


def _reachable(g: Graph, a: frozenset[str], b: frozenset[str],
               c: frozenset[str]) -> bool:
    """Does an open path from a to b given c exist? (all paths definite)."""
    anc_c = ancestors(g, c) if c else frozenset()
    seen: set[tuple[str, bool]] = set()
    stack: list[tuple[str, bool]] = []
    for x in a:
        for w, mark, _ in _incident(g, x):
            if w in b:
                return True
            if (w, mark) not in seen:
                seen.add((w, mark))
                stack.append((w, mark))
    while stack:
        v, mark_in = stack.pop()
        if v in a:
            continue
        for w, mark_w, step in _incident(g, v):
            head_out = step in (STEP_BACKWARD, STEP_BIDIRECTED)
            if mark_in == _HEAD and head_out:
                if v not in anc_c:
                    continue  # closed collider
            elif v in c:
                continue  # conditioned non-collider
            if w in b:
                return True
            if (w, mark_w) not in seen:
                seen.add((w, mark_w))
                stack.append((w, mark_w))
    return False


# -- exhaustive enumeration (small graphs, PDAG classes, witnesses) ------------

def open_paths(g: Graph, a: frozenset[str], b: frozenset[str],
               c: frozenset[str]) -> Iterator[Path]:
    """All open definite-status paths from ``a`` to ``b`` given ``c``.

    Prefixes are pruned as soon as an interior node fails to be a definite
    collider/non-collider or violates the blocking conditions, so every
    yielded path is open. Paths with interior nodes in ``a`` are skipped;
    whenever such a path is open, one of its suffixes enumerated here is
    open too.
    """
    anc_c = ancestors(g, c) if c else frozenset()
    for start in sorted(a):
        yield from _open_dfs(g, start, b, c, anc_c, avoid=a - {start})


def _open_dfs(g: Graph, start: str, targets: frozenset[str], c: frozenset[str],
              anc_c: frozenset[str], avoid: frozenset[str]) -> Iterator[Path]:
    """DFS over open definite-status simple paths out of ``start``.

    A path is yielded at every target hit and extended further, since a
    longer path may end at another target.
    """
    nodes: list[str] = [start]
    steps: list[str] = []

    def options(v: str):
        return iter(sorted(_incident(g, v), key=lambda t: (t[0], t[2])))

    def admissible(w: str, step: str) -> bool:
        if w in nodes or w in avoid:
            return False
        if not steps:
            return True
        # the previous node v becomes interior once we extend past it
        v = nodes[-1]
        prev = steps[-1]
        head_in = prev in (STEP_FORWARD, STEP_BIDIRECTED)
        head_out = step in (STEP_BACKWARD, STEP_BIDIRECTED)
        if head_in and head_out:
            return v in anc_c  # collider must be opened
        out_of_v = prev == STEP_BACKWARD or step == STEP_FORWARD
        if not out_of_v:
            if not (prev == STEP_UNDIRECTED and step == STEP_UNDIRECTED
                    and not g.adjacent(nodes[-2], w)):
                return False  # interior node not of definite status
        return v not in c  # non-collider must be unconditioned

    stack = [options(start)]
    while stack:
        try:
            w, _, step = next(stack[-1])
        except StopIteration:
            stack.pop()
            if len(nodes) > 1:
                nodes.pop()
                steps.pop()
            continue
        if not admissible(w, step):
            continue
        nodes.append(w)
        steps.append(step)
        if w in targets:
            yield Path(tuple(nodes), tuple(steps))
        stack.append(options(w))


def open_proper_noncausal_paths(g: Graph, x: frozenset[str], y: frozenset[str],
                                z: frozenset[str]) -> Iterator[Path]:
    """Open proper non-causal definite-status paths from ``x`` to ``y``.

    These are exactly the paths a candidate adjustment set must block.
    """
    anc_z = ancestors(g, z) if z else frozenset()
    for start in sorted(x):
        for path in _open_dfs(g, start, y, z, anc_z, avoid=x - {start}):
            if not is_possibly_causal(g, path):
                yield path
