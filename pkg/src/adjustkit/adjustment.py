"""Covariate-adjustment machinery on causal graphs.

Implements causal and forbidden node computation, amenability, the
generalized adjustment criterion, latent and forbidden projections, the
O-set and its projection-based twin (the parents of the outcome in the
forbidden projection), the canonical adjustment set, and existence checks.

Amenable maxPDAG queries route through a consistent extension, which is
licensed by the equality of forbidden sets and O-sets across the DAGs an
amenable graph represents; the exact possibly-causal path machinery stays
available as ``method="exact"`` and is the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import (ADMG, BIDIRECTED, CPDAG, DAG, DIRECTED, MAXPDAG,
                    UNDIRECTED, Graph, GraphError, _possibly_causal_dfs,
                    ancestors, descendants, parents, possible_ancestors,
                    possible_descendants)
from .meek import consistent_extension
from .separation import _reachable, open_proper_noncausal_paths

_ENUM_NODE_LIMIT = 24


class NotAmenableError(GraphError):
    """The graph is not amenable relative to (x, y) for the requested query."""


@dataclass(frozen=True)
class ForbiddenProjection:
    """Projection of a graph over its forbidden nodes (except x and y).

    ``kept``/``removed`` record the node split so that sets can be mapped
    between the original graph and the projection unambiguously. For
    maxPDAG input the graph is only a valid maxPDAG when a valid adjustment
    set exists; otherwise it additionally carries the bidirected edges that
    witness non-existence.
    """

    graph: Graph
    kept: frozenset[str]
    removed: frozenset[str]


def _check_problem(g: Graph, x: Iterable[str], y: Iterable[str]):
    x, y = frozenset(x), frozenset(y)
    g.check_nodes(x | y)
    if not x or not y:
        raise GraphError("treatment and outcome sets must be non-empty")
    if x & y:
        raise GraphError("treatment and outcome sets must be disjoint")
    return x, y


def causal_nodes(g: Graph, x: Iterable[str], y: Iterable[str],
                 possibly: bool = False) -> frozenset[str]:
    """Nodes on proper (possibly) causal paths from ``x`` to ``y``, minus ``x``.

    The default uses directed paths only; ``possibly=True`` uses possibly
    causal paths (pairwise condition) and requires the exact search.
    """
    x, y = _check_problem(g, x, y)
    if possibly and g.graph_class in (CPDAG, MAXPDAG) and g.undirected_edges():
        return _possibly_causal_nodes(g, x, y)
    # v lies on a proper causal path iff v is properly reachable from x and
    # reaches y while avoiding x; the two simple paths can only share v,
    # because a second shared node would close a directed cycle.
    fwd = _proper_reach(g, x)
    bwd = _reach_avoiding(g, y, x)
    return frozenset(fwd & bwd)


def _proper_reach(g: Graph, x: frozenset[str]) -> set[str]:
    """Nodes reachable from x via directed paths with no interior x-node."""
    out: set[str] = set()
    stack = [c for xx in x for c in g.ch(xx) if c not in x]
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        stack.extend(c for c in g.ch(v) if c not in x and c not in out)
    return out


def _reach_avoiding(g: Graph, y: frozenset[str], x: frozenset[str]) -> set[str]:
    """Nodes with a directed path into y avoiding x (y included)."""
    out = set(y)
    stack = list(y)
    while stack:
        v = stack.pop()
        for p in g.pa(v):
            if p not in x and p not in out:
                out.add(p)
                stack.append(p)
    return out


def _possibly_causal_nodes(g: Graph, x: frozenset[str],
                           y: frozenset[str]) -> frozenset[str]:
    """Union of nodes on proper possibly causal paths from x to y."""
    if len(g.nodes) > _ENUM_NODE_LIMIT:
        raise GraphError(
            f"exact possibly-causal node search capped at {_ENUM_NODE_LIMIT} nodes")
    collected: set[str] = set()
    for start in sorted(x):
        path: list[str] = [start]
        on_path = {start}

        def extend(v):
            for w in sorted(g.ch(v) | g.sib(v)):
                if w in on_path or (w in x):
                    continue
                if g.ch(w) & on_path:
                    continue  # pairwise violation
                yield w

        stack = [extend(start)]
        while stack:
            try:
                w = next(stack[-1])
            except StopIteration:
                stack.pop()
                on_path.discard(path.pop())
                continue
            path.append(w)
            on_path.add(w)
            if w in y:
                collected.update(path[1:])
            stack.append(extend(w))
    return frozenset(collected)


def amenable(g: Graph, x: Iterable[str], y: Iterable[str]) -> bool:
    """Does every proper possibly causal path from x to y leave x by a
    directed edge? Vacuously true on DAGs and ADMGs."""
    x, y = _check_problem(g, x, y)
    if g.graph_class in (DAG, ADMG):
        return True
    # search only within nodes that can even reach y over {->, --} edges
    reach_y = _mixed_back_reach(g, y)
    for start in sorted(x):
        first = {s for s in g.sib(start) if s in reach_y and s not in x}
        if not first:
            continue
        avoid = (x - {start}) | (frozenset(g.nodes) - reach_y)
        hits = _possibly_causal_dfs(g, start, targets=set(y), avoid=avoid,
                                    first=first)
        if hits & y:
            return False
    return True


def _mixed_back_reach(g: Graph, y: frozenset[str]) -> frozenset[str]:
    seen = set(y)
    stack = list(y)
    while stack:
        v = stack.pop()
        for w in g.pa(v) | g.sib(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def forbidden_set(g: Graph, x: Iterable[str], y: Iterable[str],
                  method: str = "auto") -> frozenset[str]:
    """Possible descendants of the possibly causal nodes, union ``x``.

    On DAGs and ADMGs this is the descendants of the causal nodes union
    ``x``. On CPDAGs/maxPDAGs, ``method="auto"`` uses a consistent
    extension when the graph is amenable and the exact search otherwise;
    ``"extension"`` insists on the shortcut (error when not amenable) and
    ``"exact"`` always runs the possibly-causal machinery.
    """
    x, y = _check_problem(g, x, y)
    if method not in ("auto", "exact", "extension"):
        raise GraphError(f"unknown method {method!r}")
    if g.graph_class in (DAG, ADMG):
        return frozenset(descendants(g, causal_nodes(g, x, y)) | x)
    if method == "exact":
        return _forbidden_exact(g, x, y)
    if not amenable(g, x, y):
        if method == "extension":
            raise NotAmenableError(
                "consistent-extension shortcut needs an amenable graph")
        return _forbidden_exact(g, x, y)
    ext = consistent_extension(g)
    return frozenset(descendants(ext, causal_nodes(ext, x, y)) | x)


def _forbidden_exact(g: Graph, x: frozenset[str], y: frozenset[str]) -> frozenset[str]:
    posscn = _possibly_causal_nodes(g, x, y)
    return frozenset(possible_descendants(g, posscn) | x) if posscn else frozenset(x)


def is_valid_adjustment_set(g: Graph, x: Iterable[str], y: Iterable[str],
                            z: Iterable[str]) -> bool:
    """Generalized adjustment criterion for ``z`` relative to (x, y).

    Checks amenability, disjointness from the forbidden set, and blocking
    of every proper non-causal definite-status path from x to y.
    """
    x, y = _check_problem(g, x, y)
    z = frozenset(z)
    g.check_nodes(z)
    if z & (x | y):
        raise GraphError("candidate set overlaps treatment or outcome")
    if not amenable(g, x, y):
        return False
    if z & forbidden_set(g, x, y):
        return False
    return proper_noncausal_blocked(g, x, y, z)


def proper_noncausal_blocked(g: Graph, x: frozenset[str], y: frozenset[str],
                             z: frozenset[str]) -> bool:
    """Condition (c) of the criterion: all proper non-causal definite-status
    paths from x to y are blocked by z."""
    if g.graph_class in (DAG, ADMG):
        # equivalent reachability check in the proper back-door graph: drop
        # the first edge of every proper causal path, then m-separate.
        cn = causal_nodes(g, x, y)
        pbd_dir = [(a, b) for a, b in g.directed_edges()
                   if not (a in x and b in cn)]
        pbd = Graph(g.nodes,
                    [(a, b, DIRECTED) for a, b in pbd_dir]
                    + [(a, b, BIDIRECTED) for a, b in g.bidirected_edges()],
                    g.graph_class, validate=False)
        return not _reachable(pbd, x, y, z)
    if len(g.nodes) > _ENUM_NODE_LIMIT:
        raise GraphError(
            f"path-based criterion on PDAGs capped at {_ENUM_NODE_LIMIT} nodes")
    return next(open_proper_noncausal_paths(g, x, y, z), None) is None


def adjustment_set_exists(g: Graph, x: Iterable[str], y: Iterable[str]) -> bool:
    """Existence of a valid adjustment set relative to (x, y).

    Requires ``y`` to consist of possible descendants of ``x`` (reduce the
    outcome set first otherwise). Non-amenable input raises, keeping it
    distinct from plain non-existence.
    """
    x, y = _check_problem(g, x, y)
    if g.graph_class in (CPDAG, MAXPDAG) and not amenable(g, x, y):
        raise NotAmenableError("graph is not amenable relative to (x, y)")
    if not y <= possible_descendants(g, x):
        raise GraphError("outcomes must be possible descendants of x; "
                         "apply reduce_outcomes first")
    if g.graph_class in (DAG, ADMG) or len(y) == 1:
        cn = causal_nodes(g, x, y)
        return not (x & descendants(g, cn))
    # multi-outcome maxPDAG: the canonical set is valid iff any set is
    return is_valid_adjustment_set(g, x, y, canonical_adjustment_set(g, x, y))


def reduce_outcomes(g: Graph, x: Iterable[str], y: Iterable[str]
                    ) -> tuple[frozenset[str], frozenset[str]]:
    """Split ``y`` into (kept, dropped): outcomes outside possde(x) have a
    causal effect of exactly zero and can be dropped."""
    x, y = _check_problem(g, x, y)
    possde = possible_descendants(g, x)
    return frozenset(y & possde), frozenset(y - possde)


def o_set(g: Graph, x: Iterable[str], y: Iterable[str],
          method: str = "auto") -> frozenset[str]:
    """Parents of the causal nodes minus the forbidden set.

    Defined even when no valid adjustment set exists. On amenable
    maxPDAGs the computation runs on a consistent extension; ``"exact"``
    forces the direct computation on the graph itself.
    """
    x, y = _check_problem(g, x, y)
    if method not in ("auto", "exact", "extension"):
        raise GraphError(f"unknown method {method!r}")
    target = g
    if g.graph_class in (CPDAG, MAXPDAG) and g.undirected_edges() and method != "exact":
        if amenable(g, x, y):
            target = consistent_extension(g)
        elif method == "extension":
            raise NotAmenableError(
                "consistent-extension shortcut needs an amenable graph")
    cn = causal_nodes(target, x, y)
    forb = forbidden_set(target, x, y,
                         method="exact" if target is g else "auto")
    return frozenset(parents(target, cn) - forb)


def latent_projection(d: Graph, w: Iterable[str]) -> Graph:
    """Latent projection of a DAG onto ``w``: directed edges for directed
    paths with latent interiors, bidirected edges for latent common causes."""
    if d.graph_class != DAG:
        raise GraphError("latent_projection expects a dag")
    w = frozenset(w)
    d.check_nodes(w)
    keep = [n for n in d.nodes if n in w]
    latent = frozenset(d.nodes) - w
    edges: set[tuple[str, str, str]] = set()
    for wi in keep:
        for wj in _latent_reach(d, wi, latent):
            edges.add((wi, wj, DIRECTED))
    for l in sorted(latent):
        heads = sorted(_latent_reach(d, l, latent))
        for i, wi in enumerate(heads):
            for wj in heads[i + 1:]:
                edges.add((wi, wj, BIDIRECTED))
    return Graph(keep, edges, ADMG)


def _latent_reach(d: Graph, src: str, latent: frozenset[str]) -> set[str]:
    """Observed nodes reachable from src via directed paths through latents."""
    out: set[str] = set()
    seen: set[str] = set()
    stack = list(d.ch(src))
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in latent:
            stack.extend(d.ch(v))
        else:
            out.add(v)
    return out


def forbidden_projection(g: Graph, x: Iterable[str], y: Iterable[str]
                         ) -> ForbiddenProjection:
    """Project the graph over its forbidden nodes, keeping x and y.

    DAG input accepts any disjoint x, y. MaxPDAG input is restricted to a
    singleton outcome and requires amenability.
    """
    x, y = _check_problem(g, x, y)
    if g.graph_class == DAG:
        forb = forbidden_set(g, x, y)
        removed = frozenset(forb - (x | y))
        kept = frozenset(g.nodes) - removed
        return ForbiddenProjection(latent_projection(g, kept), kept, removed)
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("forbidden_projection expects a dag, cpdag or maxpdag")
    if len(y) > 1:
        raise GraphError("maxPDAG forbidden projection needs a singleton outcome")
    if not amenable(g, x, y):
        raise NotAmenableError("maxPDAG forbidden projection needs an amenable graph")
    forb = forbidden_set(g, x, y)
    removed = frozenset(forb - (x | y))
    kept_order = [n for n in g.nodes if n not in removed]
    kept = frozenset(kept_order)
    edges: set[tuple[str, str, str]] = set()
    dir_only = Graph(g.nodes, [(a, b, DIRECTED) for a, b in g.directed_edges()],
                     DAG, validate=False)
    for wi in kept_order:
        for wj in _latent_reach(dir_only, wi, removed):
            edges.add((wi, wj, DIRECTED))
    for l in sorted(removed):
        heads = sorted(_latent_reach(dir_only, l, removed))
        for i, wi in enumerate(heads):
            for wj in heads[i + 1:]:
                edges.add((wi, wj, BIDIRECTED))
    for a, b in g.undirected_edges():
        if a in kept and b in kept:
            edges.add((a, b, UNDIRECTED))
    has_bidirected = any(k == BIDIRECTED for _, _, k in edges)
    graph = Graph(kept_order, edges, MAXPDAG, validate=not has_bidirected)
    return ForbiddenProjection(graph, kept, removed)


def o_star_set(g: Graph, x: Iterable[str], y: Iterable[str]) -> frozenset[str]:
    """Parents of ``y`` in the forbidden projection, minus x and y."""
    x, y = _check_problem(g, x, y)
    proj = forbidden_projection(g, x, y)
    return frozenset(parents(proj.graph, y) - (x | y))


def canonical_adjustment_set(g: Graph, x: Iterable[str], y: Iterable[str]
                             ) -> frozenset[str]:
    """The adjust-set: possible ancestors of x and y minus x, y and the
    forbidden set. Valid whenever any valid adjustment set exists."""
    x, y = _check_problem(g, x, y)
    if g.graph_class in (CPDAG, MAXPDAG) and not amenable(g, x, y):
        raise NotAmenableError("canonical adjustment set needs an amenable graph")
    return frozenset(possible_ancestors(g, x | y)
                     - (x | y | forbidden_set(g, x, y)))
