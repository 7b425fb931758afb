"""Mixed-graph representation and structural queries.

Supports four graph classes: DAG, CPDAG, maxPDAG and ADMG. Edges are
directed (``->``), undirected (``--``) or bidirected (``<->``). In an ADMG a
pair of nodes may carry a directed and a bidirected edge at the same time;
the three simple classes allow at most one edge per pair.

Graphs are immutable after construction; every query below is a pure
function and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DIRECTED = "->"
UNDIRECTED = "--"
BIDIRECTED = "<->"

DAG = "dag"
CPDAG = "cpdag"
MAXPDAG = "maxpdag"
ADMG = "admg"

GRAPH_CLASSES = (DAG, CPDAG, MAXPDAG, ADMG)

# Per-step edge marks of a path, relative to traversal direction.
STEP_FORWARD = "->"   # tail at the earlier node
STEP_BACKWARD = "<-"  # head at the earlier node
STEP_UNDIRECTED = "--"
STEP_BIDIRECTED = "<->"


class GraphError(ValueError):
    """Structural violation: unknown node, bad edge, broken class invariant."""


@dataclass(frozen=True)
class Path:
    """A path as a node sequence plus per-step edge marks.

    ``steps[i]`` describes the edge between ``nodes[i]`` and ``nodes[i+1]``
    as seen walking the path: ``->``, ``<-``, ``--`` or ``<->``.
    """

    nodes: tuple[str, ...]
    steps: tuple[str, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise GraphError("a path needs at least two nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError("path nodes must be distinct")
        if len(self.steps) != len(self.nodes) - 1:
            raise GraphError("need exactly one step per consecutive node pair")

    def __len__(self) -> int:
        return len(self.nodes)


class Graph:
    """Immutable mixed graph over named nodes.

    Parameters
    ----------
    nodes : iterable of node names (stable order; duplicates rejected)
    edges : iterable of (tail, head, kind) triples; kind in {"->", "--", "<->"}.
        For undirected and bidirected edges the endpoint order is irrelevant.
    graph_class : one of "dag", "cpdag", "maxpdag", "admg".
    validate : skip invariant checks when False (internal use only).
    """

    __slots__ = ("nodes", "graph_class", "_index", "_dir", "_und", "_bi",
                 "_pa", "_ch", "_sib", "_sp", "_adj")

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str, str]],
                 graph_class: str, validate: bool = True):
        node_list = tuple(nodes)
        if len(set(node_list)) != len(node_list):
            raise GraphError("duplicate node names")
        if graph_class not in GRAPH_CLASSES:
            raise GraphError(f"unknown graph class {graph_class!r}")
        self.nodes = node_list
        self.graph_class = graph_class
        self._index = {n: i for i, n in enumerate(node_list)}

        dir_edges: set[tuple[str, str]] = set()
        und_edges: set[tuple[str, str]] = set()
        bi_edges: set[tuple[str, str]] = set()
        for tail, head, kind in edges:
            for endpoint in (tail, head):
                if endpoint not in self._index:
                    raise GraphError(f"unknown node {endpoint!r} in edge list")
            if tail == head:
                raise GraphError(f"self-loop at {tail!r}")
            if kind == DIRECTED:
                dir_edges.add((tail, head))
            elif kind == UNDIRECTED:
                und_edges.add((min(tail, head), max(tail, head)))
            elif kind == BIDIRECTED:
                bi_edges.add((min(tail, head), max(tail, head)))
            else:
                raise GraphError(f"unknown edge kind {kind!r}")
        self._dir = frozenset(dir_edges)
        self._und = frozenset(und_edges)
        self._bi = frozenset(bi_edges)

        pa: dict[str, set[str]] = {n: set() for n in node_list}
        ch: dict[str, set[str]] = {n: set() for n in node_list}
        sib: dict[str, set[str]] = {n: set() for n in node_list}
        sp: dict[str, set[str]] = {n: set() for n in node_list}
        for a, b in self._dir:
            ch[a].add(b)
            pa[b].add(a)
        for a, b in self._und:
            sib[a].add(b)
            sib[b].add(a)
        for a, b in self._bi:
            sp[a].add(b)
            sp[b].add(a)
        self._pa = {n: frozenset(v) for n, v in pa.items()}
        self._ch = {n: frozenset(v) for n, v in ch.items()}
        self._sib = {n: frozenset(v) for n, v in sib.items()}
        self._sp = {n: frozenset(v) for n, v in sp.items()}
        self._adj = {n: self._pa[n] | self._ch[n] | self._sib[n] | self._sp[n]
                     for n in node_list}

        if validate:
            self._check_invariants()

    # -- construction helpers -------------------------------------------------

    def _check_invariants(self):
        if self.graph_class in (DAG, CPDAG, MAXPDAG):
            if self._bi:
                raise GraphError(f"{self.graph_class} cannot contain bidirected edges")
            if self.graph_class == DAG and self._und:
                raise GraphError("dag cannot contain undirected edges")
            seen_pairs: set[tuple[str, str]] = set()
            for a, b in self._dir:
                pair = (min(a, b), max(a, b))
                if pair in seen_pairs or pair in self._und:
                    raise GraphError(f"multiple edges between {a!r} and {b!r}")
                seen_pairs.add(pair)
            if seen_pairs & self._und:
                raise GraphError("directed and undirected edge on the same pair")
        else:  # ADMG: directed + bidirected may coexist on a pair
            if self._und:
                raise GraphError("admg cannot contain undirected edges")
            for a, b in self._dir:
                if (b, a) in self._dir:
                    raise GraphError(f"two-cycle between {a!r} and {b!r}")
        # acyclicity of the directed part, all classes
        try:
            _kahn_order(self.nodes, self._pa, self._ch)
        except GraphError:
            raise GraphError("directed part contains a cycle")

    @property
    def edges(self) -> frozenset[tuple[str, str, str]]:
        out = {(a, b, DIRECTED) for a, b in self._dir}
        out |= {(a, b, UNDIRECTED) for a, b in self._und}
        out |= {(a, b, BIDIRECTED) for a, b in self._bi}
        return frozenset(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (set(self.nodes) == set(other.nodes)
                and self.graph_class == other.graph_class
                and self._dir == other._dir
                and self._und == other._und
                and self._bi == other._bi)

    def __hash__(self):
        return hash((frozenset(self.nodes), self.graph_class,
                     self._dir, self._und, self._bi))

    def __repr__(self):
        return (f"Graph({self.graph_class}, {len(self.nodes)} nodes, "
                f"{len(self._dir)}->, {len(self._und)}--, {len(self._bi)}<->)")

    def __contains__(self, node: str) -> bool:
        return node in self._index

    # -- single-node accessors ------------------------------------------------

    def pa(self, node: str) -> frozenset[str]:
        self.check_nodes([node])
        return self._pa[node]

    def ch(self, node: str) -> frozenset[str]:
        self.check_nodes([node])
        return self._ch[node]

    def sib(self, node: str) -> frozenset[str]:
        self.check_nodes([node])
        return self._sib[node]

    def spouses(self, node: str) -> frozenset[str]:
        self.check_nodes([node])
        return self._sp[node]

    def adjacent(self, a: str, b: str) -> bool:
        self.check_nodes([a, b])
        return b in self._adj[a]

    def has_edge(self, tail: str, head: str, kind: str) -> bool:
        if kind == DIRECTED:
            return (tail, head) in self._dir
        if kind == UNDIRECTED:
            return (min(tail, head), max(tail, head)) in self._und
        if kind == BIDIRECTED:
            return (min(tail, head), max(tail, head)) in self._bi
        raise GraphError(f"unknown edge kind {kind!r}")

    def directed_edges(self) -> frozenset[tuple[str, str]]:
        return self._dir

    def undirected_edges(self) -> frozenset[tuple[str, str]]:
        return self._und

    def bidirected_edges(self) -> frozenset[tuple[str, str]]:
        return self._bi

    def check_nodes(self, nodes: Iterable[str]):
        unknown = [n for n in nodes if n not in self._index]
        if unknown:
            raise GraphError(f"unknown node identifier(s): {sorted(unknown)}")

    # -- path construction ----------------------------------------------------

    def path(self, nodes: Sequence[str], steps: Sequence[str] | None = None) -> Path:
        """Build a validated :class:`Path` from a node sequence.

        Steps are inferred when omitted; this fails if any consecutive pair
        carries more than one edge (possible in ADMGs only).
        """
        self.check_nodes(nodes)
        if steps is None:
            inferred = []
            for a, b in zip(nodes, nodes[1:]):
                options = self._steps_between(a, b)
                if not options:
                    raise GraphError(f"{a!r} and {b!r} are not adjacent")
                if len(options) > 1:
                    raise GraphError(
                        f"ambiguous edge between {a!r} and {b!r}; pass steps explicitly")
                inferred.append(options[0])
            steps = inferred
        else:
            for (a, b), step in zip(zip(nodes, nodes[1:]), steps):
                if step not in self._steps_between(a, b):
                    raise GraphError(f"no {step!r} edge between {a!r} and {b!r}")
        return Path(tuple(nodes), tuple(steps))

    def _steps_between(self, a: str, b: str) -> list[str]:
        out = []
        if (a, b) in self._dir:
            out.append(STEP_FORWARD)
        if (b, a) in self._dir:
            out.append(STEP_BACKWARD)
        if (min(a, b), max(a, b)) in self._und:
            out.append(STEP_UNDIRECTED)
        if (min(a, b), max(a, b)) in self._bi:
            out.append(STEP_BIDIRECTED)
        return out


def _kahn_order(nodes: Sequence[str], pa: dict[str, frozenset[str] | set[str]],
                ch: dict[str, frozenset[str] | set[str]]) -> list[str]:
    indeg = {n: len(pa[n]) for n in nodes}
    ready = [n for n in nodes if indeg[n] == 0]  # stable: input node order
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for c in sorted(ch[n]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != len(nodes):
        raise GraphError("cycle detected in directed part")
    return order


# -- node-set queries ---------------------------------------------------------

def parents(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Union of directed-edge parents of the nodes in ``s``."""
    s = _as_set(g, s)
    out: set[str] = set()
    for n in s:
        out |= g._pa[n]
    return frozenset(out)


def children(g: Graph, s: Iterable[str]) -> frozenset[str]:
    s = _as_set(g, s)
    out: set[str] = set()
    for n in s:
        out |= g._ch[n]
    return frozenset(out)


def siblings(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Undirected-edge neighbours of the nodes in ``s``."""
    s = _as_set(g, s)
    out: set[str] = set()
    for n in s:
        out |= g._sib[n]
    return frozenset(out)


def descendants(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Nodes reachable from ``s`` via directed edges, including ``s`` itself."""
    s = _as_set(g, s)
    return frozenset(_reach(s, g._ch))


def ancestors(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Nodes with a directed path into ``s``, including ``s`` itself."""
    s = _as_set(g, s)
    return frozenset(_reach(s, g._pa))


def _reach(start: set[str], step: dict[str, frozenset[str]]) -> set[str]:
    seen = set(start)
    stack = list(start)
    while stack:
        for nxt in step[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


_EXACT_NODE_LIMIT = 64


def possible_descendants(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Targets of possibly causal paths out of ``s``, plus ``s`` itself.

    A path is possibly causal when every edge on it is directed or
    undirected and the graph has no directed edge from a later path node
    back into an earlier one. The pairwise condition is global, so this
    walks simple paths exhaustively; graphs are capped at
    ``_EXACT_NODE_LIMIT`` nodes.
    """
    if g.graph_class not in (DAG, CPDAG, MAXPDAG):
        raise GraphError("possible descendants are defined for DAG/CPDAG/maxPDAG only")
    s = _as_set(g, s)
    if g.graph_class == DAG or not g._und:
        return descendants(g, s)
    if len(g.nodes) > _EXACT_NODE_LIMIT:
        raise GraphError(
            f"exact possibly-causal search capped at {_EXACT_NODE_LIMIT} nodes")
    out = set(s)
    for root in s:
        out.update(_possibly_causal_dfs(g, root))
    return frozenset(out)


def possible_ancestors(g: Graph, s: Iterable[str]) -> frozenset[str]:
    """Sources of possibly causal paths into ``s``, plus ``s`` itself."""
    if g.graph_class not in (DAG, CPDAG, MAXPDAG):
        raise GraphError("possible ancestors are defined for DAG/CPDAG/maxPDAG only")
    s = _as_set(g, s)
    if g.graph_class == DAG or not g._und:
        return ancestors(g, s)
    if len(g.nodes) > _EXACT_NODE_LIMIT:
        raise GraphError(
            f"exact possibly-causal search capped at {_EXACT_NODE_LIMIT} nodes")
    out = set(s)
    for root in s:
        out.update(_possibly_causal_dfs(g, root, reverse=True))
    return frozenset(out)


def _possibly_causal_dfs(g: Graph, root: str, reverse: bool = False,
                         targets: set[str] | None = None,
                         avoid: set[str] | None = None,
                         first: set[str] | None = None) -> set[str]:
    """All nodes reached from ``root`` along possibly causal simple paths.

    With ``reverse`` the paths run *into* ``root`` and are grown backwards.
    ``targets`` stops the search once any target is hit (existence query),
    ``avoid`` excludes interior/endpoint nodes (properness), and ``first``
    restricts the first step out of ``root``.
    """
    avoid = avoid or set()
    found: set[str] = set()
    # forward growth appends nodes; the pairwise check for a new node w is
    # ch(w) ∩ path = ∅ (no edge from w back into an earlier node). Growing
    # backwards the roles flip: pa(w) ∩ path = ∅.
    back_adj = g._ch if not reverse else g._pa
    step_adj = (lambda v: g._ch[v] | g._sib[v]) if not reverse else \
               (lambda v: g._pa[v] | g._sib[v])

    path: list[str] = [root]
    on_path = {root}

    def extend(v: str) -> Iterator[str]:
        for w in sorted(step_adj(v)):
            if w in on_path or w in avoid:
                continue
            if back_adj[w] & on_path:
                continue  # pairwise violation
            yield w

    stack: list[Iterator[str]] = [iter(
        w for w in extend(root) if first is None or w in first)]
    while stack:
        try:
            w = next(stack[-1])
        except StopIteration:
            stack.pop()
            on_path.discard(path.pop())
            continue
        found.add(w)
        if targets is not None and w in targets:
            return found
        path.append(w)
        on_path.add(w)
        stack.append(extend(w))
    return found


def is_possibly_causal(g: Graph, p: Path) -> bool:
    """Check the pairwise possibly-causal condition for a path.

    True iff no step is bidirected and, for every ordered pair of path
    nodes (Vi, Vj) with i < j, the graph does not contain Vj -> Vi. The
    pair check covers non-consecutive nodes.
    """
    g.check_nodes(p.nodes)
    if STEP_BIDIRECTED in p.steps:
        return False
    for j, vj in enumerate(p.nodes):
        earlier = p.nodes[:j]
        if g._ch[vj] & set(earlier):
            return False
    return True


def is_definite_status(g: Graph, p: Path) -> bool:
    """True iff every non-endpoint of ``p`` is a definite collider or a
    definite non-collider."""
    g.check_nodes(p.nodes)
    for i in range(1, len(p.nodes) - 1):
        v = p.nodes[i]
        left, right = p.steps[i - 1], p.steps[i]
        head_left = left in (STEP_FORWARD, STEP_BIDIRECTED)
        head_right = right in (STEP_BACKWARD, STEP_BIDIRECTED)
        if head_left and head_right:
            continue  # collider
        out_left = left == STEP_BACKWARD    # edge points out of v to the left
        out_right = right == STEP_FORWARD   # edge points out of v to the right
        if out_left or out_right:
            continue  # non-collider
        if left == STEP_UNDIRECTED and right == STEP_UNDIRECTED \
                and not g.adjacent(p.nodes[i - 1], p.nodes[i + 1]):
            continue  # definite non-collider via non-adjacency
        return False
    return True


def topological_order(g: Graph) -> list[str]:
    """Topological order of a DAG; raises on a cycle (corrupted invariant)."""
    if g.graph_class != DAG:
        raise GraphError("topological order is defined for DAGs")
    return _kahn_order(g.nodes, g._pa, g._ch)


def _as_set(g: Graph, s: Iterable[str]) -> set[str]:
    if isinstance(s, str):
        raise GraphError("pass node sets as iterables of names, not a bare string")
    s = set(s)
    g.check_nodes(s)
    return s
