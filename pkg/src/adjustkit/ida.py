"""Semi-local and optimal IDA over CPDAGs and maxPDAGs.

Both algorithms loop over the subsets of sib(X), orient the edges at X
accordingly, and keep the orientations that extend to a maxPDAG. Semi-local
entries adjust for the resulting parent set of X; optimal entries adjust
for the O-set. Population variants replace OLS with the exact population
regression coefficient and serve as oracles in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .adjustment import o_set
from .graph import CPDAG, MAXPDAG, Graph, GraphError, descendants
from .meek import construct_max_pdag, dag_in_class
from .scm import (Dataset, LinearScm, RankError, implied_covariance,
                  ols_adjusted, population_regression_coef)


class _Zero:
    """Marker for entries whose effect is forced to zero (no regression)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"


ZERO = _Zero()


@dataclass(frozen=True)
class IdaEntry:
    sibling_subset: frozenset[str]
    adjustment_set: frozenset[str] | _Zero
    estimate: float | None
    error: str | None = None


@dataclass(frozen=True)
class EffectMultiset:
    entries: tuple[IdaEntry, ...]

    def values(self) -> list[float]:
        return [e.estimate for e in self.entries if e.error is None]

    def min_abs(self) -> float:
        return min(abs(v) for v in self.values())

    def __len__(self):
        return len(self.entries)


def sibling_subsets(g: Graph, x: str) -> list[frozenset[str]]:
    """Subsets of sib(x) by cardinality, then lexicographically."""
    sibs = sorted(g.sib(x))
    return [frozenset(c) for r in range(len(sibs) + 1)
            for c in combinations(sibs, r)]


def compatible_orientations(g: Graph, x: str) -> list[tuple[frozenset[str], Graph]]:
    """(subset, maxPDAG) pairs for the sibling subsets that do not FAIL.

    Each subset S orients S -> x and x -> (sib(x) \\ S) before closing
    under the orientation rules.
    """
    if g.graph_class not in (CPDAG, MAXPDAG):
        raise GraphError("IDA expects a cpdag or maxpdag")
    sibs = sorted(g.sib(x))
    out = []
    for subset in sibling_subsets(g, x):
        background = [(s, x) for s in sibs if s in subset]
        background += [(x, s) for s in sibs if s not in subset]
        oriented = construct_max_pdag(g, background)
        if oriented is not None:
            out.append((subset, oriented))
    return out


def _entry_plan(gp: Graph, x: str, y: str, optimal: bool,
                strict_possde: bool) -> frozenset[str] | _Zero:
    """Adjustment set for one oriented graph, or ZERO.

    All edges at x are directed in ``gp``, so y is a possible descendant of
    x exactly when it is a descendant (Meek closure reveals every
    descendant once the neighbourhood of x is oriented).
    """
    if optimal or strict_possde:
        if y not in descendants(gp, [x]):
            return ZERO
        return o_set(gp, [x], [y]) if optimal else gp.pa(x)
    if y in gp.pa(x):
        return ZERO
    return gp.pa(x)


def _run(g: Graph, x: str, y: str, estimate, optimal: bool,
         strict_possde: bool = False) -> EffectMultiset:
    g.check_nodes([x, y])
    entries = []
    for subset, gp in compatible_orientations(g, x):
        plan = _entry_plan(gp, x, y, optimal, strict_possde)
        if plan is ZERO:
            entries.append(IdaEntry(subset, ZERO, 0.0))
            continue
        try:
            entries.append(IdaEntry(subset, plan, estimate(plan)))
        except RankError as err:
            entries.append(IdaEntry(subset, plan, None, error=str(err)))
    return EffectMultiset(tuple(entries))


def semi_local_ida(g: Graph, x: str, y: str, data: Dataset,
                   strict_possde: bool = False) -> EffectMultiset:
    """Possible-effect estimates adjusting for the possible parent sets.

    ``strict_possde`` switches the zero test from y in pa(x, G') to
    y not in possde(x, G'), trading robustness to graph errors for extra
    forced zeros.
    """
    return _run(g, x, y,
                lambda z: ols_adjusted(data, x, y, z)[0],
                optimal=False, strict_possde=strict_possde)


def optimal_ida(g: Graph, x: str, y: str, data: Dataset) -> EffectMultiset:
    """Possible-effect estimates adjusting for the possible O-sets."""
    return _run(g, x, y,
                lambda z: ols_adjusted(data, x, y, z)[0],
                optimal=True)


def population_ida(g: Graph, x: str, y: str, scm: LinearScm,
                   method: str = "optimal", validate: bool = True) -> EffectMultiset:
    """IDA with exact population regression coefficients instead of OLS.

    Requires the model's DAG to belong to the class the graph represents.
    """
    if method not in ("optimal", "semilocal"):
        raise GraphError(f"unknown method {method!r}")
    if validate and not dag_in_class(g, scm.dag):
        raise GraphError("the model's DAG is not represented by the graph")
    cov = implied_covariance(scm)
    return _run(g, x, y,
                lambda z: population_regression_coef(cov, x, y, z),
                optimal=method == "optimal")


def possible_o_sets(g: Graph, x: str, y: str,
                    dedupe: bool = False) -> list[frozenset[str]]:
    """O-sets over the compatible sibling subsets (optionally deduplicated)."""
    g.check_nodes([x, y])
    out = []
    for _, gp in compatible_orientations(g, x):
        out.append(o_set(gp, [x], [y]))
    if dedupe:
        seen: set[frozenset[str]] = set()
        unique = []
        for s in out:
            if s not in seen:
                seen.add(s)
                unique.append(s)
        return unique
    return out
