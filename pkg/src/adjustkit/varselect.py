"""Backward regression selection and its independence-oracle version.

The finite-sample algorithm repeatedly drops the candidate with the
largest t-test p-value while that p-value exceeds a threshold alpha;
thresholds equivalent to AIC/BIC backward selection are exposed through
``alpha_for_criterion``. The oracle version makes a single pass, dropping
every candidate that is conditionally independent of the outcome given the
treatment and the remaining candidates; its output is order-independent.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy import stats

from .graph import Graph
from .scm import CovarianceMatrix, Dataset, ols_fit
from .separation import separated

_PCOR_TOL = 1e-10


class IndependenceOracle:
    """Conditional-independence answers backed by a graph or a covariance.

    Graph backing answers through d-/m-separation; covariance backing
    declares independence when the partial correlation is below ``tol``
    in magnitude (faithfulness guard).
    """

    def __init__(self, backing: Graph | CovarianceMatrix, tol: float = _PCOR_TOL):
        if not isinstance(backing, (Graph, CovarianceMatrix)):
            raise TypeError("backing must be a Graph or a CovarianceMatrix")
        self.backing = backing
        self.tol = tol

    def independent(self, a: str, b: str, given: Iterable[str]) -> bool:
        given = sorted(set(given))
        if isinstance(self.backing, Graph):
            return separated(self.backing, {a}, {b}, given)
        for name in (a, b, *given):
            if name not in self.backing.names:
                raise KeyError(f"oracle does not cover variable {name!r}")
        return abs(partial_correlation(self.backing, a, b, given)) < self.tol


def partial_correlation(cov: CovarianceMatrix, a: str, b: str,
                        given: Iterable[str]) -> float:
    """Correlation of a and b after linear projection on ``given``."""
    given = sorted(set(given))
    if a in given or b in given or a == b:
        raise ValueError("a, b and the conditioning set must be distinct")
    block = cov.sub([a, b], [a, b]).astype(float)
    if given:
        sigma_gg = cov.sub(given, given)
        sigma_pg = cov.sub([a, b], given)
        block = block - sigma_pg @ np.linalg.solve(sigma_gg, sigma_pg.T)
    denom = math.sqrt(block[0, 0] * block[1, 1])
    if denom <= 0:
        return 0.0
    return float(block[0, 1] / denom)


def alpha_for_criterion(criterion: str, n: float) -> float:
    """p-value threshold making backward selection match AIC or BIC."""
    criterion = criterion.lower()
    if criterion == "aic":
        return float(stats.chi2.sf(2.0, df=1))
    if criterion == "bic":
        if n < 2:
            raise ValueError("BIC threshold needs n >= 2")
        return float(stats.chi2.sf(math.log(n), df=1))
    raise ValueError(f"unknown criterion {criterion!r} (use 'aic' or 'bic')")


def backward_select(data: Dataset, x: str, y: str, z: Iterable[str],
                    alpha: float) -> frozenset[str]:
    """Backward regression selection of a subset of ``z``.

    The caller must supply a ``z`` that is itself a valid adjustment set;
    validity of the output is only guaranteed in that case.
    """
    selected, _ = backward_select_with_trace(data, x, y, z, alpha)
    return selected


def backward_select_with_trace(data: Dataset, x: str, y: str, z: Iterable[str],
                               alpha: float
                               ) -> tuple[frozenset[str], list[tuple[str, float]]]:
    """Like :func:`backward_select`, also returning (removed, p-value) steps."""
    current = sorted(set(z))
    if x in current or y in current:
        raise ValueError("z must not contain x or y")
    trace: list[tuple[str, float]] = []
    while current:
        pvalues = _candidate_pvalues(data, x, y, current)
        pmax = max(pvalues.values())
        if pmax <= alpha:
            break
        # ties break toward the lexicographically smallest name
        drop = min(name for name, p in pvalues.items() if p == pmax)
        trace.append((drop, pmax))
        current.remove(drop)
    return frozenset(current), trace


def _candidate_pvalues(data: Dataset, x: str, y: str,
                       current: list[str]) -> dict[str, float]:
    """Two-sided t-test p-values for each candidate's coefficient in the
    regression of y on x and all current candidates."""
    design = np.column_stack([np.ones(data.n), data.column(x)]
                             + [data.column(name) for name in current])
    beta, stderr, _, dof = ols_fit(design, data.column(y))
    out = {}
    for j, name in enumerate(current, start=2):
        if stderr[j] == 0.0:
            out[name] = 0.0 if beta[j] != 0.0 else 1.0
            continue
        t = beta[j] / stderr[j]
        out[name] = float(2.0 * stats.t.sf(abs(t), df=dof))
    return out


def oracle_backward_select(oracle: IndependenceOracle, x: str, y: str,
                           z: Iterable[str]) -> frozenset[str]:
    """Single-pass pruning: drop each candidate independent of ``y`` given
    ``x`` and the others. The result does not depend on the input order."""
    current = list(dict.fromkeys(z))  # preserve caller order
    if x in current or y in current:
        raise ValueError("z must not contain x or y")
    for name in list(current):
        rest = [other for other in current if other != name]
        if oracle.independent(y, name, [x, *rest]):
            current.remove(name)
    return frozenset(current)
