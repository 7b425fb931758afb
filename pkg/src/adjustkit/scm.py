"""Linear structural causal models and the estimator algebra on them.

Random graph/coefficient generation follows the simulation protocol:
each ordered node pair receives an edge with probability d/(p-1) and
coefficients are uniform on [-1,-0.1] u [0.1,1]. Error variances default
to 1.0 (a configuration choice, not a reported value) and errors are
Gaussian unless a uniform flag is set.

Randomness contract: every stochastic routine takes an explicit seed (int
or numpy SeedSequence). Derived streams are built as
``SeedSequence([master, *indices])`` so replications are reproducible and
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import DAG, DIRECTED, Graph, GraphError, descendants, topological_order


class RankError(ValueError):
    """Design matrix is rank deficient (or too few rows)."""


@dataclass(frozen=True)
class LinearScm:
    """A DAG plus edge coefficients and per-node error variances."""

    dag: Graph
    coef: dict[tuple[str, str], float]
    err_var: dict[str, float]

    def __post_init__(self):
        if self.dag.graph_class != DAG:
            raise GraphError("LinearScm needs a dag")
        if set(self.coef) != set(self.dag.directed_edges()):
            raise GraphError("coefficient keys must be exactly the directed edges")
        if set(self.err_var) != set(self.dag.nodes):
            raise GraphError("need one error variance per node")
        if any(v <= 0 for v in self.err_var.values()):
            raise GraphError("error variances must be strictly positive")


@dataclass(frozen=True)
class Dataset:
    """An n-by-p numeric matrix with a node-name column map."""

    columns: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise ValueError("values must be n x len(columns)")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


@dataclass(frozen=True)
class CovarianceMatrix:
    names: tuple[str, ...]
    sigma: np.ndarray

    def __post_init__(self):
        p = len(self.names)
        if self.sigma.shape != (p, p):
            raise ValueError("sigma must be p x p")
        if not np.allclose(self.sigma, self.sigma.T, rtol=1e-12, atol=1e-12):
            raise ValueError("sigma must be symmetric")

    def sub(self, rows: Sequence[str], cols: Sequence[str]) -> np.ndarray:
        ri = [self.names.index(r) for r in rows]
        ci = [self.names.index(c) for c in cols]
        return self.sigma[np.ix_(ri, ci)]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def derived_seed(master: int, *indices: int) -> np.random.SeedSequence:
    """Documented counter scheme for per-replication streams."""
    return np.random.SeedSequence([int(master), *map(int, indices)])


def random_dag(p: int, d: float, seed) -> Graph:
    """Random DAG with p nodes and d expected neighbours per node.

    Nodes V1..Vp are in topological order; each of the p(p-1)/2 ordered
    pairs receives an edge independently with probability d/(p-1).
    """
    if p < 2:
        raise ValueError("need p >= 2")
    if not 0 < d < p:
        raise ValueError("need 0 < d < p")
    rng = _rng(seed)
    prob = d / (p - 1)
    names = [f"V{i + 1}" for i in range(p)]
    edges = [(names[i], names[j], DIRECTED)
             for i in range(p) for j in range(i + 1, p)
             if rng.random() < prob]
    return Graph(names, edges, DAG)


def random_scm(dag: Graph, seed, err_var: float = 1.0) -> LinearScm:
    """Draw edge coefficients uniformly from [-1,-0.1] u [0.1,1]."""
    rng = _rng(seed)
    coef = {}
    for a, b in sorted(dag.directed_edges()):
        magnitude = rng.uniform(0.1, 1.0)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        coef[(a, b)] = sign * magnitude
    return LinearScm(dag, coef, {n: err_var for n in dag.nodes})


def simulate(scm: LinearScm, n: int, seed, uniform_errors: bool = False) -> Dataset:
    """Draw n rows, generating nodes in topological order.

    Errors are centred Gaussian with the node's variance; with
    ``uniform_errors`` they are uniform with the same variance (probing the
    non-Gaussian caveat; no optimality claims are made there).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = _rng(seed)
    order = topological_order(scm.dag)
    cols = scm.dag.nodes
    idx = {c: i for i, c in enumerate(cols)}
    values = np.empty((n, len(cols)))
    for node in order:
        var = scm.err_var[node]
        if uniform_errors:
            half_width = np.sqrt(3.0 * var)
            column = rng.uniform(-half_width, half_width, size=n)
        else:
            column = rng.normal(0.0, np.sqrt(var), size=n)
        for parent in scm.dag.pa(node):
            column = column + scm.coef[(parent, node)] * values[:, idx[parent]]
        values[:, idx[node]] = column
    return Dataset(tuple(cols), values)


def implied_covariance(scm: LinearScm) -> CovarianceMatrix:
    """Population covariance solving the structural equations."""
    cols = scm.dag.nodes
    idx = {c: i for i, c in enumerate(cols)}
    p = len(cols)
    a = np.zeros((p, p))
    for (tail, head), value in scm.coef.items():
        a[idx[head], idx[tail]] = value
    omega = np.diag([scm.err_var[c] for c in cols])
    m = np.linalg.solve(np.eye(p) - a, np.eye(p))
    sigma = m @ omega @ m.T
    return CovarianceMatrix(tuple(cols), (sigma + sigma.T) / 2.0)


_PATH_ENUM_LIMIT = 20


def true_total_effect(scm: LinearScm, x: str, y: str) -> float:
    """Sum over directed paths from x to y of the edge-coefficient products.

    Path enumeration mirrors the definition on small graphs; larger graphs
    use the equivalent (I - A)^-1 entry. Zero when y is not a descendant.
    """
    scm.dag.check_nodes([x, y])
    if x == y:
        raise ValueError("x and y must differ")
    if y not in descendants(scm.dag, [x]):
        return 0.0
    if len(scm.dag.nodes) <= _PATH_ENUM_LIMIT:
        total = 0.0
        stack = [(x, 1.0)]
        while stack:
            node, prod = stack.pop()
            for child in scm.dag.ch(node):
                w = prod * scm.coef[(node, child)]
                if child == y:
                    total += w
                else:
                    stack.append((child, w))
        return total
    return _total_effect_matrix(scm, x, y)


def _total_effect_matrix(scm: LinearScm, x: str, y: str) -> float:
    cols = scm.dag.nodes
    idx = {c: i for i, c in enumerate(cols)}
    p = len(cols)
    a = np.zeros((p, p))
    for (tail, head), value in scm.coef.items():
        a[idx[head], idx[tail]] = value
    m = np.linalg.solve(np.eye(p) - a, np.eye(p))
    return float(m[idx[y], idx[x]])


def partial_variance(c: CovarianceMatrix, s: str, t: Iterable[str]) -> float:
    """Residual variance of s after linear projection on t."""
    t = sorted(set(t))
    if s in t:
        raise ValueError("s must not be in t")
    var_s = float(c.sub([s], [s])[0, 0])
    if not t:
        return var_s
    sigma_tt = c.sub(t, t)
    sigma_st = c.sub([s], t)
    try:
        solved = np.linalg.solve(sigma_tt, sigma_st.T)
    except np.linalg.LinAlgError as err:
        raise RankError(f"singular conditioning block for {t}") from err
    return var_s - float(sigma_st @ solved)


def population_avar(scm: LinearScm, x: str, y: str, z: Iterable[str]) -> float:
    """Asymptotic variance of the adjusted OLS slope: var(y | x,z) / var(x | z)."""
    z = sorted(set(z))
    if x in z or y in z:
        raise ValueError("z must be disjoint from x and y")
    cov = implied_covariance(scm)
    return partial_variance(cov, y, [x, *z]) / partial_variance(cov, x, z)


def population_regression_coef(cov: CovarianceMatrix, x: str, y: str,
                               z: Iterable[str]) -> float:
    """Coefficient of x in the population regression of y on {x} u z."""
    regressors = [x, *sorted(set(z))]
    sigma_rr = cov.sub(regressors, regressors)
    sigma_ry = cov.sub(regressors, [y])
    try:
        beta = np.linalg.solve(sigma_rr, sigma_ry)
    except np.linalg.LinAlgError as err:
        raise RankError("singular regressor covariance") from err
    return float(beta[0, 0])


def ols_fit(design: np.ndarray, response: np.ndarray
            ) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Least squares via QR with a rank check.

    Returns (beta, stderr per column, residual variance, residual dof).
    """
    n, k = design.shape
    if n <= k:
        raise RankError(f"need more than {k} rows, have {n}")
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    scale = diag.max() if diag.size and diag.max() > 0 else 1.0
    if np.any(diag < max(n, k) * np.finfo(float).eps * scale):
        raise RankError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ response)
    resid = response - design @ beta
    dof = n - k
    residual_var = float(resid @ resid) / dof
    r_inv = np.linalg.solve(r, np.eye(k))
    xtx_inv_diag = np.einsum("ij,ij->i", r_inv, r_inv)
    stderr = np.sqrt(np.maximum(residual_var * xtx_inv_diag, 0.0))
    return beta, stderr, residual_var, dof


def ols_adjusted(data: Dataset, x: str, y: str, z: Iterable[str]
                 ) -> tuple[float, float, float]:
    """OLS slope of x regressing y on {x} u z with intercept.

    Returns (coef, stderr, residual_var); the standard error is the
    conventional OLS one and is reported for diagnostics only. Multivariate
    treatments are handled by folding the other treatment nodes into z.
    """
    z = sorted(set(z))
    if x in z or y in z or x == y:
        raise ValueError("x, y and z must not overlap")
    design = np.column_stack([np.ones(data.n), data.column(x)]
                             + [data.column(name) for name in z])
    beta, stderr, residual_var, _ = ols_fit(design, data.column(y))
    return float(beta[1]), float(stderr[1]), residual_var
