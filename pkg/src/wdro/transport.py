"""Exact order-1 Wasserstein distance between finitely supported distributions.

The primal transportation problem is solved as a linear program with the
HiGHS solver shipped in :mod:`scipy.optimize`. For scalar atoms
:func:`wasserstein_1d` evaluates the closed form ``int |F_p - F_q|`` and
serves as an independent oracle for the LP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .core import NormSpec
from .exceptions import DimensionMismatch, InvalidParams, NonFiniteValue, NotLipschitz, SolverFailure

WEIGHT_TOL = 1e-12
PLAN_TOL = 1e-9
LIPSCHITZ_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability measure with finitely many atoms in R^m."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        weights = np.asarray(self.weights, dtype=float).ravel()
        if atoms.ndim != 2 or atoms.shape[0] == 0:
            raise DimensionMismatch("atoms must be a nonempty (k, m) array")
        if atoms.shape[0] != weights.size:
            raise DimensionMismatch(f"{atoms.shape[0]} atoms but {weights.size} weights")
        if not np.all(np.isfinite(atoms)):
            raise NonFiniteValue("atoms must be finite")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidParams("weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidParams(f"weights sum to {weights.sum()!r}, not 1")
        atoms = atoms.copy()
        weights = weights.copy()
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, atoms) -> "DiscreteDistribution":
        atoms = np.asarray(atoms, dtype=float)
        k = atoms.shape[0]
        return cls(atoms, np.full(k, 1.0 / k))

    @classmethod
    def empirical(cls, points) -> "DiscreteDistribution":
        """Empirical measure of ``points`` with repeated rows merged."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        uniq, counts = _unique_rows(points)
        return cls(uniq, counts / counts.sum())

    @classmethod
    def dirac(cls, point) -> "DiscreteDistribution":
        return cls(np.atleast_2d(np.asarray(point, dtype=float)), np.ones(1))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    def expect(self, values) -> float:
        """Expectation of per-atom ``values``."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def sample(self, n, rng) -> np.ndarray:
        idx = rng.choice(self.size, size=n, p=self.weights)
        return self.atoms[idx]


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Coupling between a source and a destination distribution."""

    matrix: np.ndarray

    def check(self, source: DiscreteDistribution, dest: DiscreteDistribution, tol=PLAN_TOL):
        """Raise ``InvalidParams`` unless the marginals match within ``tol``."""
        m = self.matrix
        if m.shape != (source.size, dest.size):
            raise DimensionMismatch(f"plan shape {m.shape} does not match marginals")
        if np.any(m < -tol):
            raise InvalidParams("plan has negative mass")
        if np.max(np.abs(m.sum(axis=1) - source.weights)) > tol:
            raise InvalidParams("plan row sums differ from source weights")
        if np.max(np.abs(m.sum(axis=0) - dest.weights)) > tol:
            raise InvalidParams("plan column sums differ from destination weights")
        return True


def _unique_rows(points):
    uniq, inverse, counts = np.unique(points, axis=0, return_inverse=True, return_counts=True)
    # keep first-occurrence order so results do not depend on sort order
    first = np.full(uniq.shape[0], points.shape[0])
    np.minimum.at(first, inverse.ravel(), np.arange(points.shape[0]))
    order = np.argsort(first, kind="stable")
    return uniq[order], counts[order].astype(float)


def cost_matrix(a, b, norm=NormSpec.L2) -> np.ndarray:
    """Pairwise ground distances ``||a_i - b_j||``."""
    norm = NormSpec.coerce(norm)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"points live in R^{a.shape[1]} and R^{b.shape[1]}")
    return norm(a[:, None, :] - b[None, :, :], axis=-1)


def _solve_transport(cost, a, b):
    k, l = cost.shape
    rows = sparse.kron(sparse.eye(k), np.ones((1, l)))
    cols = sparse.kron(np.ones((1, k)), sparse.eye(l))
    A_eq = sparse.vstack([rows, cols]).tocsr()
    b_eq = np.concatenate([a, b])
    res = linprog(cost.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverFailure(f"transport LP failed: {res.message}")
    plan = np.clip(res.x.reshape(k, l), 0.0, None)
    return float(np.dot(cost.ravel(), plan.ravel())), plan


def wasserstein(p: DiscreteDistribution, q: DiscreteDistribution, norm=NormSpec.L2):
    """Order-1 Wasserstein distance and an optimal coupling.

    Parameters
    ----------
    p, q : DiscreteDistribution
        Distributions on the same R^m.
    norm : NormSpec
        Ground norm.

    Returns
    -------
    distance : float
    plan : TransportPlan
        Rows follow ``p.atoms``, columns ``q.atoms``.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"distributions live in R^{p.dim} and R^{q.dim}")
    cost = cost_matrix(p.atoms, q.atoms, norm)
    dist, plan = _solve_transport(cost, p.weights, q.weights)
    return max(dist, 0.0), TransportPlan(plan)


def wasserstein_1d(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Closed form ``int |F_p(t) - F_q(t)| dt`` for scalar atoms."""
    if p.dim != 1 or q.dim != 1:
        raise DimensionMismatch("wasserstein_1d needs scalar atoms")
    a = p.atoms[:, 0]
    b = q.atoms[:, 0]
    grid = np.union1d(a, b)
    if grid.size == 1:
        return 0.0
    # CDFs on each interval [grid[k], grid[k+1])
    fp = np.array([p.weights[a <= t].sum() for t in grid[:-1]])
    fq = np.array([q.weights[b <= t].sum() for t in grid[:-1]])
    return float(np.sum(np.abs(fp - fq) * np.diff(grid)))


def union_support(p: DiscreteDistribution, q: DiscreteDistribution) -> np.ndarray:
    """Distinct atoms of ``p`` and ``q`` in first-occurrence order."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"distributions live in R^{p.dim} and R^{q.dim}")
    uniq, _ = _unique_rows(np.vstack([p.atoms, q.atoms]))
    return uniq


def _lookup(support, atoms):
    idx = np.empty(atoms.shape[0], dtype=int)
    for i, a in enumerate(atoms):
        hit = np.flatnonzero(np.all(support == a, axis=1))
        idx[i] = hit[0]
    return idx


def kantorovich_dual_value(p, q, norm=NormSpec.L2, f=None) -> float:
    """Dual objective ``int f dp - int f dq`` for a 1-Lipschitz potential.

    ``f`` is either an array of values on :func:`union_support` ``(p, q)``
    or a callable evaluated on each support point. Every value is a lower
    bound on ``wasserstein(p, q)``.

    Raises
    ------
    NotLipschitz
        If some pair of support points violates ``|f(u) - f(v)| <= ||u - v||``
        by more than ``1e-9``.
    """
    norm = NormSpec.coerce(norm)
    support = union_support(p, q)
    if f is None:
        values = np.zeros(support.shape[0])
    elif callable(f):
        values = np.array([float(f(s if s.size > 1 else s[0])) for s in support])
    else:
        values = np.asarray(f, dtype=float).ravel()
        if values.size != support.shape[0]:
            raise DimensionMismatch(
                f"potential has {values.size} values but the union support has {support.shape[0]} points"
            )
    dist = cost_matrix(support, support, norm)
    excess = np.abs(values[:, None] - values[None, :]) - dist
    if np.max(excess) > LIPSCHITZ_TOL:
        i, j = np.unravel_index(np.argmax(excess), excess.shape)
        raise NotLipschitz(f"potential is not 1-Lipschitz between support points {i} and {j}")
    fp = values[_lookup(support, p.atoms)]
    fq = values[_lookup(support, q.atoms)]
    return float(np.dot(p.weights, fp) - np.dot(q.weights, fq))


def dual_potential(p, q, norm=NormSpec.L2):
    """Solve the Kantorovich dual LP on the union support.

    Returns ``(value, f)`` with ``f`` aligned to :func:`union_support`.
    """
    norm = NormSpec.coerce(norm)
    support = union_support(p, q)
    k = support.shape[0]
    c = np.zeros(k)
    np.add.at(c, _lookup(support, p.atoms), p.weights)
    np.subtract.at(c, _lookup(support, q.atoms), q.weights)
    dist = cost_matrix(support, support, norm)
    ii, jj = np.nonzero(~np.eye(k, dtype=bool))
    m = ii.size
    A = sparse.coo_matrix(
        (np.concatenate([np.ones(m), -np.ones(m)]),
         (np.concatenate([np.arange(m), np.arange(m)]), np.concatenate([ii, jj]))),
        shape=(m, k),
    ).tocsr()
    # f_0 pinned to 0 removes the constant shift
    bounds = [(0.0, 0.0)] + [(None, None)] * (k - 1)
    res = linprog(-c, A_ub=A, b_ub=dist[ii, jj], bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverFailure(f"dual LP failed: {res.message}")
    return float(-res.fun), res.x


def mixture(p: DiscreteDistribution, q: DiscreteDistribution, beta: float) -> DiscreteDistribution:
    """The mixture ``(1 - beta) p + beta q`` with coinciding atoms merged."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"distributions live in R^{p.dim} and R^{q.dim}")
    if not 0 <= beta <= 1:
        raise InvalidParams("beta must lie in [0, 1]")
    if beta == 0:
        return p
    if beta == 1:
        return q
    atoms = np.vstack([p.atoms, q.atoms])
    weights = np.concatenate([(1 - beta) * p.weights, beta * q.weights])
    uniq, _ = _unique_rows(atoms)
    idx = _lookup(uniq, atoms)
    merged = np.zeros(uniq.shape[0])
    np.add.at(merged, idx, weights)
    return DiscreteDistribution(uniq, merged / merged.sum())
