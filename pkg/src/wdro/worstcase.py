"""Worst-case expected loss over a Wasserstein ball with finite candidate support.

The primal problem moves the mass of each center atom ``i`` onto
candidates ``j`` under a transport budget ``rho``::

    max  sum_ij P_ij loss_j
    s.t. sum_j P_ij = w_i,  sum_ij P_ij c_ij <= rho,  P >= 0

Its Lagrangian dual ``min_{lam >= 0} lam rho + sum_i w_i max_j (loss_j -
lam c_ij)`` is piecewise linear and convex in ``lam``, so the minimum sits
at ``lam = 0`` or at a breakpoint where two candidates tie for some atom.
:func:`worst_case_loss` enumerates those breakpoints; :func:`worst_case_loss_lp`
solves the primal with a generic LP solver and is kept as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .core import NormSpec
from .exceptions import DimensionMismatch, InfeasibleInstance, InvalidParams, SolverFailure
from .transport import DiscreteDistribution, TransportPlan, cost_matrix

GAP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AmbiguityInstance:
    """Wasserstein ball around ``center`` restricted to ``candidates``.

    ``losses[j]`` is the loss of the fixed model at ``candidates[j]``.
    Every center atom must appear among the candidates.
    """

    center: DiscreteDistribution
    candidates: np.ndarray
    rho: float
    losses: np.ndarray
    norm: NormSpec = NormSpec.L2

    def __post_init__(self):
        cands = np.asarray(self.candidates, dtype=float)
        if cands.ndim == 1:
            cands = cands[:, None]
        losses = np.asarray(self.losses, dtype=float).ravel()
        if cands.shape[1] != self.center.dim:
            raise DimensionMismatch("candidates and center atoms live in different spaces")
        if losses.size != cands.shape[0]:
            raise DimensionMismatch(f"{cands.shape[0]} candidates but {losses.size} losses")
        if not (np.isfinite(self.rho) and self.rho >= 0):
            raise InvalidParams("rho must be finite and nonnegative")
        norm = NormSpec.coerce(self.norm)
        cost = cost_matrix(self.center.atoms, cands, norm)
        home = np.argmax(cost == 0.0, axis=1)
        if not np.all(cost[np.arange(cost.shape[0]), home] == 0.0):
            raise InfeasibleInstance("every center atom must be one of the candidates")
        for name, val in (("candidates", cands), ("losses", losses), ("cost", cost), ("home", home)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "norm", norm)

    @classmethod
    def from_model(cls, center, candidates, rho, model, norm=NormSpec.L2):
        """Instance whose losses come from ``model`` evaluated at ``(x, y)`` candidates."""
        from .models import pointwise_loss

        cands = np.asarray(candidates, dtype=float)
        losses = pointwise_loss(model, cands[:, :-1], cands[:, -1])
        return cls(center, cands, rho, losses, norm)

    @property
    def center_mean(self) -> float:
        """Expected loss under the center distribution."""
        return float(np.dot(self.center.weights, self.losses[self.home]))

    @property
    def points(self) -> np.ndarray:
        """All points of the instance (the candidates include the center)."""
        return self.candidates


def _dual_objective(lam, inst):
    inner = np.max(inst.losses[None, :] - lam * inst.cost, axis=1)
    return lam * inst.rho + float(np.dot(inst.center.weights, inner))


def _breakpoints(inst):
    lam = [0.0]
    L = inst.losses
    for c in inst.cost:
        dl = L[:, None] - L[None, :]
        dc = c[:, None] - c[None, :]
        mask = dc > 0
        ratios = dl[mask] / dc[mask]
        lam.extend(ratios[ratios > 0].tolist())
    return np.unique(np.asarray(lam))


def _witness(lam, inst, tol=1e-12):
    """Optimal coupling from the active sets at the dual minimiser ``lam``."""
    w = inst.center.weights
    scores = inst.losses[None, :] - lam * inst.cost
    best = scores.max(axis=1)
    scale = max(1.0, float(np.max(np.abs(scores))))
    k, m = scores.shape
    lo = np.empty(k, dtype=int)
    hi = np.empty(k, dtype=int)
    for i in range(k):
        active = np.flatnonzero(scores[i] >= best[i] - tol * scale)
        costs = inst.cost[i, active]
        # cheapest active candidate, ties to the higher loss
        lo[i] = active[np.lexsort((-inst.losses[active], costs))[0]]
        hi[i] = active[np.lexsort((-inst.losses[active], -costs))[0]]
    c_lo = float(np.dot(w, inst.cost[np.arange(k), lo]))
    c_hi = float(np.dot(w, inst.cost[np.arange(k), hi]))
    if c_hi - c_lo > 0:
        t = min(max((inst.rho - c_lo) / (c_hi - c_lo), 0.0), 1.0)
    else:
        t = 0.0
    plan = np.zeros((k, m))
    np.add.at(plan, (np.arange(k), lo), (1.0 - t) * w)
    np.add.at(plan, (np.arange(k), hi), t * w)
    return plan


def worst_case_loss(inst: AmbiguityInstance):
    """Exact worst-case expected loss and an attaining coupling.

    Returns
    -------
    value : float
    witness : TransportPlan
        Rows follow the center atoms, columns the candidates; the column
        sums give the worst-case distribution.
    """
    if inst.rho == 0:
        k = inst.center.size
        plan = np.zeros((k, inst.candidates.shape[0]))
        plan[np.arange(k), inst.home] = inst.center.weights
        return inst.center_mean, TransportPlan(plan)
    lams = _breakpoints(inst)
    vals = np.array([_dual_objective(l, inst) for l in lams])
    k = int(np.argmin(vals))
    return float(vals[k]), TransportPlan(_witness(lams[k], inst))


def worst_case_loss_lp(inst: AmbiguityInstance):
    """Primal LP solution of the same problem (generic solver, oracle only)."""
    k, m = inst.cost.shape
    rows = sparse.kron(sparse.eye(k), np.ones((1, m))).tocsr()
    res = linprog(
        -np.tile(inst.losses, k),
        A_ub=inst.cost.reshape(1, -1),
        b_ub=[inst.rho],
        A_eq=rows,
        b_eq=inst.center.weights,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise SolverFailure(f"worst-case LP failed: {res.message}")
    return float(-res.fun), TransportPlan(np.clip(res.x.reshape(k, m), 0.0, None))


def witness_value(inst: AmbiguityInstance, plan: TransportPlan):
    """Expected loss and transport cost of a coupling."""
    mat = plan.matrix
    return float(np.sum(mat * inst.losses[None, :])), float(np.sum(mat * inst.cost))


def lemma2_gap(inst: AmbiguityInstance, L: float) -> float:
    """Slack of the Lipschitz bound: ``center_mean + L rho - worst_case``.

    ``L`` must be a Lipschitz constant of the loss over the instance's
    points (e.g. from :func:`wdro.regularizers.empirical_lipschitz` over
    all pairs); the returned slack is then nonnegative up to ``1e-8``.
    """
    if not L >= 0:
        raise InvalidParams("L must be nonnegative")
    worst, _ = worst_case_loss(inst)
    return inst.center_mean + L * inst.rho - worst
