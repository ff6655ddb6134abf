"""Independent reference computations used by the tests.

None of these call into ``wdro`` beyond plain data access: transport and
worst-case values come from cvxpy models, the scalar distance from the
quantile-function formula, and everything else from explicit loops.
"""

import itertools
import math

import cvxpy as cp
import numpy as np

ORD = {"l1": 1, "l2": 2, "linf": np.inf}
DUAL_ORD = {"l1": np.inf, "l2": 2, "linf": 1}


def ground_cost(a, b, norm="l2"):
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    out = np.empty((a.shape[0], b.shape[0]))
    for i, j in itertools.product(range(a.shape[0]), range(b.shape[0])):
        out[i, j] = np.linalg.norm(a[i] - b[j], ord=ORD[norm])
    return out


def transport_lp(a, wa, b, wb, norm="l2"):
    """Primal transport LP over the coupling polytope, solved by cvxpy."""
    C = ground_cost(a, b, norm)
    P = cp.Variable(C.shape, nonneg=True)
    prob = cp.Problem(cp.Minimize(cp.sum(cp.multiply(C, P))),
                      [cp.sum(P, axis=1) == wa, cp.sum(P, axis=0) == wb])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return float(prob.value)


def quantile_distance_1d(a, wa, b, wb):
    """``int_0^1 |F^-1(u) - G^-1(u)| du`` over the merged cumulative-weight breakpoints."""
    oa, ob = np.argsort(a), np.argsort(b)
    a, wa, b, wb = np.asarray(a)[oa], np.asarray(wa)[oa], np.asarray(b)[ob], np.asarray(wb)[ob]
    ca, cb = np.cumsum(wa), np.cumsum(wb)
    cuts = np.unique(np.concatenate([[0.0], ca, cb]))
    cuts = cuts[cuts <= 1.0]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        qa = a[min(np.searchsorted(ca, mid), a.size - 1)]
        qb = b[min(np.searchsorted(cb, mid), b.size - 1)]
        total += (hi - lo) * abs(qa - qb)
    return total


def worst_case_lp(center_atoms, center_w, candidates, losses, rho, norm="l2"):
    """Max expected loss over couplings from the center to the candidates with cost <= rho."""
    C = ground_cost(center_atoms, candidates, norm)
    P = cp.Variable(C.shape, nonneg=True)
    prob = cp.Problem(cp.Maximize(cp.sum(P @ np.asarray(losses, float))),
                      [cp.sum(P, axis=1) == center_w, cp.sum(cp.multiply(C, P)) <= rho])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return float(prob.value)


def loss_value(theta, x, y, kind):
    t = sum(ti * xi for ti, xi in zip(theta[:-1], x)) + theta[-1]
    if kind == "quadratic":
        return 0.5 * (t - y) ** 2
    if kind == "absolute":
        return abs(t - y)
    p = 1.0 / (1.0 + math.exp(-t))
    p = min(max(p, 1e-12), 1 - 1e-12)
    return -(y * math.log(p) + (1 - y) * math.log(1 - p))


def mean_loss(theta, X, y, kind):
    total = 0.0
    for xi, yi in zip(X, y):
        total += loss_value(theta, xi, yi, kind)
    return total / len(y)


def tight_scan(theta, X, y, norm="l2"):
    """``max_i |theta^T [x_i; 1] - y_i| * ||W theta||_*`` by an explicit loop."""
    w = np.array(theta, float)
    w[-1] = 0.0
    worst = 0.0
    for xi, yi in zip(X, y):
        r = abs(float(np.dot(theta[:-1], xi)) + theta[-1] - yi)
        worst = max(worst, r)
    return worst * np.linalg.norm(w, ord=DUAL_ORD[norm])


def bounds_scan(X, y, norm="l2"):
    bx = max(np.linalg.norm(row, ord=ORD[norm]) for row in X)
    by = max(abs(v) for v in y)
    return bx, by


def zeta_formula(c1, c2, a, p, gamma, n):
    t = math.log(c1 / gamma) / c2
    if n >= t:
        return (t / n) ** (1.0 / max(p, 2))
    return (t / n) ** (1.0 / a)


def normal_equations(X, y):
    Z = np.column_stack([X, np.ones(len(y))])
    return np.linalg.solve(Z.T @ Z, Z.T @ y)


def central_difference(f, v, h=1e-6):
    v = np.array(v, float)
    g = np.empty_like(v)
    for k in range(v.size):
        e = np.zeros_like(v)
        e[k] = h
        g[k] = (f(v + e) - f(v - e)) / (2 * h)
    return g
