"""Seeded property suites behind ``wdro verify``.

Each suite returns a list of :class:`PropertyResult`; a property fails when
any instance violates it beyond its tolerance. Violations are measured so
that positive numbers are bad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concentration import calibrate_c2, coverage_simulation, zeta
from .core import ConcentrationParams, Dataset, ModelParams, NormSpec, RobustConfig, data_bounds
from .regularizers import (
    absolute_linear,
    all_pairs,
    conservative_linear,
    empirical_lipschitz,
    logistic_reg,
    tight_linear,
)
from .training import TrainConfig, train
from .transport import (
    DiscreteDistribution,
    dual_potential,
    kantorovich_dual_value,
    mixture,
    wasserstein,
    wasserstein_1d,
)
from .worstcase import AmbiguityInstance, lemma2_gap, worst_case_loss, worst_case_loss_lp

SUITES = ("transport", "concentration", "lipschitz", "worstcase", "training")


@dataclass
class PropertyResult:
    name: str
    count: int = 0
    failures: int = 0
    worst: float = -math.inf
    tol: float = 0.0
    strict: bool = False

    def add(self, violation: float):
        self.count += 1
        self.worst = max(self.worst, float(violation))
        if violation > self.tol or (self.strict and violation >= self.tol):
            self.failures += 1

    @property
    def passed(self) -> bool:
        return self.count > 0 and self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.count} checks, {self.failures} failures, worst violation {self.worst:.3e} (tol {self.tol:g})"


def random_distribution(rng, k_max=8, dim=1, scale=3.0):
    k = int(rng.integers(1, k_max + 1))
    return DiscreteDistribution(rng.uniform(-scale, scale, size=(k, dim)), rng.dirichlet(np.ones(k)))


def hull_points(points, k, rng):
    """``k`` random convex combinations of the rows of ``points``."""
    w = rng.dirichlet(np.ones(points.shape[0]) * 0.5, size=k)
    return w @ points


def random_instance(rng, model=None, max_center=5, max_candidates=8, dim=3):
    nc = int(rng.integers(1, max_center + 1))
    m = int(rng.integers(nc, max_candidates + 1))
    center_atoms = rng.normal(size=(nc, dim))
    cands = np.vstack([center_atoms, rng.normal(size=(m - nc, dim))])
    center = DiscreteDistribution(center_atoms, rng.dirichlet(np.ones(nc)))
    rho = float(rng.uniform(0.0, 2.0))
    if model is None:
        model = ModelParams(rng.normal(size=dim))
    return AmbiguityInstance.from_model(center, cands, rho, model)


def transport_suite(seed=0, trials=200):
    rng = np.random.default_rng(seed)
    one_d = PropertyResult("wasserstein_1d equals LP", tol=1e-9)
    identity = PropertyResult("W(p, p) = 0", tol=1e-9)
    symmetry = PropertyResult("W(p, q) = W(q, p)", tol=1e-9)
    triangle = PropertyResult("W(p, r) <= W(p, q) + W(q, r)", tol=1e-9)
    convex = PropertyResult("W(mix(p, q, beta), p) <= beta W(q, p)", tol=1e-9)
    weak = PropertyResult("dual value of 1-Lipschitz potential <= W", tol=1e-9)
    strong = PropertyResult("dual LP optimum equals W", tol=1e-8)
    for _ in range(trials):
        p, q, r = (random_distribution(rng) for _ in range(3))
        w_pq = wasserstein(p, q)[0]
        one_d.add(abs(w_pq - wasserstein_1d(p, q)))
        identity.add(abs(wasserstein(p, p)[0]))
        symmetry.add(abs(w_pq - wasserstein(q, p)[0]))
        triangle.add(wasserstein(p, r)[0] - w_pq - wasserstein(q, r)[0])
        dim = int(rng.integers(1, 4))
        pm, qm = random_distribution(rng, dim=dim), random_distribution(rng, dim=dim)
        beta = float(rng.uniform())
        convex.add(wasserstein(mixture(pm, qm, beta), pm)[0] - beta * wasserstein(qm, pm)[0])
        anchor = rng.normal(size=dim)
        s = float(rng.uniform(-1, 1))
        f = lambda xi, a=anchor, s=s: s * np.linalg.norm(np.atleast_1d(xi) - a)  # noqa: E731
        w_m = wasserstein(pm, qm)[0]
        weak.add(kantorovich_dual_value(pm, qm, NormSpec.L2, f) - w_m)
        strong.add(abs(dual_potential(pm, qm)[0] - w_m))
    return [one_d, identity, symmetry, triangle, convex, weak, strong]


def calibrated_coverage(seed=0, trials=200, ns=(50, 200), gammas=(0.1, 0.2), beta=0.1, a=2.0,
                    calibration_trials=300):
    """Calibrate ``c2`` on clean draws, then check coverage on fresh poisoned draws.

    Returns ``(calibration, [CoverageResult, ...])``.
    """
    rng = np.random.default_rng(seed)
    p_dist = DiscreteDistribution(rng.normal(size=(8, 3)), rng.dirichlet(np.ones(8) * 3))
    q_dist = DiscreteDistribution(p_dist.atoms + np.array([2.0, 0.0, 0.0]), p_dist.weights)
    cal = calibrate_c2(p_dist, ns, gammas, calibration_trials, a, np.random.default_rng(seed + 1))
    results = []
    for g in gammas:
        for n in ns:
            params = ConcentrationParams(cal.c1, cal.c2, a, p_dist.dim, g)
            results.append(coverage_simulation(p_dist, q_dist, beta, params, n, trials,
                                               np.random.default_rng(seed + 2)))
    return cal, results


def concentration_suite(seed=0, trials=200):
    rng = np.random.default_rng(seed)
    mono_n = PropertyResult("zeta strictly decreasing in n", strict=True)
    mono_g = PropertyResult("zeta strictly decreasing in gamma", strict=True)
    for _ in range(trials):
        params = ConcentrationParams(c1=float(rng.uniform(1.0, 5.0)), c2=float(rng.uniform(0.1, 2.0)),
                                     a=float(rng.uniform(1.1, 3.0)), p=int(rng.choice([1, 3, 4, 5])),
                                     gamma=float(rng.uniform(0.05, 0.5)))
        n = int(rng.integers(1, 500))
        z = zeta(params, n)
        mono_n.add(zeta(params, n + 1) - z)
        mono_g.add(z - zeta(params, n, params.gamma * 0.9))
    cover = PropertyResult("coverage frequency >= 1 - gamma", tol=0.0)
    cal, results = calibrated_coverage(seed, trials)
    for res in results:
        cover.add((1 - res.gamma) - res.frequency)
    cover.name += f" (calibrated c1={cal.c1:.4f}, c2={cal.c2:.6f})"
    return [mono_n, mono_g, cover]


def random_lipschitz_case(rng, family, n=10, p_x=3):
    X = rng.normal(size=(n, p_x))
    theta = rng.normal(size=p_x + 1) * float(rng.choice([0.3, 1.0, 3.0]))
    if family == "logistic":
        y = (rng.uniform(size=n) < 0.5).astype(float)
        model = ModelParams(theta, "logistic", "cross_entropy")
    else:
        y = rng.normal(size=n)
        model = ModelParams(theta, "linear", family)
    return Dataset(X, y), model


def sample_pairs(d, rng, k=400, vary_output=True, binary=False):
    """Pairs of points inside the convex hull of the records."""
    pts = d.points
    U = hull_points(pts, k, rng)
    V = hull_points(pts, k, rng)
    if binary:
        U[:, -1] = rng.integers(0, 2, size=k)
        V[:, -1] = rng.integers(0, 2, size=k)
    if not vary_output:
        V[:, -1] = U[:, -1]
    return U, V


def lipschitz_suite(seed=0, trials=200, vary_output=True):
    rng = np.random.default_rng(seed)
    tag = "(x, y)" if vary_output else "x only"
    quad = PropertyResult(f"empirical <= tight_linear, quadratic, pairs vary {tag}", tol=1e-9)
    absl = PropertyResult(f"empirical <= ||theta||_*, absolute, pairs vary {tag}", tol=1e-9)
    logi = PropertyResult(f"empirical <= (Y+X+2)||theta||_*, logistic, pairs vary {tag}", tol=1e-9)
    chain = PropertyResult("tight_linear <= conservative_linear", tol=1e-9)
    for _ in range(trials):
        d, m = random_lipschitz_case(rng, "quadratic")
        emp = empirical_lipschitz(m, sample_pairs(d, rng, vary_output=vary_output))
        tl = tight_linear(m.theta, d).value
        quad.add(emp - tl)
        chain.add(tl - conservative_linear(m.theta, data_bounds(d)).value)
        d, m = random_lipschitz_case(rng, "absolute")
        absl.add(empirical_lipschitz(m, sample_pairs(d, rng, vary_output=vary_output))
                 - absolute_linear(m.theta).value)
        d, m = random_lipschitz_case(rng, "logistic")
        logi.add(empirical_lipschitz(m, sample_pairs(d, rng, vary_output=vary_output, binary=True))
                 - logistic_reg(m.theta, data_bounds(d)).value)
    return [quad, absl, logi, chain]


def worstcase_suite(seed=0, trials=500):
    rng = np.random.default_rng(seed)
    agree = PropertyResult("breakpoint value equals LP value", tol=1e-8)
    gap = PropertyResult("worst case <= center mean + L rho", tol=1e-8)
    zero = PropertyResult("slack = 0 exactly at rho = 0", tol=0.0)
    mono = PropertyResult("worst case nondecreasing in rho", tol=1e-10)
    concave = PropertyResult("worst case concave in rho", tol=1e-10)
    for _ in range(trials):
        inst = random_instance(rng)
        value, _ = worst_case_loss(inst)
        agree.add(abs(value - worst_case_loss_lp(inst)[0]))
        model = ModelParams(rng.normal(size=3))
        inst = random_instance(rng, model)
        L = empirical_lipschitz(model, all_pairs(inst.points))
        gap.add(-lemma2_gap(inst, L))
        at_zero = AmbiguityInstance(inst.center, inst.candidates, 0.0, inst.losses)
        zero.add(abs(lemma2_gap(at_zero, L)))
        r1, r2 = sorted(rng.uniform(0, 3, size=2))
        rm = 0.5 * (r1 + r2)
        vals = [worst_case_loss(AmbiguityInstance(inst.center, inst.candidates, r, inst.losses))[0]
                for r in (r1, rm, r2)]
        mono.add(max(vals[0] - vals[1], vals[1] - vals[2]))
        concave.add(0.5 * (vals[0] + vals[2]) - vals[1])
    return [agree, gap, zero, mono, concave]


def training_suite(seed=0, trials=5):
    rng = np.random.default_rng(seed)
    ols = PropertyResult("rho = 0 matches normal equations (per coordinate)", tol=1e-4)
    mono = PropertyResult("J_n nondecreasing over rho grid", tol=1e-6)
    ident = PropertyResult("objective = loss + rho * regularizer", tol=1e-10)
    det = PropertyResult("identical inputs give identical reports", tol=0.0)
    grid = (0.0, 0.001, 0.003, 0.01, 0.03, 0.1)
    for _ in range(trials):
        n, p_x = 200, 4
        X = rng.normal(size=(n, p_x))
        theta = rng.normal(size=p_x + 1)
        y = X @ theta[:-1] + theta[-1] + 0.1 * rng.normal(size=n)
        d = Dataset(X, y)
        Z = np.column_stack([X, np.ones(n)])
        exact = np.linalg.solve(Z.T @ Z, Z.T @ y)
        rep = train(d, cfg=RobustConfig(0.0))
        ols.add(float(np.max(np.abs(rep.theta_hat.theta - exact))))
        objs = []
        for rho in grid:
            rep = train(d, cfg=RobustConfig(rho, regularizer="conservative_linear"))
            objs.append(rep.objective)
            ident.add(abs(rep.objective - (rep.empirical_loss + rep.penalty_scale * rep.regularizer_value)))
        mono.add(max(a - b for a, b in zip(objs[:-1], objs[1:])))
        cfg = RobustConfig(0.01, regularizer="tight_linear")
        det.add(0.0 if train(d, cfg=cfg, tc=TrainConfig(seed=3)) == train(d, cfg=cfg, tc=TrainConfig(seed=3)) else 1.0)
    return [ols, mono, ident, det]


def run_suite(name, seed=0, trials=None):
    fn = {
        "transport": transport_suite,
        "concentration": concentration_suite,
        "lipschitz": lipschitz_suite,
        "worstcase": worstcase_suite,
        "training": training_suite,
    }[name]
    if trials is None:
        return fn(seed)
    return fn(seed, trials)

