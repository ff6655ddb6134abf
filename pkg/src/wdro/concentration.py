"""Concentration rate of the empirical measure and the prescribed radius.

The constants ``c1`` and ``c2`` are configuration. :func:`calibrate_c2`
fits ``c2`` from simulated clean draws so that the coverage statement can
be checked empirically with :func:`coverage_simulation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import ConcentrationParams, NormSpec
from .exceptions import InvalidParams
from .transport import DiscreteDistribution, mixture, wasserstein


def zeta(params: ConcentrationParams, n: int, gamma: float | None = None) -> float:
    """Concentration rate ``zeta(gamma)`` for ``n`` samples.

    ``gamma`` defaults to ``params.gamma``.
    """
    if int(n) != n or n < 1:
        raise InvalidParams("n must be a positive integer")
    gamma = params.gamma if gamma is None else gamma
    if not 0 < gamma < 1:
        raise InvalidParams("gamma must lie in (0, 1)")
    log_term = math.log(params.c1 / gamma)
    if log_term <= 0:
        raise InvalidParams(
            f"log(c1 / gamma) = {log_term:.3g} <= 0 makes the bound vacuous; need c1 > gamma"
        )
    base = log_term / (params.c2 * n)
    if n >= log_term / params.c2:
        return base ** (1.0 / max(params.p, 2))
    return base ** (1.0 / params.a)


def radius(params: ConcentrationParams, n: int, beta: float, wqp: float, confidence=None) -> float:
    """Ambiguity radius ``zeta(beta) + beta * W(Q, P)``.

    The confidence level is tied to the poison ratio (``gamma = beta``);
    ``confidence`` overrides that coupling for experimentation.
    """
    if not 0 < beta < 1:
        raise InvalidParams("beta must lie in (0, 1)")
    if not wqp >= 0:
        raise InvalidParams("W(Q, P) must be nonnegative")
    gamma = beta if confidence is None else confidence
    return zeta(params, n, gamma) + beta * wqp


def _max_c2(log_term, n, q, p, a):
    """Largest ``c2`` with ``zeta >= q`` (zeta is decreasing in ``c2``)."""
    if q <= 0:
        return math.inf
    expo = max(p, 2) if q < 1 else a
    return log_term / (n * q**expo)


def empirical_distance(p_dist, n, rng, norm=NormSpec.L2, source=None) -> float:
    """``W(D_n, p_dist)`` for ``n`` i.i.d. draws from ``source`` (default ``p_dist``)."""
    source = p_dist if source is None else source
    sample = source.sample(n, rng)
    emp = DiscreteDistribution.empirical(sample)
    return wasserstein(emp, p_dist, norm)[0]


@dataclass
class Calibration:
    c1: float
    c2: float
    per_cell: dict


def calibrate_c2(p_dist, ns, gammas, trials, a, rng, c1=math.e, norm=NormSpec.L2) -> Calibration:
    """Fit ``c2`` on clean draws so that ``zeta`` covers the empirical quantile.

    For each ``(n, gamma)`` the ``1 - gamma`` quantile of ``W(D_n, P)`` over
    ``trials`` clean draws is computed, and the largest ``c2`` whose
    ``zeta(gamma)`` still dominates it is recorded. The returned ``c2`` is
    the minimum over all cells, so it is valid for every cell.
    """
    p = p_dist.dim
    per_cell = {}
    for n in ns:
        dists = np.array([empirical_distance(p_dist, n, rng, norm) for _ in range(trials)])
        for g in gammas:
            q = float(np.quantile(dists, 1 - g, method="higher"))
            per_cell[(n, g)] = _max_c2(math.log(c1 / g), n, q, p, a)
    c2 = min(per_cell.values())
    if not math.isfinite(c2):
        raise InvalidParams("calibration draws were all exact; cannot fit c2")
    return Calibration(c1=c1, c2=c2, per_cell=per_cell)


@dataclass
class CoverageResult:
    n: int
    gamma: float
    beta: float
    trials: int
    hits: int
    threshold: float

    @property
    def frequency(self) -> float:
        return self.hits / self.trials

    @property
    def passed(self) -> bool:
        return self.frequency >= 1 - self.gamma


def coverage_simulation(p_dist, q_dist, beta, params: ConcentrationParams, n, trials, rng,
                        norm=NormSpec.L2) -> CoverageResult:
    """Frequency of ``W(D_n, P) <= zeta(gamma) + beta W(Q, P)`` over seeded trials.

    Each trial draws ``n`` records from ``(1 - beta) P + beta Q``.
    """
    wqp = wasserstein(q_dist, p_dist, norm)[0]
    threshold = zeta(params, n) + beta * wqp
    source = mixture(p_dist, q_dist, beta)
    hits = 0
    for _ in range(trials):
        if empirical_distance(p_dist, n, rng, norm, source=source) <= threshold:
            hits += 1
    return CoverageResult(n=n, gamma=params.gamma, beta=beta, trials=trials, hits=hits,
                          threshold=threshold)


def with_gamma(params: ConcentrationParams, gamma: float) -> ConcentrationParams:
    return replace(params, gamma=gamma)
