"""Regularized sample-average training by deterministic subgradient descent.

The objective is ``mean loss + rho * L(theta)`` (or the explicitly weighted
``c1 ||theta||_*^2 + c2 ||theta||_*``). Steps follow ``step0 / sqrt(t)``,
divided by a curvature scale of the smooth part so that the default
``step0 = 1`` is stable on any data scale. The best iterate seen is
reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Family,
    Loss,
    ModelParams,
    NormSpec,
    Regularizer,
    RobustConfig,
    Dataset,
    check_family_loss,
    data_bounds,
    validate_dataset,
)
from .exceptions import DimensionMismatch, InvalidLabel, InvalidParams
from .models import augment, pointwise_loss, risk_and_grad
from .regularizers import check_compatible, make_regularizer, norm_polynomial

WINDOW = 50


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 5000
    step0: float = 1.0
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidParams("max_iters must be a positive integer")
        if not self.step0 > 0:
            raise InvalidParams("step0 must be positive")
        if not self.tol >= 0:
            raise InvalidParams("tol must be nonnegative")


@dataclass(frozen=True, eq=False)
class TrainReport:
    theta_hat: ModelParams
    objective: float
    empirical_loss: float
    regularizer_value: float
    penalty_scale: float
    iterations: int
    converged: bool
    probed: np.ndarray = field(repr=False, default=None)

    def __eq__(self, other):
        if not isinstance(other, TrainReport):
            return NotImplemented
        return (
            self.theta_hat == other.theta_hat
            and self.objective == other.objective
            and self.empirical_loss == other.empirical_loss
            and self.regularizer_value == other.regularizer_value
            and self.penalty_scale == other.penalty_scale
            and self.iterations == other.iterations
            and self.converged == other.converged
        )

    __hash__ = None


def default_regularizer(family, loss) -> Regularizer:
    family, loss = check_family_loss(family, loss)
    if family is Family.LOGISTIC:
        return Regularizer.LOGISTIC
    if loss is Loss.ABSOLUTE:
        return Regularizer.ABSOLUTE_LOSS
    return Regularizer.CONSERVATIVE_LINEAR


def _penalty(cfg: RobustConfig, X, y, norm):
    """Return ``(fn, scale, quad_coef)`` for the penalty term.

    ``fn(theta)`` gives the unscaled regularizer; the objective adds
    ``scale * fn(theta).value``. ``quad_coef`` is the coefficient in front
    of ``||theta||_*^2`` and only feeds the step-size scale.
    """
    if cfg.weights is not None:
        c1, c2 = cfg.weights
        return (lambda th: norm_polynomial(th, c1, c2, norm)), 1.0, c1
    kind = cfg.regularizer
    if kind is Regularizer.NONE or cfg.rho == 0:
        return make_regularizer(Regularizer.NONE), 0.0, 0.0
    d = Dataset(X, y)
    fn = make_regularizer(kind, d, norm, paper_literal_absolute=cfg.paper_literal_absolute)
    quad = 0.0
    if kind in (Regularizer.CONSERVATIVE_LINEAR, Regularizer.TIGHT_LINEAR):
        quad = cfg.rho * (data_bounds(d, norm).X + 1.0)
    elif kind is Regularizer.ABSOLUTE_LOSS and cfg.paper_literal_absolute:
        quad = cfg.rho
    return fn, cfg.rho, quad


def _curvature(Z, loss_kind, quad_coef):
    if loss_kind is Loss.ABSOLUTE:
        smooth = 0.0
    else:
        smooth = float(np.linalg.eigvalsh(Z.T @ Z / Z.shape[0])[-1])
        if loss_kind is Loss.CROSS_ENTROPY:
            smooth /= 4.0
    return max(1.0, smooth + 2.0 * quad_coef)


def train(d, model=("linear", "quadratic"), cfg: RobustConfig | None = None,
          tc: TrainConfig | None = None, norm=NormSpec.L2, record_probes=False) -> TrainReport:
    """Minimise the regularized empirical risk over ``theta``.

    Parameters
    ----------
    d : Dataset
        Training data (already standardized, if desired).
    model : ModelParams or (family, loss)
        Model family and loss; a :class:`ModelParams` only contributes its tags.
    cfg : RobustConfig
        Radius ``rho``, regularizer choice or explicit ``weights``.
    tc : TrainConfig
        Solver settings.
    norm : NormSpec
        Ground norm; the penalty uses its dual.
    record_probes : bool
        Keep every probed ``theta`` and objective on the report (for checks).

    Returns
    -------
    TrainReport
        ``objective == empirical_loss + penalty_scale * regularizer_value``.
    """
    cfg = RobustConfig() if cfg is None else cfg
    tc = TrainConfig() if tc is None else tc
    norm = NormSpec.coerce(norm)
    if isinstance(model, ModelParams):
        family, loss_kind = model.family, model.loss
    else:
        family, loss_kind = check_family_loss(*model)
    if cfg.weights is None:
        check_compatible(cfg.regularizer, loss_kind)
    X, y = validate_dataset(d)
    if loss_kind is Loss.CROSS_ENTROPY and not np.all((y == 0) | (y == 1)):
        raise InvalidLabel("logistic regression needs labels in {0, 1}")
    Z = augment(X)
    reg, scale, quad = _penalty(cfg, X, y, norm)
    step_scale = _curvature(Z, loss_kind, quad)

    def objective(th):
        risk, g_risk = risk_and_grad(th, Z, y, loss_kind)
        r = reg(th)
        return risk + scale * r.value, risk, r.value, g_risk + scale * r.grad_theta

    theta = np.zeros(Z.shape[1])
    obj, risk, rval, grad = objective(theta)
    best = (obj, risk, rval, theta.copy())
    best_hist = [obj]
    probes = [(theta.copy(), obj)] if record_probes else None
    converged = False
    it = 0
    for it in range(1, tc.max_iters + 1):
        theta = theta - (tc.step0 / (np.sqrt(it) * step_scale)) * grad
        obj, risk, rval, grad = objective(theta)
        if not np.isfinite(obj):
            break
        if record_probes:
            probes.append((theta.copy(), obj))
        if obj < best[0]:
            best = (obj, risk, rval, theta.copy())
        best_hist.append(best[0])
        if it >= WINDOW and best_hist[-WINDOW - 1] - best[0] < tc.tol:
            converged = True
            break
    obj, risk, rval, theta = best
    return TrainReport(
        theta_hat=ModelParams(theta, family, loss_kind),
        objective=obj,
        empirical_loss=risk,
        regularizer_value=rval,
        penalty_scale=scale,
        iterations=it,
        converged=converged,
        probed=probes,
    )


def objective_value(theta, d, model, cfg: RobustConfig, norm=NormSpec.L2) -> float:
    """Regularized objective at ``theta``, computed from scratch."""
    X, y = validate_dataset(d)
    family, loss_kind = (model.family, model.loss) if isinstance(model, ModelParams) else check_family_loss(*model)
    m = ModelParams(theta, family, loss_kind)
    reg, scale, _ = _penalty(cfg, X, y, NormSpec.coerce(norm))
    return float(np.mean(pointwise_loss(m, X, y))) + scale * reg(m.theta).value


def evaluate(theta: ModelParams, d) -> float:
    """Sample-average loss of ``theta`` on ``d``."""
    X, y = validate_dataset(d)
    if X.shape[1] != theta.p_x:
        raise DimensionMismatch(f"model expects {theta.p_x} features, data has {X.shape[1]}")
    return float(np.mean(pointwise_loss(theta, X, y)))
