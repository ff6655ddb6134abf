"""Linear and logistic regression: predictions, losses and exact gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import Family, Loss, ModelParams
from .exceptions import DimensionMismatch, InvalidLabel

PROB_CLIP = 1e-12
_MAX_NLL = -np.log(PROB_CLIP)
_MIN_NLL = -np.log1p(-PROB_CLIP)


@dataclass(frozen=True)
class LossEval:
    value: float
    grad_theta: np.ndarray
    grad_x: np.ndarray
    grad_y: float


def augment(X) -> np.ndarray:
    """Append the constant intercept column: ``[x; 1]``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return np.append(X, 1.0)
    return np.column_stack([X, np.ones(X.shape[0])])


def sigmoid(t):
    out = expit(np.asarray(t, dtype=float))
    return out if out.ndim else float(out)


def _check_x(m: ModelParams, X):
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != m.p_x:
        raise DimensionMismatch(f"model expects {m.p_x} features, got {X.shape[-1]}")
    return X


def decision(m: ModelParams, X):
    """Linear score ``theta^T [x; 1]``."""
    X = _check_x(m, X)
    return X @ m.coef + m.intercept


def predict(m: ModelParams, X):
    """Model output: the linear score, or its sigmoid for logistic models."""
    t = decision(m, X)
    if m.family is Family.LOGISTIC:
        return sigmoid(t)
    return t


def _nll(t, y):
    """Cross-entropy with the probability clamped to ``[1e-12, 1 - 1e-12]``."""
    neg_log_p = np.clip(np.logaddexp(0.0, -t), _MIN_NLL, _MAX_NLL)
    neg_log_1mp = np.clip(np.logaddexp(0.0, t), _MIN_NLL, _MAX_NLL)
    return y * neg_log_p + (1.0 - y) * neg_log_1mp


def _check_labels(m, y):
    if m.loss is Loss.CROSS_ENTROPY and not np.all((y == 0) | (y == 1)):
        raise InvalidLabel("logistic regression needs labels in {0, 1}")


def loss(m: ModelParams, x, y) -> LossEval:
    """Loss value and its gradients in ``theta``, ``x`` and ``y`` at one point.

    The absolute loss uses the subgradient ``sign(r)`` with ``sign(0) = 0``.
    For the cross-entropy the ``y``-gradient is that of the loss extended
    linearly in ``y``, i.e. ``-theta^T [x; 1]``.
    """
    x = _check_x(m, np.asarray(x, dtype=float).ravel())
    y = float(y)
    _check_labels(m, np.array([y]))
    z = augment(x)
    t = float(z @ m.theta)
    w = m.coef
    if m.loss is Loss.QUADRATIC:
        r = t - y
        return LossEval(0.5 * r * r, r * z, r * w, -r)
    if m.loss is Loss.ABSOLUTE:
        r = t - y
        s = float(np.sign(r))
        return LossEval(abs(r), s * z, s * w, -s)
    s = sigmoid(t)
    value = float(_nll(t, y))
    return LossEval(value, (s - y) * z, (s - y) * w, -t)


def pointwise_loss(m: ModelParams, X, y) -> np.ndarray:
    """Per-record loss values."""
    X = np.atleast_2d(_check_x(m, X))
    y = np.asarray(y, dtype=float).ravel()
    _check_labels(m, y)
    t = X @ m.coef + m.intercept
    if m.loss is Loss.QUADRATIC:
        return 0.5 * (t - y) ** 2
    if m.loss is Loss.ABSOLUTE:
        return np.abs(t - y)
    return _nll(t, y)


def risk_and_grad(theta, Z, y, loss_kind: Loss):
    """Sample-average loss and its (sub)gradient in ``theta``.

    ``Z`` is the augmented design matrix ``[X, 1]``.
    """
    t = Z @ theta
    n = Z.shape[0]
    if loss_kind is Loss.QUADRATIC:
        r = t - y
        return 0.5 * float(r @ r) / n, Z.T @ r / n
    if loss_kind is Loss.ABSOLUTE:
        r = t - y
        return float(np.abs(r).sum()) / n, Z.T @ np.sign(r) / n
    return float(_nll(t, y).sum()) / n, Z.T @ (sigmoid(t) - y) / n
