"""Lipschitz-constant regularizers ``L(theta)`` and an empirical verifier.

Every regularizer is a function of the dual norm of ``theta`` (or of its
feature block ``W theta``, the parameter vector with the intercept
coordinate zeroed) and returns a value together with a subgradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataBounds, NormSpec, Regularizer, data_bounds, validate_dataset
from .exceptions import DegeneratePair, DimensionMismatch, IncompatibleRegularizer
from .models import augment, pointwise_loss

PAIR_TOL = 1e-12


@dataclass(frozen=True)
class RegularizerEval:
    value: float
    grad_theta: np.ndarray


def project_features(theta) -> np.ndarray:
    """``W theta``: ``theta`` with its intercept coordinate set to zero."""
    w = np.array(theta, dtype=float)
    w[-1] = 0.0
    return w


def _dual(theta, norm):
    norm = NormSpec.coerce(norm)
    theta = np.asarray(theta, dtype=float)
    return float(norm.dual_norm(theta)), norm.dual_norm_subgradient(theta)


def tight_linear(theta, d, norm=NormSpec.L2) -> RegularizerEval:
    """Largest training residual times ``||W theta||_*``.

    The maximum over the data domain is replaced by the maximum over the
    records of ``d``; the subgradient uses the first record attaining it.
    """
    X, y = validate_dataset(d)
    theta = np.asarray(theta, dtype=float)
    if theta.size != X.shape[1] + 1:
        raise DimensionMismatch(f"theta has length {theta.size}, expected {X.shape[1] + 1}")
    Z = augment(X)
    r = Z @ theta - y
    k = int(np.argmax(np.abs(r)))
    big_r = float(abs(r[k]))
    n_w, g_w = _dual(project_features(theta), norm)
    g_w[-1] = 0.0
    grad = np.sign(r[k]) * Z[k] * n_w + big_r * g_w
    return RegularizerEval(big_r * n_w, grad)


def conservative_linear(theta, bounds: DataBounds, norm=NormSpec.L2) -> RegularizerEval:
    """``(X + 1) ||theta||_*^2 + Y ||theta||_*``, an upper bound of :func:`tight_linear`."""
    n_t, g = _dual(theta, norm)
    value = (bounds.X + 1.0) * n_t**2 + bounds.Y * n_t
    return RegularizerEval(value, (2.0 * (bounds.X + 1.0) * n_t + bounds.Y) * g)


def absolute_linear(theta, norm=NormSpec.L2, paper_literal=False) -> RegularizerEval:
    """``||theta||_*`` for the absolute loss.

    With ``paper_literal=True`` the squared norm ``||theta||_*^2`` is used.
    """
    n_t, g = _dual(theta, norm)
    if paper_literal:
        return RegularizerEval(n_t**2, 2.0 * n_t * g)
    return RegularizerEval(n_t, g)


def logistic_reg(theta, bounds: DataBounds, norm=NormSpec.L2) -> RegularizerEval:
    """``(Y + X + 2) ||theta||_*`` for logistic regression."""
    n_t, g = _dual(theta, norm)
    scale = bounds.Y + bounds.X + 2.0
    return RegularizerEval(scale * n_t, scale * g)


def norm_polynomial(theta, c1, c2, norm=NormSpec.L2) -> RegularizerEval:
    """Explicitly weighted penalty ``c1 ||theta||_*^2 + c2 ||theta||_*``."""
    n_t, g = _dual(theta, norm)
    return RegularizerEval(c1 * n_t**2 + c2 * n_t, (2.0 * c1 * n_t + c2) * g)


_COMPATIBLE = {
    Regularizer.TIGHT_LINEAR: ("quadratic",),
    Regularizer.CONSERVATIVE_LINEAR: ("quadratic",),
    Regularizer.ABSOLUTE_LOSS: ("absolute",),
    Regularizer.LOGISTIC: ("cross_entropy",),
    Regularizer.NONE: ("quadratic", "absolute", "cross_entropy"),
}


def check_compatible(kind, loss) -> None:
    kind = Regularizer(kind)
    loss_name = getattr(loss, "value", loss)
    if loss_name not in _COMPATIBLE[kind]:
        raise IncompatibleRegularizer(f"regularizer {kind.value} does not apply to {loss_name} loss")


def make_regularizer(kind, d=None, norm=NormSpec.L2, bounds=None, paper_literal_absolute=False):
    """Return ``theta -> RegularizerEval`` for the regularizer ``kind``.

    ``bounds`` default to :func:`~wdro.core.data_bounds` of ``d``.
    """
    kind = Regularizer(kind)
    norm = NormSpec.coerce(norm)
    if kind in (Regularizer.CONSERVATIVE_LINEAR, Regularizer.LOGISTIC) and bounds is None:
        bounds = data_bounds(d, norm)
    if kind is Regularizer.TIGHT_LINEAR:
        return lambda th: tight_linear(th, d, norm)
    if kind is Regularizer.CONSERVATIVE_LINEAR:
        return lambda th: conservative_linear(th, bounds, norm)
    if kind is Regularizer.ABSOLUTE_LOSS:
        return lambda th: absolute_linear(th, norm, paper_literal_absolute)
    if kind is Regularizer.LOGISTIC:
        return lambda th: logistic_reg(th, bounds, norm)
    return lambda th: RegularizerEval(0.0, np.zeros_like(np.asarray(th, dtype=float)))


def empirical_lipschitz(m, sample_pairs, norm=NormSpec.L2, theta=None) -> float:
    """Largest observed ``|l(u) - l(v)| / ||u - v||`` over pairs of points.

    Parameters
    ----------
    m : ModelParams
        Model whose loss is probed; ``theta`` replaces ``m.theta`` if given.
    sample_pairs : sequence of ((x, y), (x', y'))
        Or two ``(k, p_x + 1)`` arrays of stacked ``(x, y)`` points.

    Returns
    -------
    float
        A lower bound on the Lipschitz constant of the loss in ``(x, y)``.
    """
    norm = NormSpec.coerce(norm)
    if theta is not None:
        m = m.with_theta(theta)
    U, V = _stack_pairs(sample_pairs)
    if U.shape[0] == 0:
        return 0.0
    if U.shape[1] != m.p_x + 1:
        raise DimensionMismatch(f"pair points must live in R^{m.p_x + 1}")
    dist = norm(U - V, axis=1)
    if np.any(dist < PAIR_TOL):
        raise DegeneratePair(f"pair {int(np.argmin(dist))} has (near-)zero distance")
    lu = pointwise_loss(m, U[:, :-1], U[:, -1])
    lv = pointwise_loss(m, V[:, :-1], V[:, -1])
    return float(np.max(np.abs(lu - lv) / dist))


def _stack_pairs(sample_pairs):
    if isinstance(sample_pairs, tuple) and len(sample_pairs) == 2 and isinstance(sample_pairs[0], np.ndarray) \
            and sample_pairs[0].ndim == 2:
        U, V = sample_pairs
        return np.asarray(U, dtype=float), np.asarray(V, dtype=float)
    U, V = [], []
    for (x, y), (x2, y2) in sample_pairs:
        U.append(np.append(np.asarray(x, dtype=float).ravel(), float(y)))
        V.append(np.append(np.asarray(x2, dtype=float).ravel(), float(y2)))
    if not U:
        return np.zeros((0, 0)), np.zeros((0, 0))
    return np.vstack(U), np.vstack(V)


def all_pairs(points):
    """Every unordered pair of distinct rows of ``points`` as ``(U, V)``."""
    points = np.asarray(points, dtype=float)
    i, j = np.triu_indices(points.shape[0], k=1)
    return points[i], points[j]
