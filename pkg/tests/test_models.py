import math

import numpy as np
import pytest

from oracles import central_difference, loss_value
from wdro.core import ModelParams
from wdro.exceptions import DimensionMismatch, InvalidLabel
from wdro.models import augment, loss, pointwise_loss, predict, risk_and_grad, sigmoid

FAMILIES = [("linear", "quadratic"), ("linear", "absolute"), ("logistic", "cross_entropy")]


def test_intercept_only_prediction(rng):
    m = ModelParams(np.array([0.0, 0.0, 2.5]))
    assert np.allclose(predict(m, rng.normal(size=(5, 2))), 2.5)


def test_logistic_zero_theta():
    m = ModelParams(np.zeros(3), "logistic", "cross_entropy")
    assert predict(m, np.array([[1.0, -4.0]]))[0] == 0.5


def test_dot_product_prediction():
    m = ModelParams(np.array([1.0, 2.0, 3.0]))
    assert predict(m, np.array([[4.0, 5.0]]))[0] == 17.0


def test_perfect_fit_quadratic():
    m = ModelParams(np.array([1.0, 2.0, 3.0]))
    ev = loss(m, [4.0, 5.0], 17.0)
    assert ev.value == 0.0 and np.all(ev.grad_x == 0) and ev.grad_y == 0


def test_logistic_zero_theta_loss():
    m = ModelParams(np.zeros(3), "logistic", "cross_entropy")
    ev = loss(m, [0.3, -1.2], 1)
    assert ev.value == pytest.approx(math.log(2)) and ev.grad_y == 0.0


def test_logistic_labels_checked():
    m = ModelParams(np.zeros(2), "logistic", "cross_entropy")
    with pytest.raises(InvalidLabel):
        pointwise_loss(m, np.zeros((2, 1)), np.array([0.0, 0.5]))


def test_feature_width_checked():
    with pytest.raises(DimensionMismatch):
        loss(ModelParams(np.zeros(3)), [1.0], 0.0)


def test_sigmoid_extremes():
    s = sigmoid(np.array([-800.0, 0.0, 800.0]))
    assert np.all(np.isfinite(s)) and s[1] == 0.5


def test_cross_entropy_clamped():
    m = ModelParams(np.array([0.0, 100.0]), "logistic", "cross_entropy")
    v = pointwise_loss(m, np.zeros((1, 1)), np.array([0.0]))[0]
    assert v == pytest.approx(-math.log(1e-12))


def _instances(rng, family, loss_kind, count):
    out = []
    while len(out) < count:
        p_x = int(rng.integers(1, 6))
        theta = rng.normal(size=p_x + 1)
        x = rng.normal(size=p_x)
        y = float(rng.integers(0, 2)) if family == "logistic" else float(rng.normal() * 2)
        t = float(augment(x) @ theta)
        if loss_kind == "absolute" and abs(t - y) < 1e-3:
            continue
        out.append((theta, x, y))
    return out


@pytest.mark.parametrize("family,loss_kind", FAMILIES)
def test_gradients_match_central_differences(rng, family, loss_kind):
    for theta, x, y in _instances(rng, family, loss_kind, 120):
        m = ModelParams(theta, family, loss_kind)
        ev = loss(m, x, y)
        assert ev.value == pytest.approx(loss_value(theta, x, y, loss_kind), rel=1e-12, abs=1e-14)
        g_t = central_difference(lambda th: loss_value(th, x, y, loss_kind), theta)
        g_x = central_difference(lambda xx: loss_value(theta, xx, y, loss_kind), x)
        g_y = central_difference(lambda yy: loss_value(theta, x, yy[0], loss_kind), [y])[0]
        np.testing.assert_allclose(ev.grad_theta, g_t, rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(ev.grad_x, g_x, rtol=1e-5, atol=1e-7)
        assert ev.grad_y == pytest.approx(g_y, rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("family,loss_kind", FAMILIES)
def test_risk_gradient(rng, family, loss_kind):
    X = rng.normal(size=(30, 3))
    y = (rng.uniform(size=30) < 0.5).astype(float) if family == "logistic" else rng.normal(size=30)
    Z = augment(X)
    theta = rng.normal(size=4)
    from wdro.core import Loss

    val, grad = risk_and_grad(theta, Z, y, Loss(loss_kind))
    assert val == pytest.approx(np.mean([loss_value(theta, xi, yi, loss_kind) for xi, yi in zip(X, y)]))
    fd = central_difference(lambda th: risk_and_grad(th, Z, y, Loss(loss_kind))[0], theta)
    np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-7)
