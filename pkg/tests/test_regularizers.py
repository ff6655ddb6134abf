import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import bounds_scan, central_difference, tight_scan
from wdro.core import DataBounds, Dataset, ModelParams, NormSpec, data_bounds
from wdro.exceptions import DegeneratePair, IncompatibleRegularizer
from wdro.regularizers import (
    absolute_linear,
    all_pairs,
    check_compatible,
    conservative_linear,
    empirical_lipschitz,
    logistic_reg,
    make_regularizer,
    norm_polynomial,
    project_features,
    tight_linear,
)

thetas = arrays(np.float64, 4, elements=st.floats(-5, 5))


def test_tight_zero_theta(rng):
    d = Dataset(rng.normal(size=(5, 3)), rng.normal(size=5))
    assert tight_linear(np.zeros(4), d).value == 0.0


def test_tight_unit_case():
    d = Dataset(np.array([[1.0]]), np.array([0.0]))
    assert tight_linear(np.array([1.0, 0.0]), d, NormSpec.L2).value == pytest.approx(1.0)


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_tight_matches_scan(rng, norm):
    for _ in range(20):
        X, y = rng.normal(size=(12, 3)), rng.normal(size=12)
        theta = rng.normal(size=4)
        assert tight_linear(theta, Dataset(X, y), norm).value == pytest.approx(tight_scan(theta, X, y, norm),
                                                                              rel=1e-12)


def test_conservative_examples():
    b0 = DataBounds(0.0, 0.0)
    assert conservative_linear(np.zeros(3), b0).value == 0.0
    assert conservative_linear(np.array([0.6, 0.8, 0.0]), b0).value == pytest.approx(1.0)


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_conservative_dominates_tight(rng, norm):
    for _ in range(50):
        X, y = rng.normal(size=(10, 3)) * rng.uniform(0.1, 5), rng.normal(size=10) * rng.uniform(0.1, 5)
        d = Dataset(X, y)
        theta = rng.normal(size=4) * rng.uniform(0.1, 3)
        bx, by = bounds_scan(X, y, norm)
        cons = (bx + 1) * NormSpec.coerce(norm).dual_norm(theta) ** 2 + by * NormSpec.coerce(norm).dual_norm(theta)
        assert conservative_linear(theta, data_bounds(d, norm), norm).value == pytest.approx(cons, rel=1e-12)
        assert tight_linear(theta, d, norm).value <= cons + 1e-9


def test_absolute_examples():
    assert absolute_linear(np.zeros(3)).value == 0.0
    assert absolute_linear(np.array([3.0, 4.0, 0.0]), NormSpec.L2).value == pytest.approx(5.0)
    assert absolute_linear(np.array([1.0, -1.0, 2.0]), NormSpec.L1).value == pytest.approx(2.0)
    assert absolute_linear(np.array([3.0, 4.0, 0.0]), paper_literal=True).value == pytest.approx(25.0)


def test_logistic_examples():
    assert logistic_reg(np.zeros(3), DataBounds(1.0, 1.0)).value == 0.0
    assert logistic_reg(np.array([1.0, 0.0]), DataBounds(0.0, 1.0)).value == pytest.approx(3.0)


def test_logistic_value_from_bounds(rng):
    X = rng.normal(size=(50, 4))
    y = (rng.uniform(size=50) < 0.3).astype(float)
    theta = rng.normal(size=5)
    bx, by = bounds_scan(X, y)
    assert logistic_reg(theta, data_bounds(Dataset(X, y))).value == pytest.approx(
        (by + bx + 2) * np.linalg.norm(theta), rel=1e-12)


def test_project_features():
    assert np.array_equal(project_features([1.0, 2.0, 3.0]), [1.0, 2.0, 0.0])


@settings(max_examples=100)
@given(thetas, thetas, st.floats(0, 1))
def test_convex_regularizers(a, b, t):
    bounds = DataBounds(2.0, 3.0)
    mid = t * a + (1 - t) * b
    for fn in (lambda th: conservative_linear(th, bounds).value,
               lambda th: absolute_linear(th).value,
               lambda th: logistic_reg(th, bounds).value,
               lambda th: norm_polynomial(th, 0.5, 0.2).value):
        assert fn(mid) <= t * fn(a) + (1 - t) * fn(b) + 1e-9 * (1 + abs(fn(a)) + abs(fn(b)))


def test_tight_is_not_convex():
    # residual and ||W theta|| both vary with the slope, giving |s| * |s - 1|
    d = Dataset(np.array([[1.0]]), np.array([1.0]))
    vals = [tight_linear(np.array([s, 0.0]), d).value for s in (0.0, 0.5, 1.0)]
    assert vals[1] > 0.5 * (vals[0] + vals[2])


@pytest.mark.parametrize("kind", ["conservative", "absolute", "logistic", "tight"])
def test_regularizer_gradients(rng, kind):
    bounds = DataBounds(1.5, 2.0)
    d = Dataset(rng.normal(size=(8, 3)), rng.normal(size=8))
    fn = {
        "conservative": lambda th: conservative_linear(th, bounds),
        "absolute": lambda th: absolute_linear(th),
        "logistic": lambda th: logistic_reg(th, bounds),
        "tight": lambda th: tight_linear(th, d),
    }[kind]
    for _ in range(30):
        theta = rng.normal(size=4)
        fd = central_difference(lambda th: fn(th).value, theta)
        np.testing.assert_allclose(fn(theta).grad_theta, fd, rtol=1e-5, atol=1e-6)


def test_compatibility():
    check_compatible("conservative_linear", "quadratic")
    with pytest.raises(IncompatibleRegularizer):
        check_compatible("logistic", "quadratic")
    with pytest.raises(IncompatibleRegularizer):
        check_compatible("absolute_loss", "cross_entropy")


def test_make_regularizer_none():
    ev = make_regularizer("none")(np.ones(3))
    assert ev.value == 0.0 and np.all(ev.grad_theta == 0)


def test_lipschitz_constant_loss_is_zero():
    m = ModelParams(np.zeros(3), "logistic", "cross_entropy")
    pairs = [(([0.0, 1.0], 1.0), ([2.0, -1.0], 1.0)), (([1.0, 1.0], 0.0), ([0.0, 0.0], 0.0))]
    assert empirical_lipschitz(m, pairs) == 0.0


def test_lipschitz_ratio_definition():
    m = ModelParams(np.array([2.0, 0.0]), "linear", "absolute")
    assert empirical_lipschitz(m, [(([0.0], 0.0), ([1.0], 0.0))]) == pytest.approx(2.0)


def test_lipschitz_degenerate_pair():
    m = ModelParams(np.array([2.0, 0.0]))
    with pytest.raises(DegeneratePair):
        empirical_lipschitz(m, [(([1.0], 0.0), ([1.0], 0.0))])


def test_lipschitz_no_pairs():
    assert empirical_lipschitz(ModelParams(np.array([1.0, 0.0])), all_pairs(np.zeros((1, 2)))) == 0.0


def _hull(points, k, rng):
    return rng.dirichlet(np.ones(points.shape[0]) * 0.5, size=k) @ points


def test_bounds_hold_when_only_features_vary(rng):
    """Closed forms dominate sampled ratios for pairs sharing the output."""
    for _ in range(50):
        X, y = rng.normal(size=(10, 3)), rng.normal(size=10)
        d = Dataset(X, y)
        theta = rng.normal(size=4)
        U, V = _hull(d.points, 200, rng), _hull(d.points, 200, rng)
        V[:, -1] = U[:, -1]
        quad = empirical_lipschitz(ModelParams(theta), (U, V))
        absl = empirical_lipschitz(ModelParams(theta, "linear", "absolute"), (U, V))
        assert quad <= tight_linear(theta, d).value + 1e-9
        assert absl <= absolute_linear(theta).value + 1e-9
        yb = (rng.uniform(size=10) < 0.5).astype(float)
        db = Dataset(X, yb)
        U, V = _hull(db.points, 200, rng), _hull(db.points, 200, rng)
        U[:, -1] = rng.integers(0, 2, 200)
        V[:, -1] = rng.integers(0, 2, 200)
        logi = empirical_lipschitz(ModelParams(theta, "logistic", "cross_entropy"), (U, V))
        assert logi <= logistic_reg(theta, data_bounds(db)).value + 1e-9


def test_linear_forms_ignore_output_direction():
    """The linear-family closed forms bound the feature direction only.

    Moving ``y`` alone by 1 changes the absolute loss by 1 while
    ``||theta||_*`` can be arbitrarily small.
    """
    m = ModelParams(np.array([0.1, 0.0]), "linear", "absolute")
    emp = empirical_lipschitz(m, [(([0.0], 0.0), ([0.0], 1.0))])
    assert emp == pytest.approx(1.0)
    assert emp > absolute_linear(m.theta).value
