import warnings

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.utils.estimator_checks import parametrize_with_checks

from oracles import normal_equations
from wdro import RobustLinearRegression, RobustLogisticRegression, Standardizer


@parametrize_with_checks([RobustLinearRegression(), RobustLogisticRegression(), Standardizer()])
def test_sklearn_compatible(estimator, check):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        check(estimator)


def test_params_roundtrip():
    est = RobustLinearRegression(rho=0.3, regularizer="tight_linear", norm="l1")
    params = est.get_params()
    assert params["rho"] == 0.3 and params["norm"] == "l1"
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(rho=0.7)
    assert est.rho == 0.7


def test_linear_fit_matches_ols(rng):
    X = rng.normal(size=(120, 3))
    y = X @ [1.0, -2.0, 0.5] + 0.7 + 0.01 * rng.normal(size=120)
    est = RobustLinearRegression().fit(X, y)
    ref = normal_equations(X, y)
    np.testing.assert_allclose(est.coef_, ref[:-1], atol=1e-4)
    assert est.intercept_ == pytest.approx(ref[-1], abs=1e-4)
    assert est.predict(X).shape == (120,)
    assert est.params_.p_x == 3


def test_regularization_shrinks(rng):
    X = rng.normal(size=(100, 2))
    y = X @ [3.0, -1.0] + rng.normal(size=100)
    small = RobustLinearRegression(rho=0.0).fit(X, y)
    big = RobustLinearRegression(rho=0.5).fit(X, y)
    assert np.linalg.norm(big.theta_) < np.linalg.norm(small.theta_)


def test_logistic_labels_and_proba(rng):
    X = rng.normal(size=(200, 2))
    y = np.where(X[:, 0] + 0.3 * rng.normal(size=200) > 0, "yes", "no")
    est = RobustLogisticRegression(rho=0.01).fit(X, y)
    assert list(est.classes_) == ["no", "yes"]
    proba = est.predict_proba(X)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    assert np.mean(est.predict(X) == y) > 0.85


def test_logistic_rejects_multiclass(rng):
    with pytest.raises(ValueError, match="binary"):
        RobustLogisticRegression().fit(rng.normal(size=(6, 2)), [0, 1, 2, 0, 1, 2])


def test_unfitted():
    with pytest.raises(NotFittedError):
        RobustLinearRegression().predict(np.zeros((1, 2)))


def test_standardizer_examples():
    s = Standardizer().fit(np.array([[0.0, 5.0], [2.0, 5.0]]))
    out = s.transform(np.array([[0.0, 5.0], [2.0, 5.0]]))
    np.testing.assert_allclose(out, [[-1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(s.inverse_transform(out)[:, 0], [0.0, 2.0])
