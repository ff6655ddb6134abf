"""scikit-learn compatible estimators wrapping :func:`wdro.training.train`."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin, TransformerMixin
from sklearn.preprocessing import LabelEncoder
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import Dataset, ModelParams, NormSpec, Regularizer, RobustConfig
from .models import decision, sigmoid
from .training import TrainConfig, train


class _RobustBase(BaseEstimator):
    _family = None

    def _configs(self):
        cfg = RobustConfig(
            rho=self.rho,
            regularizer=Regularizer(self.regularizer),
            weights=self.weights,
            paper_literal_absolute=self.paper_literal_absolute,
        )
        tc = TrainConfig(max_iters=self.max_iter, step0=self.step0, tol=self.tol,
                         seed=self.random_state)
        return cfg, tc

    def _fit(self, X, y):
        cfg, tc = self._configs()
        self.report_ = train(Dataset(X, y), (self._family, self.loss), cfg, tc,
                             NormSpec.coerce(self.norm))
        theta = self.report_.theta_hat.theta
        self.theta_ = np.array(theta)
        self.coef_ = self.theta_[:-1].copy()
        self.intercept_ = float(self.theta_[-1])
        self.n_iter_ = self.report_.iterations
        self.objective_ = self.report_.objective
        return self

    @property
    def params_(self) -> ModelParams:
        check_is_fitted(self, "theta_")
        return ModelParams(self.theta_, self._family, self.loss)

    def _decision(self, X):
        check_is_fitted(self, "theta_")
        X = validate_data(self, X, reset=False)
        return decision(self.params_, X)


class RobustLinearRegression(RegressorMixin, _RobustBase):
    """Linear regression trained on ``mean loss + rho * L(theta)``.

    Parameters
    ----------
    rho : float
        Wasserstein radius multiplying the regularizer.
    regularizer : str
        ``"conservative_linear"``, ``"tight_linear"``, ``"absolute_loss"`` or ``"none"``.
    loss : str
        ``"quadratic"`` or ``"absolute"``.
    norm : str
        Ground norm on the data (``"l1"``, ``"l2"``, ``"linf"``); the penalty uses its dual.
    weights : tuple or None
        ``(c1, c2)`` to use ``c1 ||theta||_*^2 + c2 ||theta||_*`` instead of ``rho * L(theta)``.
    """

    _family = "linear"

    def __init__(self, rho=0.0, regularizer="conservative_linear", loss="quadratic", norm="l2",
                 weights=None, max_iter=5000, step0=1.0, tol=1e-8, random_state=0,
                 paper_literal_absolute=False):
        self.rho = rho
        self.regularizer = regularizer
        self.loss = loss
        self.norm = norm
        self.weights = weights
        self.max_iter = max_iter
        self.step0 = step0
        self.tol = tol
        self.random_state = random_state
        self.paper_literal_absolute = paper_literal_absolute

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        return self._fit(X, y)

    def predict(self, X):
        return self._decision(X)


class RobustLogisticRegression(ClassifierMixin, _RobustBase):
    """Binary logistic regression with the ``(Y + X + 2) ||theta||_*`` regularizer.

    Class labels are encoded to ``{0, 1}`` in sorted order.
    """

    _family = "logistic"

    def __init__(self, rho=0.0, regularizer="logistic", norm="l2", weights=None,
                 max_iter=5000, step0=1.0, tol=1e-8, random_state=0):
        self.rho = rho
        self.regularizer = regularizer
        self.norm = norm
        self.weights = weights
        self.max_iter = max_iter
        self.step0 = step0
        self.tol = tol
        self.random_state = random_state

    loss = "cross_entropy"
    paper_literal_absolute = False

    def fit(self, X, y):
        X, y = validate_data(self, X, y)
        check_classification_targets(y)
        enc = LabelEncoder().fit(y)
        if enc.classes_.size != 2:
            raise ValueError(f"Only binary classification is supported; got {enc.classes_.size} classes")
        self.classes_ = enc.classes_
        return self._fit(X, enc.transform(y).astype(float))

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.classifier_tags.multi_class = False
        return tags

    def decision_function(self, X):
        return self._decision(X)

    def predict_proba(self, X):
        p = sigmoid(self._decision(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        t = self._decision(X)
        return self.classes_[(t > 0).astype(int)]


class Standardizer(TransformerMixin, BaseEstimator):
    """Per-column standardization with the population variance.

    Columns with zero variance are mapped to zero.
    """

    def fit(self, X, y=None):
        X = validate_data(self, X)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.constant_ = std == 0
        self.scale_ = np.where(self.constant_, 1.0, std)
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = validate_data(self, X, reset=False)
        out = (X - self.mean_) / self.scale_
        out[:, self.constant_] = 0.0
        return out

    def inverse_transform(self, X):
        check_is_fitted(self, "mean_")
        X = np.asarray(X, dtype=float)
        return X * self.scale_ + self.mean_
