"""Domain types shared across the package.

A :class:`Dataset` stores the features as an ``(n, p_x)`` array and the
single output as an ``(n,)`` array. The intercept is never stored; models
append the constant ``1`` themselves so that ground distances are always
measured on the raw ``(x, y)`` points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .exceptions import (
    DimensionMismatch,
    EmptyDataset,
    InvalidParams,
    NonFiniteValue,
)


class NormSpec(enum.Enum):
    """Ground norm on the data space, paired with its dual."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def coerce(cls, value) -> "NormSpec":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParams(f"unknown norm {value!r}; expected one of l1, l2, linf") from None

    @property
    def dual(self) -> "NormSpec":
        return _DUALS[self]

    @property
    def order(self) -> float:
        return _ORDERS[self]

    def __call__(self, v, axis=-1):
        """Norm of ``v`` along ``axis``."""
        return np.linalg.norm(np.asarray(v, dtype=float), ord=self.order, axis=axis)

    def dual_norm(self, v, axis=-1):
        return self.dual(v, axis=axis)

    def dual_norm_subgradient(self, v) -> np.ndarray:
        """A subgradient of ``v -> ||v||_*`` for a 1-D vector.

        Returns zero at ``v = 0`` (the minimal-norm subgradient).
        """
        v = np.asarray(v, dtype=float)
        g = np.zeros_like(v)
        dual = self.dual
        if dual is NormSpec.L2:
            nrm = np.linalg.norm(v)
            if nrm > 0:
                g = v / nrm
        elif dual is NormSpec.L1:
            g = np.sign(v)
        else:
            amax = np.max(np.abs(v)) if v.size else 0.0
            if amax > 0:
                # lowest index among the ties
                k = int(np.argmax(np.abs(v)))
                g[k] = np.sign(v[k])
        return g


_DUALS = {NormSpec.L1: NormSpec.LINF, NormSpec.L2: NormSpec.L2, NormSpec.LINF: NormSpec.L1}
_ORDERS = {NormSpec.L1: 1, NormSpec.L2: 2, NormSpec.LINF: np.inf}


@dataclass(frozen=True)
class Record:
    """One data point ``(x, y)``."""

    x: np.ndarray
    y: float

    def __post_init__(self):
        x = np.array(self.x, dtype=float, ndmin=1)
        if x.ndim != 1:
            raise DimensionMismatch("record features must be a 1-D vector")
        if x.size < 1:
            raise DimensionMismatch("record needs at least one feature (p_x >= 1)")
        y = np.asarray(self.y, dtype=float)
        if y.size != 1:
            raise DimensionMismatch(
                f"only scalar outputs are supported (p_y = 1), got {y.size} outputs"
            )
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", float(y.reshape(())))

    @property
    def point(self) -> np.ndarray:
        """The concatenated point ``(x, y)`` in R^{p_x + 1}."""
        return np.append(self.x, self.y)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Finite, dimension-homogeneous collection of records.

    Construction validates the data; see :func:`validate_dataset`.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X, y = validate_dataset(self.X, self.y)
        X = X.copy()
        y = y.copy()
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_records(cls, records: Sequence[Record]) -> "Dataset":
        records = list(records)
        if not records:
            raise EmptyDataset("dataset has no records")
        widths = {r.x.size for r in records}
        if len(widths) != 1:
            raise DimensionMismatch(f"records have differing feature counts {sorted(widths)}")
        return cls(np.vstack([r.x for r in records]), np.array([r.y for r in records]))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p_x(self) -> int:
        return self.X.shape[1]

    @property
    def points(self) -> np.ndarray:
        """``(n, p_x + 1)`` array of stacked ``(x, y)`` points."""
        return np.column_stack([self.X, self.y])

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[Record]:
        for xi, yi in zip(self.X, self.y):
            yield Record(xi, yi)

    def __getitem__(self, idx) -> Record:
        return Record(self.X[idx], self.y[idx])

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.X[indices], self.y[indices])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y)

    __hash__ = None


def validate_dataset(X, y=None):
    """Check a dataset and return ``(X, y)`` as float arrays.

    ``X`` may be a :class:`Dataset`, a sequence of :class:`Record`, or a
    2-D array (in which case ``y`` is required).

    Raises
    ------
    EmptyDataset, DimensionMismatch, NonFiniteValue
    """
    if isinstance(X, Dataset):
        return X.X, X.y
    if y is None:
        records = list(X)
        if not records:
            raise EmptyDataset("dataset has no records")
        if not all(isinstance(r, Record) for r in records):
            raise DimensionMismatch("pass either Records or an (X, y) pair")
        widths = {r.x.size for r in records}
        if len(widths) != 1:
            raise DimensionMismatch(f"records have differing feature counts {sorted(widths)}")
        X = np.vstack([r.x for r in records])
        y = np.array([r.y for r in records])
    try:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"dataset is not rectangular: {exc}") from None
    if X.ndim == 0 or X.shape[0] == 0:
        raise EmptyDataset("dataset has no records")
    if X.ndim != 2:
        raise DimensionMismatch(f"features must be 2-D (n, p_x), got shape {X.shape}")
    if X.shape[1] < 1:
        raise DimensionMismatch("p_x must be at least 1")
    if y.ndim == 2 and y.shape[1] == 1:
        y = y[:, 0]
    if y.ndim != 1:
        raise DimensionMismatch(
            f"only scalar outputs are supported (p_y = 1), got output shape {y.shape}"
        )
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} feature rows but {y.shape[0]} outputs")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        bad = np.flatnonzero(~(np.isfinite(X).all(axis=1) & np.isfinite(y)))
        raise NonFiniteValue(f"non-finite values in record(s) {bad[:10].tolist()}")
    return X, y


@dataclass(frozen=True)
class DataBounds:
    """Largest feature norm ``X`` and largest absolute output ``Y``."""

    X: float
    Y: float

    def __post_init__(self):
        if not (self.X >= 0 and self.Y >= 0):
            raise InvalidParams("data bounds must be nonnegative")


def data_bounds(d, norm=NormSpec.L2) -> DataBounds:
    """Exact ``max_i ||x_i||`` and ``max_i |y_i|`` over a dataset."""
    X, y = validate_dataset(d)
    norm = NormSpec.coerce(norm)
    return DataBounds(X=float(np.max(norm(X, axis=1))), Y=float(np.max(np.abs(y))))


class Family(enum.Enum):
    LINEAR = "linear"
    LOGISTIC = "logistic"


class Loss(enum.Enum):
    QUADRATIC = "quadratic"
    ABSOLUTE = "absolute"
    CROSS_ENTROPY = "cross_entropy"


_ALLOWED_LOSSES = {
    Family.LINEAR: (Loss.QUADRATIC, Loss.ABSOLUTE),
    Family.LOGISTIC: (Loss.CROSS_ENTROPY,),
}


def check_family_loss(family, loss):
    family = Family(family)
    loss = Loss(loss)
    if loss not in _ALLOWED_LOSSES[family]:
        raise InvalidParams(f"{family.value} models cannot be paired with {loss.value} loss")
    return family, loss


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Parameter vector ``theta`` (intercept last) with its model and loss tags."""

    theta: np.ndarray
    family: Family = Family.LINEAR
    loss: Loss = Loss.QUADRATIC

    def __post_init__(self):
        family, loss = check_family_loss(self.family, self.loss)
        theta = np.array(self.theta, dtype=float, ndmin=1)
        if theta.ndim != 1 or theta.size < 2:
            raise DimensionMismatch("theta must be a vector of length p_x + 1 >= 2")
        if not np.all(np.isfinite(theta)):
            raise NonFiniteValue("theta has non-finite entries")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "loss", loss)

    @property
    def p_x(self) -> int:
        return self.theta.size - 1

    @property
    def coef(self) -> np.ndarray:
        return self.theta[:-1]

    @property
    def intercept(self) -> float:
        return float(self.theta[-1])

    def with_theta(self, theta) -> "ModelParams":
        return ModelParams(theta, self.family, self.loss)

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (
            self.family is other.family
            and self.loss is other.loss
            and np.array_equal(self.theta, other.theta)
        )

    __hash__ = None


class Regularizer(enum.Enum):
    TIGHT_LINEAR = "tight_linear"
    CONSERVATIVE_LINEAR = "conservative_linear"
    ABSOLUTE_LOSS = "absolute_loss"
    LOGISTIC = "logistic"
    NONE = "none"


@dataclass(frozen=True)
class ConcentrationParams:
    """Constants of the finite-sample Wasserstein concentration bound.

    ``c1`` and ``c2`` are user-supplied (or calibrated); ``a`` is the
    light-tail exponent, ``p`` the data dimension ``p_x + p_y`` and
    ``gamma`` the confidence level.
    """

    c1: float
    c2: float
    a: float
    p: int
    gamma: float

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise InvalidParams("c1 and c2 must be positive")
        if not self.a > 1:
            raise InvalidParams("the light-tail exponent a must exceed 1")
        if int(self.p) != self.p or self.p < 1:
            raise InvalidParams("p must be a positive integer")
        if self.p == 2:
            raise InvalidParams(
                "the concentration bound holds only for p = p_x + p_y != 2; "
                "p = 2 is excluded"
            )
        if not 0 < self.gamma < 1:
            raise InvalidParams("gamma must lie in (0, 1)")
        object.__setattr__(self, "p", int(self.p))


@dataclass(frozen=True)
class RobustConfig:
    """Ambiguity radius, poison ratio and the regularizer in force.

    ``weights`` optionally replaces ``rho * L(theta)`` by the explicit
    ``c1 * ||theta||_*^2 + c2 * ||theta||_*`` parametrisation used when
    sweeping regularization strengths. ``paper_literal_absolute`` switches
    the absolute-loss term from ``rho ||theta||_*`` to ``rho ||theta||_*^2``.
    """

    rho: float = 0.0
    beta: float = 0.0
    regularizer: Regularizer = Regularizer.NONE
    concentration: Optional[ConcentrationParams] = None
    weights: Optional[tuple] = None
    paper_literal_absolute: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho >= 0):
            raise InvalidParams("rho must be a finite nonnegative number")
        if not 0 <= self.beta < 1:
            raise InvalidParams("beta must lie in [0, 1)")
        object.__setattr__(self, "regularizer", Regularizer(self.regularizer))
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != 2 or min(w) < 0:
                raise InvalidParams("weights must be a pair (c1, c2) of nonnegative numbers")
            object.__setattr__(self, "weights", w)
