"""Data poisoning attacks: label flipping, feature modification and insertion.

Exactly ``floor(beta * n)`` records are poisoned, chosen uniformly without
replacement by a seeded generator. Records outside the returned index set
are left bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, validate_dataset
from .exceptions import InvalidSpec

KINDS = ("label_flip_to", "label_negate", "feature_gaussian", "insert")


@dataclass(frozen=True)
class AttackSpec:
    """Which attack to run, on what fraction of the data.

    Parameters
    ----------
    kind : str
        ``"label_flip_to"`` (set outputs to ``value``), ``"label_negate"``
        (``y -> 1 - y`` on binary labels), ``"feature_gaussian"`` (replace
        features by independent ``N(0, variance)`` draws) or ``"insert"``
        (append records with ``N(0, variance)`` features and output ``value``).
    beta : float
        Poisoned fraction in ``[0, 1)``.
    """

    kind: str
    beta: float
    seed: int = 0
    value: float = 10.0
    variance: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown attack {self.kind!r}; expected one of {KINDS}")
        if not 0 <= self.beta < 1:
            raise InvalidSpec("beta must lie in [0, 1)")
        if self.kind in ("feature_gaussian", "insert") and not self.variance > 0:
            raise InvalidSpec("variance must be positive")
        if not math.isfinite(self.value):
            raise InvalidSpec("attack value must be finite")

    def with_beta(self, beta, seed=None):
        return AttackSpec(self.kind, beta, self.seed if seed is None else seed, self.value, self.variance)


def poison_count(n: int, beta: float) -> int:
    # tiny epsilon guards e.g. 0.3 * 10 = 2.9999999999999996
    return int(math.floor(beta * n + 1e-9))


def poison(d, spec: AttackSpec):
    """Apply ``spec`` to ``d``.

    Returns
    -------
    poisoned : Dataset
    indices : ndarray of int
        Sorted indices of the altered records (or of the inserted ones,
        which are appended after the original records).
    """
    X, y = validate_dataset(d)
    n = X.shape[0]
    k = poison_count(n, spec.beta)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "label_negate" and not np.all((y == 0) | (y == 1)):
        raise InvalidSpec("label negation needs binary {0, 1} outputs")
    if k == 0:
        return Dataset(X, y), np.zeros(0, dtype=int)
    if spec.kind == "insert":
        new_X = rng.normal(0.0, math.sqrt(spec.variance), size=(k, X.shape[1]))
        new_y = np.full(k, float(spec.value))
        return Dataset(np.vstack([X, new_X]), np.concatenate([y, new_y])), np.arange(n, n + k)
    idx = np.sort(rng.choice(n, size=k, replace=False))
    X = X.copy()
    y = y.copy()
    if spec.kind == "label_flip_to":
        y[idx] = spec.value
    elif spec.kind == "label_negate":
        y[idx] = 1.0 - y[idx]
    else:
        X[idx] = rng.normal(0.0, math.sqrt(spec.variance), size=(k, X.shape[1]))
    return Dataset(X, y), idx
