"""CSV ingestion, splitting, standardization and synthetic fixtures."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Dataset, validate_dataset
from .estimators import Standardizer
from .exceptions import EmptyDataset, InvalidParams, ParseError, SchemaMismatch

log = logging.getLogger(__name__)

MISSING_TOKENS = ("?", "")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "numeric"

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise InvalidParams(f"column kind must be numeric or categorical, got {self.kind!r}")


@dataclass(frozen=True)
class DatasetSchema:
    """Layout of a CSV file.

    ``label_transform`` is ``"identity"``, ``"binarize"`` (values listed in
    ``positive_labels`` map to 1, everything else to 0) or ``"categorical"``.
    ``missing`` chooses between dropping incomplete rows and treating a
    missing categorical value as a level of its own (``"category"``).
    ``names`` supplies column names for header-less files.
    """

    name: str
    features: tuple
    label: str
    label_transform: str = "identity"
    positive_labels: tuple = ()
    delimiter: Optional[str] = ","
    header: bool = True
    names: tuple = ()
    missing: str = "drop"
    expected_rows: Optional[int] = None

    def __post_init__(self):
        feats = tuple(c if isinstance(c, Column) else Column(*c) if isinstance(c, (tuple, list)) else Column(c)
                      for c in self.features)
        object.__setattr__(self, "features", feats)
        if self.label in {c.name for c in feats}:
            raise SchemaMismatch("the label column cannot also be a feature")
        if self.label_transform not in ("identity", "binarize", "categorical"):
            raise InvalidParams(f"unknown label transform {self.label_transform!r}")
        if self.missing not in ("drop", "category"):
            raise InvalidParams("missing must be 'drop' or 'category'")
        if not self.header and not self.names:
            raise InvalidParams("header-less files need explicit column names")

    @property
    def p_x(self) -> int:
        return len(self.features)


@dataclass
class LoadReport:
    path: str
    rows_read: int = 0
    rows_kept: int = 0
    rows_dropped: int = 0
    dropped_rows: list = field(default_factory=list)
    encodings: dict = field(default_factory=dict)
    sha256: str = ""

    def to_text(self) -> str:
        lines = [
            f"path: {self.path}",
            f"sha256: {self.sha256}",
            f"rows_read: {self.rows_read}",
            f"rows_kept: {self.rows_kept}",
            f"rows_dropped: {self.rows_dropped}",
        ]
        if self.dropped_rows:
            lines.append("dropped_row_numbers: " + ",".join(map(str, self.dropped_rows[:50])))
        for col, mapping in self.encodings.items():
            lines.append(f"encoding[{col}]: " + ", ".join(f"{k}={v}" for k, v in mapping.items()))
        return "\n".join(lines) + "\n"


_NUMERIC_TWEAKS = str.maketrans("", "", " ")


def load_csv(path, schema: DatasetSchema, report: Optional[LoadReport] = None) -> Dataset:
    """Read ``path`` under ``schema``.

    Categorical levels are encoded as integers in order of first
    occurrence. Rows with missing values are dropped and counted in
    ``report`` (unless the schema keeps them as a category).

    Raises
    ------
    ParseError
        With the 1-based file row and the column name of the bad cell.
    SchemaMismatch
        If a schema column is absent from the header.
    """
    path = Path(path)
    raw = path.read_bytes()
    report = LoadReport(str(path)) if report is None else report
    report.sha256 = hashlib.sha256(raw).hexdigest()
    text = raw.decode("utf-8-sig")
    delimiter = schema.delimiter
    if delimiter is None:
        delimiter = csv.Sniffer().sniff(text[:4096], delimiters=",;\t").delimiter
    reader = csv.reader(io.StringIO(text), delimiter=delimiter, skipinitialspace=True)
    first_row = 1
    if schema.header:
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDataset(f"{path} is empty") from None
        first_row = 2
    else:
        header = list(schema.names)
    wanted = [c.name for c in schema.features] + [schema.label]
    missing_cols = [c for c in wanted if c not in header]
    if missing_cols:
        raise SchemaMismatch(f"columns {missing_cols} not found in {path}")
    pos = {name: header.index(name) for name in wanted}

    codes = {c.name: {} for c in schema.features if c.kind == "categorical"}
    label_codes = {}
    rows_X, rows_y = [], []
    for rownum, row in enumerate(reader, start=first_row):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}:{rownum}: expected {len(header)} fields, got {len(row)}", rownum)
        report.rows_read += 1
        cells = {name: row[i].strip() for name, i in pos.items()}
        is_missing = {name: cells[name] in MISSING_TOKENS for name in wanted}
        drop = is_missing[schema.label] or any(
            is_missing[c.name] and (c.kind == "numeric" or schema.missing == "drop") for c in schema.features
        )
        if drop:
            report.rows_dropped += 1
            report.dropped_rows.append(rownum)
            continue
        xs = []
        for c in schema.features:
            cell = cells[c.name]
            if c.kind == "categorical":
                xs.append(float(codes[c.name].setdefault(cell, len(codes[c.name]))))
            else:
                xs.append(_parse_float(cell, path, rownum, c.name))
        rows_X.append(xs)
        rows_y.append(_label(cells[schema.label], schema, label_codes, path, rownum))
    if not rows_X:
        raise EmptyDataset(f"no usable rows in {path}")
    report.rows_kept = len(rows_X)
    report.encodings = {k: v for k, v in codes.items()}
    if label_codes:
        report.encodings[schema.label] = label_codes
    if schema.expected_rows is not None and report.rows_kept != schema.expected_rows:
        log.warning("%s: %d rows kept, expected %d", path, report.rows_kept, schema.expected_rows)
    return Dataset(np.array(rows_X, dtype=float), np.array(rows_y, dtype=float))


def _parse_float(cell, path, rownum, col):
    try:
        value = float(cell.translate(_NUMERIC_TWEAKS))
    except ValueError:
        raise ParseError(f"{path}:{rownum}: column {col!r} holds non-numeric {cell!r}", rownum, col) from None
    if not math.isfinite(value):
        raise ParseError(f"{path}:{rownum}: column {col!r} is not finite", rownum, col)
    return value


def _label(cell, schema, label_codes, path, rownum):
    if schema.label_transform == "binarize":
        return 1.0 if cell.rstrip(".") in schema.positive_labels else 0.0
    if schema.label_transform == "categorical":
        return float(label_codes.setdefault(cell, len(label_codes)))
    return _parse_float(cell, path, rownum, schema.label)


def split_half(d, seed=0):
    """Seeded shuffle into a training half of ``ceil(n/2)`` and a test half of ``floor(n/2)``."""
    X, y = validate_dataset(d)
    n = X.shape[0]
    if n < 2:
        raise EmptyDataset("need at least two records to split")
    perm = np.random.default_rng(seed).permutation(n)
    k = (n + 1) // 2
    tr, te = np.sort(perm[:k]), np.sort(perm[k:])
    return Dataset(X[tr], y[tr]), Dataset(X[te], y[te])


def standardize(train, test=None):
    """Standardize features with statistics of ``train`` only.

    Returns ``(train', test', scaler)``; ``test'`` is ``None`` when no test
    set is given. Constant columns become zero and trigger a warning.
    """
    Xtr, ytr = validate_dataset(train)
    scaler = Standardizer().fit(Xtr)
    if np.any(scaler.constant_):
        log.warning("zero-variance feature columns %s mapped to 0",
                    np.flatnonzero(scaler.constant_).tolist())
    out_train = Dataset(scaler.transform(Xtr), ytr)
    out_test = None
    if test is not None:
        Xte, yte = validate_dataset(test)
        out_test = Dataset(scaler.transform(Xte), yte)
    return out_train, out_test, scaler


def synth_linear(n, p_x, theta_star, noise_sd=0.0, seed=0) -> Dataset:
    """``x ~ N(0, I)``, ``y = theta*^T [x; 1] + N(0, noise_sd^2)``."""
    if n < 1:
        raise InvalidParams("n must be positive")
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_star.size != p_x + 1:
        raise InvalidParams(f"theta_star must have length p_x + 1 = {p_x + 1}")
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p_x))
    y = X @ theta_star[:-1] + theta_star[-1]
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, size=n)
    return Dataset(X, y)


WINE_FEATURES = (
    "fixed acidity", "volatile acidity", "citric acid", "residual sugar", "chlorides",
    "free sulfur dioxide", "total sulfur dioxide", "density", "pH", "sulphates", "alcohol",
)
BOSTON_FEATURES = ("crim", "zn", "indus", "chas", "nox", "rm", "age", "dis", "rad", "tax", "ptratio", "b", "lstat")
ADULT_COLUMNS = (
    ("age", "numeric"), ("workclass", "categorical"), ("fnlwgt", "numeric"),
    ("education", "categorical"), ("education-num", "numeric"), ("marital-status", "categorical"),
    ("occupation", "categorical"), ("relationship", "categorical"), ("race", "categorical"),
    ("sex", "categorical"), ("capital-gain", "numeric"), ("capital-loss", "numeric"),
    ("hours-per-week", "numeric"), ("native-country", "categorical"),
)

SCHEMAS = {
    "wine": DatasetSchema(
        name="wine", features=WINE_FEATURES, label="quality", delimiter=None, expected_rows=1599,
    ),
    "boston": DatasetSchema(
        name="boston", features=BOSTON_FEATURES, label="medv", delimiter=None, expected_rows=506,
    ),
    "adult": DatasetSchema(
        name="adult",
        features=ADULT_COLUMNS,
        label="income",
        label_transform="binarize",
        positive_labels=(">50K",),
        missing="category",
        expected_rows=48842,
    ),
}
