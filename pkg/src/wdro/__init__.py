"""Wasserstein distributionally-robust regression against data poisoning."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ConcentrationParams,
    DataBounds,
    Dataset,
    ModelParams,
    NormSpec,
    Record,
    Regularizer,
    RobustConfig,
    data_bounds,
    validate_dataset,
)
from .estimators import RobustLinearRegression, RobustLogisticRegression, Standardizer  # noqa: E402
from .training import TrainConfig, TrainReport, evaluate, train  # noqa: E402
from .transport import DiscreteDistribution, wasserstein, wasserstein_1d  # noqa: E402

__all__ = [
    "ConcentrationParams",
    "DataBounds",
    "Dataset",
    "DiscreteDistribution",
    "ModelParams",
    "NormSpec",
    "Record",
    "Regularizer",
    "RobustConfig",
    "RobustLinearRegression",
    "RobustLogisticRegression",
    "Standardizer",
    "TrainConfig",
    "TrainReport",
    "data_bounds",
    "evaluate",
    "train",
    "validate_dataset",
    "wasserstein",
    "wasserstein_1d",
]
