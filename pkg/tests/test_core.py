import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import bounds_scan
from wdro.core import (
    ConcentrationParams,
    Dataset,
    ModelParams,
    NormSpec,
    Record,
    RobustConfig,
    data_bounds,
    validate_dataset,
)
from wdro.exceptions import DimensionMismatch, EmptyDataset, InvalidParams, NonFiniteValue


def test_three_finite_records_validate():
    recs = [Record([1.0, 2.0], 0.5), Record([0.0, -1.0], 1.0), Record([3.0, 3.0], -2.0)]
    X, y = validate_dataset(recs)
    assert X.shape == (3, 2) and y.shape == (3,)


def test_nan_record_rejected():
    with pytest.raises(NonFiniteValue):
        validate_dataset(np.array([[1.0, np.nan], [0.0, 1.0]]), np.zeros(2))


def test_empty_rejected():
    with pytest.raises(EmptyDataset):
        validate_dataset([])
    with pytest.raises(EmptyDataset):
        validate_dataset(np.zeros((0, 2)), np.zeros(0))


def test_ragged_and_mismatched_rejected():
    with pytest.raises(DimensionMismatch):
        validate_dataset([Record([1.0], 0.0), Record([1.0, 2.0], 0.0)])
    with pytest.raises(DimensionMismatch):
        validate_dataset(np.zeros((3, 2)), np.zeros(4))


def test_dataset_is_immutable():
    d = Dataset(np.ones((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        d.X[0, 0] = 5.0


def test_dataset_records_roundtrip():
    d = Dataset(np.arange(6.0).reshape(3, 2), np.array([1.0, 2.0, 3.0]))
    assert Dataset.from_records(list(d)) == d
    assert d[1].y == 2.0 and np.array_equal(d[1].x, [2.0, 3.0])
    assert d.subset([0, 2]).n == 2


def test_bounds_all_zero():
    b = data_bounds(Dataset(np.zeros((1, 2)), np.zeros(1)))
    assert (b.X, b.Y) == (0.0, 0.0)


def test_bounds_three_four_five():
    b = data_bounds(Dataset(np.array([[3.0, 4.0]]), np.array([-2.0])), NormSpec.L2)
    assert b.X == pytest.approx(5.0) and b.Y == pytest.approx(2.0)


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_bounds_match_scan(rng, norm):
    X, y = rng.normal(size=(40, 5)), rng.normal(size=40)
    b = data_bounds(Dataset(X, y), norm)
    bx, by = bounds_scan(X, y, norm)
    assert b.X == pytest.approx(bx, rel=1e-12) and b.Y == pytest.approx(by, rel=1e-12)


@given(arrays(np.float64, st.integers(1, 6), elements=st.floats(-1e3, 1e3)))
def test_dual_norm_pairs(v):
    assert NormSpec.L1.dual_norm(v) == pytest.approx(np.max(np.abs(v)))
    assert NormSpec.LINF.dual_norm(v) == pytest.approx(np.sum(np.abs(v)))
    assert NormSpec.L2.dual_norm(v) == pytest.approx(np.linalg.norm(v))


@settings(max_examples=200)
@given(arrays(np.float64, st.integers(1, 6), elements=st.floats(-100, 100)), st.sampled_from(list(NormSpec)))
def test_dual_norm_subgradient_is_supporting(v, norm):
    g = norm.dual_norm_subgradient(v)
    # <g, v> = ||v||_* and ||g|| <= 1 in the primal norm
    assert float(g @ v) == pytest.approx(norm.dual_norm(v), abs=1e-9)
    assert norm(g) <= 1 + 1e-12


def test_norm_coerce():
    assert NormSpec.coerce("L2") is NormSpec.L2
    with pytest.raises(InvalidParams):
        NormSpec.coerce("l3")


def test_model_params_checks():
    m = ModelParams(np.array([1.0, 2.0, 3.0]))
    assert m.p_x == 2 and m.intercept == 3.0
    with pytest.raises(DimensionMismatch):
        ModelParams(np.array([1.0]))
    with pytest.raises(InvalidParams):
        ModelParams(np.array([1.0, 2.0]), "logistic", "quadratic")


def test_concentration_params_reject_p_two():
    with pytest.raises(InvalidParams):
        ConcentrationParams(1.0, 1.0, 2.0, 2, 0.1)
    for bad in [dict(c1=0.0), dict(a=1.0), dict(gamma=1.0)]:
        kw = dict(c1=1.0, c2=1.0, a=2.0, p=3, gamma=0.1) | bad
        with pytest.raises(InvalidParams):
            ConcentrationParams(**kw)


def test_robust_config_validation():
    with pytest.raises(InvalidParams):
        RobustConfig(rho=-1.0)
    with pytest.raises(InvalidParams):
        RobustConfig(beta=1.0)
    assert RobustConfig(weights=[1, 2]).weights == (1.0, 2.0)
