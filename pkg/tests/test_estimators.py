import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dagph.estimators import ShapeComparison, SubsamplePersistence
from dagph.pipelines import sample_circle


def circle_array(n, seed):
    return np.array([[float(c) for c in p] for p in sample_circle(n, seed, noise=0.05).points])


def test_params_round_trip():
    est = SubsamplePersistence(radii=(0.2, 0.4), n_sub=6, seed=3)
    params = est.get_params()
    assert params["n_sub"] == 6 and params["field"] == "fp:46337"
    other = clone(est)
    assert other.get_params() == params
    other.set_params(k=0)
    assert other.k == 0 and est.k == 1


def test_transform_requires_fit():
    with pytest.raises(NotFittedError):
        SubsamplePersistence().transform(None)


def test_subsample_fit_transform():
    X = circle_array(24, 0)
    est = SubsamplePersistence(radii=(0.15, 0.3, 0.45, 0.6), n_sub=10, seed=1)
    out = est.fit_transform(X)
    assert out.ndim == 2 and out.shape[1] == 3
    assert est.metadata_["subsample_size"] == 10
    assert len(est.ranks_) == 10
    # points are in radius units and births lie on the schedule
    assert all(b in (0.15, 0.3, 0.45, 0.6) for b in out[:, 0])


def test_shape_comparison_identical_clouds():
    X = circle_array(12, 2)
    est = ShapeComparison(radii=(0.1, 0.3, 0.5))
    assert est.fit(X, X).bottleneck_ == (0.0, 0.0)
    assert est.score(X, X) == 0.0
    assert clone(est).get_params() == est.get_params()
