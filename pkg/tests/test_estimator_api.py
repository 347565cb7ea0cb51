"""Scikit-learn API conformance of the graph estimator."""

import numpy as np
import pytest
from sklearn.base import clone

from diginfer.errors import DomainError
from diginfer.estimator import DirectedInfoGraphEstimator
from diginfer.model import build_random_model, true_adjacency
from diginfer.simulate import simulate


@pytest.fixture(scope="module")
def fitted_setup():
    adj = np.zeros((3, 3), dtype=bool)
    adj[0, 1] = True
    model = build_random_model(3, 1, 2, adj, seed=21)
    path = simulate(model, 20_000, seed=3)
    return model, path.symbols


def test_get_set_params_round_trip():
    est = DirectedInfoGraphEstimator(k=2, threshold=9.0, alphabet_size=3)
    params = est.get_params()
    assert params == {
        "k": 2,
        "threshold": 9.0,
        "alpha": 0.01,
        "calibration": "graph",
        "alphabet_size": 3,
    }
    est.set_params(k=1, threshold=None)
    assert est.k == 1 and est.threshold is None


def test_clone_preserves_params(fitted_setup):
    est = DirectedInfoGraphEstimator(k=1, alpha=0.001)
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()


def test_fit_sets_attributes(fitted_setup):
    model, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1, alpha=0.001).fit(X)
    assert est.n_features_in_ == 3
    assert est.dims_.dof_null == 24
    assert est.threshold_ > 0
    assert est.adjacency_.shape == (3, 3)
    assert est.di_matrix_.shape == (3, 3)
    assert len(est.edge_stats_) == 6
    assert np.array_equal(est.adjacency_, true_adjacency(model))


def test_fit_returns_self(fitted_setup):
    _, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1)
    assert est.fit(X) is est


def test_fit_predict_matches_adjacency(fitted_setup):
    _, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1, alpha=0.001)
    pred = est.fit_predict(X)
    assert np.array_equal(pred, est.adjacency_)


def test_score_perfect_recovery(fitted_setup):
    model, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1, alpha=0.001)
    assert est.fit(X).score(X, true_adjacency(model)) == 1.0


def test_explicit_threshold_overrides_alpha(fitted_setup):
    _, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1, threshold=123.0, alpha=0.5).fit(X)
    assert est.threshold_ == 123.0


def test_single_edge_calibration_is_looser(fitted_setup):
    _, X = fitted_setup
    graph_th = DirectedInfoGraphEstimator(k=1, alpha=0.01, calibration="graph").fit(X).threshold_
    edge_th = (
        DirectedInfoGraphEstimator(k=1, alpha=0.01, calibration="single-edge").fit(X).threshold_
    )
    assert edge_th < graph_th


def test_input_validation(fitted_setup):
    _, X = fitted_setup
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=0).fit(X)
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=1).fit(X[:, 0])  # 1-D
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=1).fit(X + 0.5)  # non-integer
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=1, threshold=-1.0).fit(X)
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=1, calibration="bogus").fit(X)
    with pytest.raises(DomainError):
        DirectedInfoGraphEstimator(k=1).fit(X[:1])  # too short


def test_score_shape_check(fitted_setup):
    _, X = fitted_setup
    est = DirectedInfoGraphEstimator(k=1).fit(X)
    with pytest.raises(DomainError):
        est.score(X, np.zeros((2, 2)))
