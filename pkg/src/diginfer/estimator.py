"""Scikit-learn style front end for directed-information graph recovery."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DomainError
from .graphtest import TestConfig, calibrate_threshold, graph_estimate
from .model import dimensions
from .validation import check_symbol_array


class DirectedInfoGraphEstimator(BaseEstimator):
    """Recover the causal adjacency of jointly Markov symbol processes.

    Parameters
    ----------
    k : int
        Assumed Markov order of the joint process.
    threshold : float or None
        Decision threshold on the scaled statistic (n-k) * di_hat.  When
        None, the threshold is calibrated from ``alpha``.
    alpha : float
        Target false-alarm level used to calibrate the threshold when
        ``threshold`` is None.
    calibration : {"graph", "single-edge"}
        Gamma shape used for calibration: the conservative whole-graph
        r/2, or the per-edge null degrees of freedom (r-d-d')/2.
    alphabet_size : int or None
        Symbol alphabet size; inferred from the data when None.

    Attributes set by :meth:`fit`
    -----------------------------
    adjacency_ : (m, m) boolean array of edge decisions
    di_matrix_ : (m, m) float array of plug-in directed informations
    edge_stats_ : list of per-edge statistics in lexicographic pair order
    threshold_ : float actually applied
    dims_ : dimension bookkeeping of the fitted configuration
    """

    def __init__(self, k=1, threshold=None, alpha=0.01, calibration="graph", alphabet_size=None):
        self.k = k
        self.threshold = threshold
        self.alpha = alpha
        self.calibration = calibration
        self.alphabet_size = alphabet_size

    def _config_for(self, X):
        X, a = check_symbol_array(X, alphabet_size=self.alphabet_size)
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if X.shape[0] <= self.k:
            raise DomainError(f"need more than k={self.k} rows, got {X.shape[0]}")
        dims = dimensions(X.shape[1], self.k, a)
        if self.threshold is not None:
            if not self.threshold > 0:
                raise DomainError(f"threshold must be positive, got {self.threshold}")
            i_th = float(self.threshold)
        else:
            if self.calibration not in ("graph", "single-edge"):
                raise DomainError(f"unknown calibration mode {self.calibration!r}")
            i_th = calibrate_threshold(dims, self.alpha, single_edge=self.calibration == "single-edge")
        return X, TestConfig(i_th=i_th, k=self.k, dims=dims)

    def fit(self, X, y=None):
        """Estimate per-edge statistics and the adjacency from an (n, m) path."""
        X, config = self._config_for(X)
        report = graph_estimate(X, config)
        m = X.shape[1]
        di = np.zeros((m, m))
        for s in report.per_edge:
            di[s.i, s.j] = s.di_hat
        self.n_features_in_ = m
        self.dims_ = config.dims
        self.threshold_ = config.i_th
        self.adjacency_ = report.estimated_adjacency
        self.di_matrix_ = di
        self.edge_stats_ = report.per_edge
        return self

    def fit_predict(self, X, y=None):
        """Fit to ``X`` and return the estimated adjacency matrix."""
        return self.fit(X).adjacency_

    def score(self, X, y):
        """Fraction of correctly decided off-diagonal edges against truth ``y``."""
        X, config = self._config_for(X)
        truth = np.asarray(y).astype(bool)
        if truth.shape != (X.shape[1], X.shape[1]):
            raise DomainError(f"truth adjacency must be {X.shape[1]}x{X.shape[1]}")
        estimated = graph_estimate(X, config).estimated_adjacency
        off = ~np.eye(X.shape[1], dtype=bool)
        return float((estimated[off] == truth[off]).mean())
