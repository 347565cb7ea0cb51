"""Edge threshold decisions, whole-graph hypothesis tests, and error bounds.

The decision rule declares edge i -> j present when the scaled plug-in
statistic (n-k) * di_hat meets the threshold (ties detect).  False-alarm /
detection bounds are regularized-gamma expressions of the dimension
bookkeeping; the graph-level bound uses shape r/2 (conservative in the
presence of unknown extra structure) while single-edge calibration uses
the null degrees of freedom (r - d - d') / 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import estimate
from .errors import DomainError
from .numerics import q_function, reg_gamma_P
from .validation import check_symbol_array

_BISECT_TOL = 1e-10


@dataclass(frozen=True)
class TestConfig:
    """Threshold, block order, and dimension bookkeeping for a graph test."""

    __test__ = False  # not a pytest case despite the name

    i_th: float
    k: int
    dims: "DimensionSpec"

    def __post_init__(self):
        if not self.i_th > 0:
            raise DomainError(f"threshold must be positive, got {self.i_th}")


@dataclass
class TestReport:
    """Outcome of estimating (and optionally testing) a graph."""

    __test__ = False  # not a pytest case despite the name

    estimated_adjacency: np.ndarray  # m x m booleans
    per_edge: list  # EdgeStatistic, ordered pairs lexicographically
    threshold: float
    hypothesis: np.ndarray | None = None
    accepted: bool | None = None
    bounds: tuple | None = None  # (pf_upper, pd_lower)


def edge_decision(stat, i_th):
    """Edge declared present iff (n-k) * di_hat >= i_th (detect on ties)."""
    if not i_th > 0:
        raise DomainError(f"threshold must be positive, got {i_th}")
    return bool(stat.lam >= i_th)


def graph_estimate(path, config):
    """Estimate the whole adjacency from one path via per-edge decisions."""
    symbols = getattr(path, "symbols", path)
    symbols, _ = check_symbol_array(symbols, alphabet_size=config.dims.alphabet_size)
    m = symbols.shape[1]
    if m != config.dims.m:
        raise DomainError(f"path has {m} nodes but config is for m={config.dims.m}")
    dist = estimate.empirical_block_distribution(symbols, config.k, config.dims.alphabet_size)
    n = symbols.shape[0]
    stats = []
    adjacency = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            stat = estimate.edge_statistic_from_distribution(dist, i, j, n)
            stats.append(stat)
            adjacency[i, j] = edge_decision(stat, config.i_th)
    return TestReport(estimated_adjacency=adjacency, per_edge=stats, threshold=config.i_th)


def hypothesis_test(path, config, v_star):
    """Accept iff the estimated adjacency matches the hypothesis off-diagonal."""
    v_star = np.asarray(v_star).astype(bool)
    if v_star.shape != (config.dims.m, config.dims.m):
        raise DomainError(f"hypothesis must be {config.dims.m}x{config.dims.m}")
    report = graph_estimate(path, config)
    off = ~np.eye(config.dims.m, dtype=bool)
    report.hypothesis = v_star
    report.accepted = bool(np.array_equal(report.estimated_adjacency & off, v_star & off))
    n1 = int((v_star & off).sum())
    n0 = config.dims.m * (config.dims.m - 1) - n1
    report.bounds = (
        false_alarm_upper_bound(config.dims, config.i_th),
        detection_lower_bound(config.dims, config.i_th, n0),
    )
    return report


def false_alarm_upper_bound(dims, i_th):
    """Asymptotic upper bound on the graph false-alarm probability."""
    if not i_th > 0:
        raise DomainError(f"threshold must be positive, got {i_th}")
    return 1.0 - reg_gamma_P(dims.r / 2.0, i_th)


def detection_lower_bound(dims, i_th, n0):
    """Asymptotic lower bound on detection with n0 absent edges (clamped at 0)."""
    if n0 < 0 or n0 > dims.m * (dims.m - 1):
        raise DomainError(f"n0 must lie in [0, m(m-1)], got {n0}")
    return max(1.0 - n0 * (1.0 - reg_gamma_P(dims.r / 2.0, i_th)), 0.0)


@dataclass(frozen=True)
class FiniteSampleBounds:
    """Finite-n error bounds; the false-alarm side is split on the unknown
    state of the differing edge, with the maximum as the usable bound."""

    pf_upper_edge_present: float
    pf_upper_edge_absent: float
    pf_upper: float
    pd_lower: float


def finite_n_bounds(dims, i_th, n, k, i_bar_min, sigma, n0, n1):
    """Finite-sample analogues of the asymptotic bounds.

    ``i_bar_min`` is the smallest exact directed information over present
    edges and ``sigma`` the Gaussian scale of the estimator on a present
    edge; the Q-function term vanishes as n grows, recovering the
    asymptotic expressions.
    """
    if not i_bar_min > 0:
        raise DomainError(f"i_bar_min must be positive, got {i_bar_min}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if n <= k:
        raise DomainError(f"need n > k, got n={n}, k={k}")
    if not i_th > 0:
        raise DomainError(f"threshold must be positive, got {i_th}")
    z = (i_th - (n - k) * i_bar_min) / (np.sqrt(n - k) * sigma)
    miss = 1.0 - q_function(z)
    gamma_tail = 1.0 - reg_gamma_P(dims.r / 2.0, i_th)
    pf_present = min(1.0, max(0.0, miss))
    pf_absent = min(1.0, max(0.0, gamma_tail))
    pd_lower = min(1.0, max(0.0, 1.0 - (n1 * miss + n0 * gamma_tail)))
    return FiniteSampleBounds(
        pf_upper_edge_present=pf_present,
        pf_upper_edge_absent=pf_absent,
        pf_upper=max(pf_present, pf_absent),
        pd_lower=pd_lower,
    )


def calibrate_threshold(dims, target_pf, single_edge=False):
    """Threshold whose gamma-tail bound equals ``target_pf``, by bisection.

    Graph tests use shape r/2; single-edge tests the null degrees of
    freedom (r - d - d')/2, in which case the threshold equals half the
    corresponding chi-squared quantile.
    """
    if not 0.0 < target_pf < 1.0:
        raise DomainError(f"target false-alarm level must be in (0, 1), got {target_pf}")
    shape = (dims.dof_null if single_edge else dims.r) / 2.0
    goal = 1.0 - target_pf
    lo = 0.0
    hi = max(1.0, 2.0 * shape)
    for _ in range(1200):
        if reg_gamma_P(shape, hi) >= goal:
            break
        hi *= 2.0
    else:
        raise DomainError(f"target false-alarm level {target_pf} is unattainable")
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if reg_gamma_P(shape, mid) < goal:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def report_to_dict(report, dims=None):
    """JSON-ready dict; adjacency as nested 0/1 arrays, bounds as decimal strings."""
    out = {
        "m": int(report.estimated_adjacency.shape[0]),
        "threshold": format(report.threshold, ".9g"),
        "estimated_adjacency": report.estimated_adjacency.astype(int).tolist(),
        "edges": [
            {
                "i": s.i,
                "j": s.j,
                "n": s.n,
                "k": s.k,
                "di_hat": format(s.di_hat, ".9g"),
                "lambda": format(s.lam, ".9g"),
            }
            for s in report.per_edge
        ],
    }
    if report.per_edge:
        out["k"] = report.per_edge[0].k
        out["n"] = report.per_edge[0].n
    if dims is not None:
        out["dims"] = {
            "r": dims.r,
            "d": dims.d,
            "d_prime": dims.d_prime,
            "dof_null": dims.dof_null,
        }
    if report.hypothesis is not None:
        out["hypothesis"] = report.hypothesis.astype(int).tolist()
        out["accepted"] = bool(report.accepted)
    if report.bounds is not None:
        out["bounds"] = {
            "pf_upper": format(report.bounds[0], ".9g"),
            "pd_lower": format(report.bounds[1], ".9g"),
        }
    return out


def write_report_json(report, file_or_name, dims=None):
    payload = report_to_dict(report, dims=dims)

    if hasattr(file_or_name, "write"):
        json.dump(payload, file_or_name, indent=2, sort_keys=True)
        file_or_name.write("\n")
    else:
        with open(file_or_name, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
