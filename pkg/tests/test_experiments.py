"""Validation-suite harness: configs, self-checks, determinism, analytics."""

import io
from dataclasses import replace

import numpy as np
import pytest

from diginfer.errors import ConfigurationError, DomainError
from diginfer.experiments import (
    SUITE_NAMES,
    alternative_clt_suite,
    default_config,
    estimate_sigma,
    factor_pair,
    figure1_curves,
    jacobian_matrix,
    jacobian_rank_suite,
    kl_decay_suite,
    null_chi2_suite,
    numeric_rank,
    rate_dichotomy_suite,
    run_suite,
    write_curves_csv,
    write_result_csv,
)
from diginfer.model import copy_channel_model, dimensions
from diginfer.rng import Stream

DIMS_FIG = dimensions(5, 2, 2)


def small(cfg, **kw):
    return replace(cfg, **kw)


class TestConfigs:
    def test_defaults_exist_for_every_suite(self):
        for suite in SUITE_NAMES:
            cfg = default_config(suite)
            assert cfg.suite == suite

    def test_unknown_suite_rejected(self):
        with pytest.raises(ConfigurationError):
            default_config("nope")
        with pytest.raises(ConfigurationError):
            run_suite(small(default_config("rate"), suite="nope"))

    def test_grid_must_increase(self):
        cfg = small(default_config("null-chi2"), n_grid=(100, 100), replicas=30)
        with pytest.raises(ConfigurationError):
            null_chi2_suite(cfg)

    def test_replica_floor(self):
        cfg = small(default_config("null-chi2"), replicas=5)
        with pytest.raises(ConfigurationError):
            null_chi2_suite(cfg)


class TestNullSuite:
    def test_present_edge_is_misconfiguration(self):
        cfg = small(default_config("null-chi2"), model=copy_channel_model(), edge=(0, 1))
        with pytest.raises(ConfigurationError):
            null_chi2_suite(cfg)

    def test_small_run_passes_and_is_deterministic(self):
        cfg = small(default_config("null-chi2"), n_grid=(4000,), replicas=64)
        r1 = null_chi2_suite(cfg)
        r2 = null_chi2_suite(cfg)
        assert r1.passed
        assert r1.rows == r2.rows
        assert r1.config_hash == r2.config_hash

    def test_reports_all_statistics(self):
        cfg = small(default_config("null-chi2"), n_grid=(2000, 4000), replicas=40)
        res = null_chi2_suite(cfg)
        stats = {(row["n"], row["statistic"]) for row in res.rows}
        for n in (2000, 4000):
            for s in ("mean_2lambda", "variance_2lambda", "ks_distance"):
                assert (n, s) in stats

    def test_ks_distance_trend_in_n(self):
        # convergence in law: doubling n must not worsen the fit beyond noise
        cfg = small(default_config("null-chi2"), n_grid=(3000, 6000), replicas=150)
        res = null_chi2_suite(cfg)
        ks = {row["n"]: row["value"] for row in res.rows if row["statistic"] == "ks_distance"}
        assert ks[6000] <= ks[3000] + 0.03


class TestAltSuite:
    def test_absent_edge_is_misconfiguration(self):
        cfg = small(default_config("alt-clt"), edge=(1, 0))
        with pytest.raises(ConfigurationError):
            alternative_clt_suite(cfg)

    def test_needs_two_grid_points(self):
        cfg = small(default_config("alt-clt"), n_grid=(4000,), replicas=40)
        with pytest.raises(ConfigurationError):
            alternative_clt_suite(cfg)

    def test_small_run_shape(self):
        cfg = small(default_config("alt-clt"), n_grid=(2000, 8000), replicas=48)
        res = alternative_clt_suite(cfg)
        assert {"mean_scaled_error", "sd_scaled_error", "skew_scaled_error"} <= {
            row["statistic"] for row in res.rows
        }
        assert res.details["i_bar"] == pytest.approx(0.36806420716849707, abs=1e-10)


class TestSigma:
    def test_deterministic_statistic_gives_zero(self):
        cfg = small(default_config("alt-clt"), n_grid=(2000,), replicas=32)
        sigma = estimate_sigma(cfg, statistic_fn=lambda p, k, i, j: 0.25)
        assert sigma == 0.0

    def test_positive_and_batch_stable(self):
        cfg = small(default_config("alt-clt"), n_grid=(4000,), replicas=60)
        s1 = estimate_sigma(cfg)
        s2 = estimate_sigma(small(cfg, base_seed=cfg.base_seed + 60))
        assert s1 > 0 and s2 > 0
        assert 0.75 <= s1 / s2 <= 1.33


class TestRateSuite:
    def test_needs_four_points(self):
        cfg = small(default_config("rate"), n_grid=(100, 200, 400))
        with pytest.raises(ConfigurationError):
            rate_dichotomy_suite(cfg)

    def test_constant_statistic_fails_with_zero_slopes(self):
        cfg = small(
            default_config("rate"),
            n_grid=(256, 512, 1024, 2048),
            replicas=30,
        )
        res = rate_dichotomy_suite(cfg, statistic_fn=lambda p, k, i, j: 0.125)
        assert not res.passed
        assert res.details["slope_null"] == pytest.approx(0.0, abs=1e-9)
        assert res.details["slope_true"] == pytest.approx(0.0, abs=1e-9)

    def test_misconfigured_edges_rejected(self):
        cfg = small(default_config("rate"), null_edge=(0, 1), true_edge=(1, 0))
        with pytest.raises(ConfigurationError):
            rate_dichotomy_suite(cfg)


class TestKlSuite:
    def test_needs_sixteenfold_range(self):
        cfg = small(default_config("kl-decay"), n_grid=(1024, 4096), replicas=30)
        with pytest.raises(ConfigurationError):
            kl_decay_suite(cfg)

    def test_divergences_nonnegative(self):
        cfg = small(default_config("kl-decay"), n_grid=(512, 8192), replicas=30)
        res = kl_decay_suite(cfg)
        for row in res.rows:
            assert row["value"] >= 0.0


class TestJacobian:
    def test_duplicated_context_row_keeps_rank(self):
        stream = Stream(77)
        gamma, gamma_prime = factor_pair(1, 2, 0.05, stream)
        gamma[1] = gamma[0]  # duplicated context row, still interior
        K = jacobian_matrix(gamma, gamma_prime, 1, 2)
        assert numeric_rank(K, 1e-10) == 32

    def test_zeroed_entry_rejected(self):
        stream = Stream(78)
        gamma, gamma_prime = factor_pair(1, 2, 0.05, stream)
        gamma[0, 1] += gamma[0, 0]  # keep the row stochastic, violate positivity only
        gamma[0, 0] = 0.0
        with pytest.raises(DomainError):
            jacobian_matrix(gamma, gamma_prime, 1, 2)

    def test_rank_drops_without_positivity_guarantee(self):
        # sanity of the rank routine itself on a singular matrix
        mat = np.ones((6, 4))
        assert numeric_rank(mat, 1e-10) == 1

    def test_suite_small(self):
        res = jacobian_rank_suite(small(default_config("jacobian-rank"), trials=3))
        assert res.passed
        assert res.details["target_rank"] == 32
        assert res.details["worst_fd_error"] <= 1e-6


class TestFigureCurves:
    def test_orderings_along_grid(self):
        grid = np.linspace(1.0, 2.0 * DIMS_FIG.r, 80)
        rows = figure1_curves(DIMS_FIG, grid, [4, 12])
        pf = [r["pf_upper"] for r in rows]
        pd4 = [r["pd_lower_n0_4"] for r in rows]
        pd12 = [r["pd_lower_n0_12"] for r in rows]
        assert all(b <= a + 1e-15 for a, b in zip(pf, pf[1:]))
        assert all(b >= a - 1e-15 for a, b in zip(pd4, pd4[1:]))
        assert all(x4 >= x12 - 1e-15 for x4, x12 in zip(pd4, pd12))

    def test_empty_grid_rejected(self):
        with pytest.raises(DomainError):
            figure1_curves(DIMS_FIG, [], [4])

    def test_csv_writer(self):
        rows = figure1_curves(DIMS_FIG, [1.0, 10.0], [0, 4])
        buf = io.StringIO()
        write_curves_csv(rows, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "i_th,pf_upper,pd_lower_n0_0,pd_lower_n0_4"
        assert len(lines) == 3


class TestThreadCap:
    def test_results_independent_of_worker_count(self, monkeypatch):
        cfg = small(default_config("null-chi2"), n_grid=(2000,), replicas=80)
        monkeypatch.delenv("DIG_THREADS", raising=False)
        serial = null_chi2_suite(cfg)
        monkeypatch.setenv("DIG_THREADS", "4")
        threaded = null_chi2_suite(cfg)
        assert serial.rows == threaded.rows
        assert serial.config_hash == threaded.config_hash

    def test_invalid_thread_cap_rejected(self, monkeypatch):
        from diginfer._util import worker_count

        monkeypatch.setenv("DIG_THREADS", "0")
        with pytest.raises(ConfigurationError):
            worker_count()
        monkeypatch.setenv("DIG_THREADS", "junk")
        with pytest.raises(ConfigurationError):
            worker_count()
        monkeypatch.setenv("DIG_THREADS", "3")
        assert worker_count() == 3


class TestResultExport:
    def test_csv_rows_tagged_with_hash(self):
        cfg = small(default_config("jacobian-rank"), trials=2)
        res = jacobian_rank_suite(cfg)
        buf = io.StringIO()
        write_result_csv(res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "suite,n,statistic,value,config_hash"
        assert all(line.endswith(res.config_hash) for line in lines[1:])
