"""Empirical distributions, plug-in directed information, likelihood-ratio identity."""

import io
import math

import numpy as np
import pytest

from diginfer import encoding
from diginfer.errors import DomainError
from diginfer.estimate import (
    EdgeStatistic,
    EmpiricalDistribution,
    empirical_block_distribution,
    empirical_entropy,
    log_likelihood_ratio,
    marginalize,
    plug_in_directed_info,
    write_edge_stats_csv,
)
from diginfer.model import build_random_model, copy_channel_model
from diginfer.simulate import simulate


def _dist(counts, slots, m, k, a, total):
    return EmpiricalDistribution(
        counts=np.asarray(counts), slots=slots, m=m, k=k, alphabet_size=a, total=total
    )


class TestBlockDistribution:
    def test_single_node_hand_count(self):
        d = empirical_block_distribution(np.array([[0], [1], [1]]), k=1)
        assert d.total == 2
        # block codes over slots ((0,0),(0,1)): (0,1) -> 1, (1,1) -> 3
        assert d.counts.tolist() == [0, 1, 0, 1]
        p = d.probabilities()
        assert p[1] == 0.5 and p[3] == 0.5

    def test_constant_path_unit_mass(self):
        d = empirical_block_distribution(np.ones((30, 2), dtype=int), k=2, alphabet_size=2)
        assert d.counts.sum() == 28
        assert d.counts.max() == 28  # all mass on the all-ones block
        assert empirical_entropy(d) == 0.0

    def test_window_count_always_n_minus_k(self):
        rng = np.random.default_rng(0)
        for n, k in [(10, 1), (57, 3), (200, 2)]:
            path = rng.integers(0, 2, size=(n, 3))
            d = empirical_block_distribution(path, k=k, alphabet_size=2)
            assert d.counts.sum() == n - k

    def test_large_uniform_path_concentration(self):
        rng = np.random.default_rng(1)
        path = rng.integers(0, 2, size=(1_000_000, 3))
        d = empirical_block_distribution(path, k=1, alphabet_size=2)
        assert np.abs(d.probabilities() - 1.0 / 64).max() <= 0.005

    def test_path_shorter_than_block_rejected(self):
        with pytest.raises(DomainError):
            empirical_block_distribution(np.zeros((2, 2), dtype=int), k=2, alphabet_size=2)
        with pytest.raises(DomainError):
            empirical_block_distribution(np.zeros((5, 2), dtype=int), k=0, alphabet_size=2)


class TestMarginalize:
    def test_keep_all_is_identity(self):
        d = empirical_block_distribution(np.array([[0], [1], [1]]), k=1)
        same = marginalize(d, set(d.slots))
        assert np.array_equal(same.counts, d.counts)

    def test_keep_second_slot(self):
        d = empirical_block_distribution(np.array([[0], [1], [1]]), k=1)
        m = marginalize(d, {(0, 1)})
        assert m.counts.tolist() == [0, 2]
        assert m.probabilities()[1] == 1.0

    def test_uniform_stays_uniform(self):
        d = _dist(np.full(16, 3), encoding.canonical_slots(2, 2), 2, 1, 2, 48)
        m = marginalize(d, {(0, 0), (1, 1)})
        assert np.array_equal(m.counts, np.full(4, 12))

    def test_mass_preserved(self):
        rng = np.random.default_rng(2)
        d = empirical_block_distribution(rng.integers(0, 3, size=(50, 2)), k=1, alphabet_size=3)
        m = marginalize(d, {(1, 0)})
        assert m.counts.sum() == d.counts.sum()

    def test_empty_keep_rejected(self):
        d = empirical_block_distribution(np.array([[0], [1], [1]]), k=1)
        with pytest.raises(DomainError):
            marginalize(d, set())
        with pytest.raises(DomainError):
            marginalize(d, {(5, 5)})


class TestEntropy:
    def test_unit_mass_zero(self):
        d = _dist([4, 0, 0, 0], encoding.canonical_slots(1, 2), 1, 1, 2, 4)
        assert empirical_entropy(d) == 0.0

    def test_uniform_cells(self):
        for s in (1, 2, 3):
            cells = 2**s
            d = _dist(
                np.full(cells, 5),
                tuple((0, t) for t in range(s)),
                1,
                s - 1,
                2,
                5 * cells,
            )
            assert empirical_entropy(d) == pytest.approx(s * math.log(2), rel=1e-13)

    def test_dyadic_closed_form(self):
        d = _dist([2, 1, 1, 0], encoding.canonical_slots(1, 2), 1, 1, 2, 4)
        assert empirical_entropy(d) == pytest.approx(1.5 * math.log(2), rel=1e-13)

    def test_bounded_by_log_cells(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            counts = rng.integers(0, 10, size=8)
            if counts.sum() == 0:
                continue
            d = _dist(counts, encoding.canonical_slots(3, 1), 3, 0, 2, int(counts.sum()))
            h = empirical_entropy(d)
            assert -1e-12 <= h <= 3 * math.log(2) + 1e-12

    def test_marginal_entropy_no_larger_than_joint(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            path = rng.integers(0, 2, size=(60, 2))
            d = empirical_block_distribution(path, k=1, alphabet_size=2)
            h_joint = empirical_entropy(d)
            for keep in [{(0, 0)}, {(0, 0), (1, 1)}, {(1, 0), (1, 1)}]:
                assert empirical_entropy(marginalize(d, keep)) <= h_joint + 1e-12


def _direct_conditional_mi(dist, i, j):
    """Conditional MI summed block by block: the independent reference route."""
    full, no_now, others, others_past = encoding.directed_info_slot_sets(dist.m, dist.k, i, j)
    a = dist.alphabet_size
    n_slots = len(dist.slots)
    p_full = (dist.counts / dist.total).reshape((a,) * n_slots)

    def expand(keep):
        marg = marginalize(dist, keep)
        shape = tuple(a if s in keep else 1 for s in dist.slots)
        return (marg.counts / marg.total).reshape(shape)

    p_no_now = expand(no_now)
    p_others = expand(others)
    p_cond = expand(others_past)
    mask = p_full > 0
    num = p_full * p_cond
    den = p_no_now * p_others
    return float((p_full[mask] * np.log(num[mask] / den[mask])).sum())


class TestPlugInDirectedInfo:
    def test_constant_target_column_gives_zero(self):
        rng = np.random.default_rng(5)
        path = rng.integers(0, 2, size=(200, 2))
        path[:, 1] = 1
        stat = plug_in_directed_info(path, 1, 0, 1, alphabet_size=2)
        assert stat.di_hat == 0.0
        assert stat.lam == 0.0

    def test_perfect_copy_approaches_log2(self):
        rng = np.random.default_rng(6)
        x = rng.integers(0, 2, size=100_000)
        y = np.empty_like(x)
        y[1:] = x[:-1]
        y[0] = 0
        path = np.stack([x, y], axis=1)
        stat = plug_in_directed_info(path, 1, 0, 1)
        assert stat.di_hat == pytest.approx(math.log(2), abs=0.01)
        assert stat.lam == pytest.approx((path.shape[0] - 1) * stat.di_hat, abs=1e-9)

    def test_matches_direct_conditional_mi_sum(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            path = rng.integers(0, 2, size=(400, 3))
            dist = empirical_block_distribution(path, k=1, alphabet_size=2)
            for (i, j) in [(0, 1), (2, 0)]:
                stat = plug_in_directed_info(path, 1, i, j, alphabet_size=2)
                ref = _direct_conditional_mi(dist, i, j)
                assert stat.di_hat == pytest.approx(max(ref, 0.0), abs=1e-9)

    def test_nonnegative_on_random_paths(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            path = rng.integers(0, 2, size=(30, 3))
            for (i, j) in [(0, 1), (1, 2), (2, 0)]:
                assert plug_in_directed_info(path, 1, i, j, alphabet_size=2).di_hat >= 0.0

    def test_alphabet_relabeling_invariance(self):
        rng = np.random.default_rng(9)
        path = rng.integers(0, 3, size=(500, 3))
        perm = np.array([2, 0, 1])
        relabeled = perm[path]
        for (i, j) in [(0, 1), (1, 0)]:
            a = plug_in_directed_info(path, 1, i, j, alphabet_size=3).di_hat
            b = plug_in_directed_info(relabeled, 1, i, j, alphabet_size=3).di_hat
            assert a == pytest.approx(b, abs=1e-12)

    def test_self_edge_rejected(self):
        with pytest.raises(DomainError):
            plug_in_directed_info(np.zeros((10, 2), dtype=int), 1, 1, 1, alphabet_size=2)


class TestLogLikelihoodRatio:
    def test_constant_path_zero(self):
        path = np.zeros((40, 3), dtype=int)
        assert log_likelihood_ratio(path, 1, 0, 1, alphabet_size=2) == 0.0

    def test_identity_with_plug_in(self):
        model = copy_channel_model(0.1)
        for seed in (1, 2, 3):
            path = simulate(model, 10_000, seed=seed)
            for (i, j) in [(0, 1), (1, 0), (2, 1)]:
                lam = log_likelihood_ratio(path, 1, i, j)
                stat = plug_in_directed_info(path, 1, i, j)
                assert abs(lam - stat.lam) <= 1e-9 * (path.n - 1)

    def test_identity_on_order_two_blocks(self):
        adj = np.zeros((2, 2), dtype=bool)
        adj[0, 1] = True
        model = build_random_model(2, 2, 2, adj, seed=3)
        path = simulate(model, 4000, seed=5)
        lam = log_likelihood_ratio(path, 2, 0, 1)
        stat = plug_in_directed_info(path, 2, 0, 1)
        assert abs(lam - stat.lam) <= 1e-9 * (path.n - 2)

    def test_nonnegative(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            path = rng.integers(0, 2, size=(50, 3))
            assert log_likelihood_ratio(path, 1, 0, 1, alphabet_size=2) >= -1e-10

    def test_null_replicas_scale_like_dof(self):
        # independence-structured model: replica-mean of 2*Lambda near dof=24
        model = build_random_model(3, 1, 2, np.zeros((3, 3), bool), seed=2)
        vals = []
        for seed in range(60):
            path = simulate(model, 4000, seed=seed)
            vals.append(2.0 * log_likelihood_ratio(path, 1, 0, 1))
        assert abs(np.mean(vals) - 24) < 6.0


class TestEdgeStatCsv:
    def test_format(self):
        stats = [EdgeStatistic(i=0, j=1, n=100, k=1, di_hat=0.123456789123, lam=12.2222222332)]
        buf = io.StringIO()
        write_edge_stats_csv(stats, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "i,j,n,k,di_hat,lambda"
        assert lines[1] == "0,1,100,1,0.123456789,12.2222222"
