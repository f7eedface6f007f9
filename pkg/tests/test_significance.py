import numpy as np
import pytest

from causnet.core import CausalityMatrix, TimeSeriesSet, standardize
from causnet.errors import SeriesTooShort
from causnet.significance import (
    AdjacencyNetwork,
    binarize_density,
    binarize_magnitude,
    binarize_positive,
    binarize_significance,
    rank_p_value,
    surrogate_test,
    threshold_from_density,
    time_shift_surrogate,
)


class TestTimeShiftSurrogate:
    def test_preserves_multiset(self, rng):
        x = rng.normal(size=500)
        s = time_shift_surrogate(x, seed=3)
        assert np.array_equal(np.sort(s), np.sort(x))

    def test_shift_stays_outside_guard_zone(self):
        x = np.arange(300.0)
        for seed in range(200):
            s = time_shift_surrogate(x, seed=seed)
            w = int(s[0])  # first element reveals the rotation
            assert 20 <= w <= 280

    def test_circular_acf_nearly_invariant(self, rng):
        # a cyclic rotation changes the circular autocorrelation not at all;
        # the plain lag-1 sample ACF moves only through the seam points
        x = np.cumsum(rng.normal(size=2000))
        x = (x - x.mean()) / x.std()

        def acf1(v):
            v = v - v.mean()
            return float(np.dot(v[:-1], v[1:]) / np.dot(v, v))

        s = time_shift_surrogate(x, seed=1)
        assert abs(acf1(s) - acf1(x)) < 0.05

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            time_shift_surrogate(np.arange(50.0), seed=0)


class TestRankPValue:
    def test_paper_arithmetic_extremes(self):
        assert rank_p_value(101, 100) == pytest.approx(1 - (101 - 0.326) / 101.348, abs=1e-12)
        assert rank_p_value(101, 100) == pytest.approx(0.00665, abs=5e-6)
        assert rank_p_value(1, 100) == pytest.approx(0.99335, abs=5e-6)

    def test_strictly_decreasing_and_open_interval(self):
        for M in (19, 100, 250):
            ps = [rank_p_value(r, M) for r in range(1, M + 2)]
            assert all(a > b for a, b in zip(ps, ps[1:]))
            assert 0.0 < min(ps) and max(ps) < 1.0


class TestSurrogateTest:
    def test_original_largest_gives_smallest_p(self, white_noise):
        ts = white_noise(n=256, K=2, seed=0)
        calls = {"n": 0}

        def evaluate(t, i, j):
            calls["n"] += 1
            return 5.0 if calls["n"] == 1 else float(np.random.default_rng(calls["n"]).normal())

        res = surrogate_test(evaluate, ts, 0, 1, M=100, seed=1)
        assert res.rank == 101
        assert res.p_value == pytest.approx(0.00665, abs=5e-6)

    def test_all_tied_values_are_not_significant(self, white_noise):
        ts = white_noise(n=256, K=2, seed=0)
        res = surrogate_test(lambda t, i, j: 0.0, ts, 0, 1, M=100, seed=1)
        assert res.rank == 1
        assert res.p_value > 0.99

    def test_deterministic_given_seed(self, white_noise):
        ts = white_noise(n=300, K=2, seed=1)

        def evaluate(t, i, j):
            return float(np.corrcoef(t.channel(i)[:-1], t.channel(j)[1:])[0, 1])

        a = surrogate_test(evaluate, ts, 0, 1, M=25, seed=7)
        b = surrogate_test(evaluate, ts, 0, 1, M=25, seed=7)
        assert a.original == b.original
        assert np.array_equal(a.surrogates, b.surrogates)
        assert a.p_value == b.p_value

    def test_requires_enough_surrogates(self, white_noise):
        ts = white_noise(n=256, K=2, seed=0)
        with pytest.raises(ValueError):
            surrogate_test(lambda t, i, j: 0.0, ts, 0, 1, M=5, seed=1)


class TestBinarizations:
    def test_all_half_pvalues_give_empty_network(self):
        net = binarize_significance(np.full((4, 4), 0.5), alpha=0.05)
        assert net.edges == 0

    def test_alpha_nesting(self, rng):
        p = rng.uniform(size=(6, 6))
        nets = [binarize_significance(p, a).matrix for a in (0.01, 0.05, 0.1)]
        assert np.all(nets[0] <= nets[1])
        assert np.all(nets[1] <= nets[2])

    def test_density_exact_count_and_nesting(self, rng):
        cm = CausalityMatrix(rng.normal(size=(5, 5)), "m")
        n4 = binarize_density(cm, 4)
        n6 = binarize_density(cm, 6)
        assert n4.edges == 4 and n6.edges == 6
        assert np.all(n4.matrix <= n6.matrix)

    def test_density_complete_network(self, rng):
        cm = CausalityMatrix(rng.normal(size=(4, 4)), "m")
        assert binarize_density(cm, 12).edges == 12

    def test_density_tie_break_is_lexicographic(self):
        cm = CausalityMatrix(np.ones((4, 4)), "m")
        net = binarize_density(cm, 3)
        assert [tuple(e) for e in np.argwhere(net.matrix)] == [(0, 1), (0, 2), (0, 3)]

    def test_magnitude_extremes(self, rng):
        cm = CausalityMatrix(rng.normal(size=(4, 4)), "m")
        assert binarize_magnitude(cm, np.inf).edges == 0
        assert binarize_magnitude(cm, -np.inf).edges == 12

    def test_single_realization_threshold_recovers_density(self, rng):
        cm = CausalityMatrix(rng.normal(size=(6, 6)), "m")
        th = threshold_from_density([cm], 7)
        assert binarize_magnitude(cm, th).edges == 7

    def test_positive_rule_counts_positive_entries(self, rng):
        vals = rng.normal(size=(5, 5))
        cm = CausalityMatrix(vals, "m")
        off = ~np.eye(5, dtype=bool)
        assert binarize_positive(cm).edges == int((vals[off] > 0).sum())

    def test_adjacency_validation(self):
        with pytest.raises(ValueError):
            AdjacencyNetwork(np.array([[1, 0], [0, 0]]))
        with pytest.raises(ValueError):
            AdjacencyNetwork(np.array([[0, 2], [0, 0]]))
