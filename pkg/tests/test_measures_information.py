import itertools
import math

import numpy as np
import pytest

from causnet.core import EmbeddingSpec, TimeSeriesSet, delay_embed, standardize
from causnet.errors import TooFewSamples
from causnet.measures.information import (
    KnnConfig,
    TooFewSamplesWarning,
    _plugin_cmi,
    _rank_of_future,
    _rank_patterns,
    knn_cmi,
    knn_mi,
    mixed_embedding,
    pmime,
    pte,
    select_conditioning,
    symbolic_te,
    te,
)
from causnet.significance import AdjacencyNetwork, binarize_positive
from causnet.systems import gen_henon


class TestKnnMi:
    def test_gaussian_closed_form(self, rng):
        rho = 0.9
        z = rng.multivariate_normal([0, 0], [[1, rho], [rho, 1]], size=5000)
        analytic = -0.5 * math.log(1 - rho**2)
        assert knn_mi(z[:, 0], z[:, 1]) == pytest.approx(analytic, abs=0.05)

    def test_independent_uniforms_near_zero(self):
        vals = []
        for seed in range(10):
            r = np.random.default_rng(seed)
            vals.append(knn_mi(r.uniform(size=2000), r.uniform(size=2000)))
        assert abs(np.mean(vals)) < 0.05

    def test_duplicate_series_saturates(self, rng):
        x = rng.normal(size=2000)
        assert knn_mi(x, x) > 3.0

    def test_too_few_samples(self, rng):
        with pytest.raises(TooFewSamples):
            knn_mi(rng.normal(size=20), rng.normal(size=20))

    def test_deterministic(self, rng):
        x, y = rng.normal(size=(2, 500))
        assert knn_mi(x, y) == knn_mi(x, y)


class TestKnnCmi:
    def test_empty_condition_reduces_to_mi(self, rng):
        x, y = rng.normal(size=(2, 600))
        mi = knn_mi(x, y)
        assert knn_cmi(x, y, None) == pytest.approx(mi, abs=1e-12)
        assert knn_cmi(x, y, np.empty((600, 0))) == pytest.approx(mi, abs=1e-12)

    def test_common_cause_screened_off(self, rng):
        z = rng.standard_normal(5000)
        x = 0.8 * z + 0.6 * rng.standard_normal(5000)
        y = 0.8 * z + 0.6 * rng.standard_normal(5000)
        assert knn_mi(x, y) > 0.2
        assert knn_cmi(x, y, z) < 0.05

    def test_gaussian_partial_correlation(self, rng):
        # x = a z + e1, y = b z + c x + e2: partial correlation of (x, y)
        # given z comes from the residual regression coefficient c
        a, b, c = 0.9, 0.5, 0.4
        z = rng.standard_normal(5000)
        x = a * z + rng.standard_normal(5000)
        y = b * z + c * x + rng.standard_normal(5000)
        rho_partial = c / math.sqrt(c * c + 1.0)
        analytic = -0.5 * math.log(1 - rho_partial**2)
        assert knn_cmi(x, y, z) == pytest.approx(analytic, abs=0.05)


class TestTransferEntropy:
    def test_null_average_near_zero(self, white_noise):
        spec = EmbeddingSpec(m=2)
        vals = []
        for seed in range(10):
            ts = white_noise(n=2048, K=2, seed=seed)
            vals.append(te(ts, 0, 1, spec))
        assert abs(np.mean(vals)) < 0.05

    def test_henon_true_pairs_dominate(self):
        spec = EmbeddingSpec(m=2)
        wins = 0
        for seed in range(10):
            ts, graph = gen_henon(5, 0.2, 512, seed=seed)
            ts = standardize(ts)
            vals = np.full((5, 5), -np.inf)
            for i in range(5):
                for j in range(5):
                    if i != j:
                        vals[i, j] = te(ts, i, j, spec)
            order = np.argsort(vals, axis=None)[::-1][:6]
            top = np.zeros((5, 5), dtype=int)
            top[np.unravel_index(order, (5, 5))] = 1
            wins += int(np.array_equal(top, graph.adjacency))
        assert wins >= 6

    def test_directional_asymmetry(self):
        ts, _ = gen_henon(3, 0.4, 1024, seed=1)
        ts = standardize(ts)
        spec = EmbeddingSpec(m=2)
        assert te(ts, 0, 1, spec) > te(ts, 1, 0, spec) + 0.05


class TestPartialTransferEntropy:
    def test_empty_conditioning_equals_te(self, henon5):
        ts, _ = henon5
        spec = EmbeddingSpec(m=2)
        assert pte(ts, 0, 1, spec, conditioning=()) == pytest.approx(
            te(ts, 0, 1, spec), abs=1e-12
        )

    def test_conditioning_reduces_indirect_flow(self):
        spec = EmbeddingSpec(m=1)
        diffs = []
        for seed in range(6):
            rng = np.random.default_rng(seed)
            n = 2048
            x = np.zeros((n + 50, 3))
            e = rng.standard_normal((n + 50, 3))
            for t in range(1, n + 50):
                x[t, 0] = 0.5 * x[t - 1, 0] + e[t, 0]
                x[t, 1] = 0.5 * x[t - 1, 1] + 0.8 * x[t - 1, 0] + e[t, 1]
                x[t, 2] = 0.5 * x[t - 1, 2] + 0.8 * x[t - 1, 1] + e[t, 2]
            ts = standardize(TimeSeriesSet(x[50:]))
            diffs.append(te(ts, 0, 2, spec) - pte(ts, 0, 2, spec, conditioning=(1,)))
        assert np.mean(diffs) > 0.0

    def test_rejects_driver_in_conditioning(self, henon5):
        ts, _ = henon5
        with pytest.raises(ValueError):
            pte(ts, 0, 1, EmbeddingSpec(m=2), conditioning=(0,))


class TestSelectConditioning:
    def test_small_system_returns_all_remaining(self, henon5):
        ts, _ = henon5
        assert set(select_conditioning(ts, 0, 1)) == {2, 3, 4}

    def test_duplicated_driver_ranks_first(self, rng):
        base = rng.normal(size=(600, 5))
        base[:, 3] = base[:, 0] + 1e-6 * rng.normal(size=600)
        ts = standardize(TimeSeriesSet(base))
        chosen = select_conditioning(ts, 0, 1, count=1)
        assert chosen == (3,)

    def test_large_system_returns_count(self):
        ts, _ = gen_henon(25, 0.2, 256, seed=0)
        ts = standardize(ts)
        chosen = select_conditioning(ts, 10, 11, count=3)
        assert len(chosen) == 3
        assert not {10, 11} & set(chosen)

    def test_interior_driver_neighbor_found(self):
        hits = 0
        for seed in range(6):
            ts, _ = gen_henon(25, 0.3, 1024, seed=seed)
            ts = standardize(ts)
            chosen = select_conditioning(ts, 12, 20, count=3)
            hits += int(bool({11, 13} & set(chosen)))
        assert hits >= 4


def brute_force_plugin_cmi(a, b, c):
    """Dictionary-based plug-in estimate from the full joint histogram."""
    n = len(a)
    joint, ac, bc, cc = {}, {}, {}, {}
    for t in range(n):
        joint[(a[t], b[t], c[t])] = joint.get((a[t], b[t], c[t]), 0) + 1
        ac[(a[t], c[t])] = ac.get((a[t], c[t]), 0) + 1
        bc[(b[t], c[t])] = bc.get((b[t], c[t]), 0) + 1
        cc[c[t]] = cc.get(c[t], 0) + 1
    total = 0.0
    for (av, bv, cv), cnt in joint.items():
        p_abc = cnt / n
        total += p_abc * math.log(p_abc * (cc[cv] / n) / ((ac[(av, cv)] / n) * (bc[(bv, cv)] / n)))
    return total


class TestSymbolic:
    def test_rank_patterns_tie_break(self):
        # embedding row (x_t, x_{t-1}): time order is reversed; equal values
        # rank the earlier sample lower
        emb = np.array([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]])
        pats = _rank_patterns(emb)
        assert pats[0] == pats[1] != pats[2]

    def test_rank_of_future_extends_window(self):
        emb = np.array([[2.0, 1.0]])  # window (1, 2)
        assert _rank_of_future(emb, np.array([3.0]))[0] == 2
        assert _rank_of_future(emb, np.array([0.0]))[0] == 0
        assert _rank_of_future(emb, np.array([2.0]))[0] == 2  # tie: future is latest

    def test_plugin_matches_brute_force(self, rng):
        for trial in range(8):
            n = int(rng.integers(40, 200))
            a = rng.integers(0, 3, size=n)
            b = rng.integers(0, 4, size=n)
            c = rng.integers(0, 2, size=n)
            assert _plugin_cmi(a, b, c) == pytest.approx(
                brute_force_plugin_cmi(a, b, c), abs=1e-12
            )

    def test_symbolic_te_null_near_zero(self, white_noise):
        spec = EmbeddingSpec(m=2)
        vals = []
        for seed in range(10):
            ts = white_noise(n=2048, K=2, seed=seed)
            vals.append(symbolic_te(ts, 0, 1, spec, "ste"))
        assert abs(np.mean(vals)) < 0.05

    def test_monotone_series_gives_exact_zero(self):
        x = np.arange(300.0)
        ts = TimeSeriesSet(np.column_stack([x, x + 0.5]))
        for variant in ("ste", "terv"):
            assert symbolic_te(ts, 0, 1, EmbeddingSpec(m=2), variant) == 0.0

    def test_henon_coupling_detected(self):
        spec = EmbeddingSpec(m=3)
        true_vals, false_vals = [], []
        for seed in range(5):
            ts, graph = gen_henon(5, 0.3, 512, seed=seed)
            ts = standardize(ts)
            for variant in ("ste", "terv"):
                for i in range(5):
                    for j in range(5):
                        if i == j:
                            continue
                        v = symbolic_te(ts, i, j, spec, variant)
                        (true_vals if graph.adjacency[i, j] else false_vals).append(v)
        assert np.mean(true_vals) > np.mean(false_vals) + 0.05

    def test_sparse_histogram_warns(self, rng):
        ts = TimeSeriesSet(rng.normal(size=(80, 2)))
        with pytest.warns(TooFewSamplesWarning):
            symbolic_te(ts, 0, 1, EmbeddingSpec(m=3), "ste")

    def test_requires_m_at_least_two(self, henon5):
        ts, _ = henon5
        with pytest.raises(ValueError):
            symbolic_te(ts, 0, 1, EmbeddingSpec(m=1), "ste")


class TestPmime:
    def test_entries_bounded(self, henon5):
        ts, _ = henon5
        cm = pmime(ts, 5)
        off = cm.offdiag()
        assert np.all(off >= 0.0)
        assert np.all(off <= 1.05)

    def test_henon_exact_recovery_majority(self):
        exact = 0
        for seed in range(5):
            ts, graph = gen_henon(5, 0.2, 512, seed=seed)
            cm = pmime(standardize(ts), 5)
            net = binarize_positive(cm)
            exact += int(np.array_equal(net.matrix, graph.adjacency))
        assert exact >= 3

    def test_deterministic(self, henon5):
        ts, _ = henon5
        a = pmime(ts, 3)
        b = pmime(ts, 3)
        assert np.array_equal(np.nan_to_num(a.values), np.nan_to_num(b.values))

    def test_zero_rows_for_unselected_drivers(self, henon5):
        ts, _ = henon5
        emb = mixed_embedding(ts, 0, 5)
        cm = pmime(ts, 5)
        for i in range(1, 5):
            if i not in emb.selected.variables():
                assert cm.values[i, 0] == 0.0

    def test_white_noise_selects_nothing(self, white_noise):
        ts = white_noise(n=512, K=3, seed=11)
        emb = mixed_embedding(ts, 0, 4)
        # the first candidate must clear a positive information hurdle
        assert len(emb.selected) <= 2
