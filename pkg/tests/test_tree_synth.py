import math

import numpy as np
import pytest
from scipy import stats

from gwising._rng import make_rng, replica_rng
from gwising.degree_model import DegreeDistribution, size_biased
from gwising.tree_synth import (
    VertexCapExceeded,
    expected_distinguished,
    gen_config,
    gen_gw,
    gen_gws,
    gen_size_biased,
    generate,
    growth_trace,
    immigrant_tail,
    normalized_growth,
    read_tree,
    sigma_rate,
    simulate_counts,
    write_tree,
)

TWO_THREE = DegreeDistribution.from_dict({2: 0.5, 3: 0.5})
R = 10_000


def ensemble(fn, replicas=R, base=2024):
    return [fn(replica_rng(base, i)) for i in range(replicas)]


def within_3se(samples, target):
    x = np.asarray(samples, dtype=np.float64)
    se = x.std(ddof=1) / math.sqrt(x.size)
    return abs(x.mean() - target) <= 3 * se


class TestGW:
    def test_mean_shell_3(self):
        shells = [t.shell_sizes()[3] for t in ensemble(lambda r: gen_gw(TWO_THREE, 3, r))]
        assert within_3se(shells, 1.5**3)

    def test_depth_zero(self):
        t = gen_gw(TWO_THREE, 0, make_rng(1))
        assert t.n_vertices == 1 and t.n_edges == 0
        assert t.check() == []

    def test_deterministic(self):
        a = gen_gw(TWO_THREE, 8, make_rng(99))
        b = gen_gw(TWO_THREE, 8, make_rng(99))
        assert np.array_equal(a.parent, b.parent)
        assert np.array_equal(a.offspring, b.offspring)

    def test_degree_law_chi_square(self):
        # non-root degrees (offspring + 1) follow p
        degs = np.concatenate(
            [t.degree()[1:] for t in ensemble(lambda r: gen_gw(TWO_THREE, 5, r), replicas=500)]
        )
        observed = np.array([np.sum(degs == 2), np.sum(degs == 3)])
        res = stats.chisquare(observed, degs.size * np.array([0.5, 0.5]))
        assert res.pvalue > 1e-3

    def test_structure(self):
        t = gen_gw(DegreeDistribution.power_law(2.5, 30), 6, make_rng(3))
        assert t.check() == []
        for v in range(min(t.n_vertices, 200)):
            for c in t.children(v):
                assert t.parent[c] == v


class TestConfig:
    def test_offspring_ratio(self):
        trees = ensemble(lambda r: gen_config(TWO_THREE, 2, r))
        ratios = [t.shell_sizes()[2] / t.shell_sizes()[1] for t in trees]
        assert within_3se(ratios, 1.6)

    def test_root_degree_frequencies(self):
        roots = np.array([t.offspring[0] for t in ensemble(lambda r: gen_config(TWO_THREE, 1, r))])
        assert abs(np.mean(roots == 2) - 0.5) < 0.015
        assert abs(np.mean(roots == 3) - 0.5) < 0.015

    def test_depth_zero(self):
        assert gen_config(TWO_THREE, 0, make_rng(1)).n_vertices == 1


class TestGWS:
    def test_first_generation(self):
        traces = [growth_trace(t) for t in ensemble(lambda r: gen_gws(TWO_THREE, 2, 3, r))]
        assert all(tr.Lhat[1] == 2 for tr in traces)
        assert within_3se([tr.Lhat[2] for tr in traces], 3.2)
        assert within_3se([tr.Y[1] for tr in traces], 0.6)
        assert all(tr.Y[2:].sum() == 0 for tr in traces)

    def test_s_one_single_ray(self):
        for i in range(50):
            tr = growth_trace(gen_gws(TWO_THREE, 1, 8, replica_rng(5, i)))
            assert np.all(tr.Lhat == 1)

    def test_size_biased_alias(self):
        t = gen_size_biased(TWO_THREE, 6, make_rng(4))
        assert np.all(growth_trace(t).Lhat == 1)
        assert t.check() == []

    def test_lhat_bound(self):
        for i in range(300):
            t = gen_gws(DegreeDistribution.power_law(2.5, 100), 2, 7, replica_rng(8, i))
            assert np.all(growth_trace(t).Lhat <= 2.0 ** np.arange(8))
            assert t.check() == []

    def test_visualization_root_law(self):
        # root keeps k - 1 children, k ~ p_hat, so E[Lhat_1] = 1.6 and E[Lhat_n] = 1.6**n
        trees = ensemble(lambda r: gen_gws(TWO_THREE, 2, 3, r, root_law="visualization"), replicas=4000)
        traces = [growth_trace(t) for t in trees]
        assert within_3se([tr.Lhat[1] for tr in traces], 1.6)
        assert within_3se([tr.Lhat[3] for tr in traces], 1.6**3)
        assert expected_distinguished(TWO_THREE, 2, 3, "visualization") == pytest.approx(1.6**3)
        assert expected_distinguished(TWO_THREE, 2, 3, "process") == pytest.approx(2 * 1.6**2)


class TestTraces:
    def test_gw_has_no_distinguished(self):
        tr = growth_trace(gen_gw(TWO_THREE, 6, make_rng(2)))
        assert np.all(tr.Lhat == 0)

    def test_depth_zero(self):
        tr = growth_trace(gen_gw(TWO_THREE, 0, make_rng(2)))
        assert tr.shell.tolist() == [1]

    def test_normalized_mean_one(self):
        traces = [growth_trace(t) for t in ensemble(lambda r: gen_gw(TWO_THREE, 10, r), replicas=3000)]
        L = np.array([normalized_growth(tr, 1.5)[1] for tr in traces])
        for n in range(11):
            assert within_3se(L[:, n], 1.0)

    def test_large_c_decays(self):
        tr = growth_trace(gen_gw(TWO_THREE, 10, make_rng(6)))
        shell_ratio, _ = normalized_growth(tr, 10.0)
        assert np.all(shell_ratio <= 0.3 ** np.arange(11) + 1e-15)
        assert np.all(np.diff(shell_ratio) < 0)

    def test_gws_bounded_with_margin(self):
        c = max(1.5, 2**2) + 0.5
        ratios = [
            normalized_growth(growth_trace(gen_gws(TWO_THREE, 2, 10, replica_rng(12, i))), c)[0]
            for i in range(300)
        ]
        assert np.max(ratios) < 10

    def test_immigrant_tail_two_three(self):
        tr = growth_trace(gen_gws(TWO_THREE, 2, 6, make_rng(21)))
        tail = immigrant_tail(tr, 1.5)
        assert np.allclose(tail, tr.Y[1] / 1.5)

    def test_immigrant_tail_zero(self):
        tr = growth_trace(gen_gws(TWO_THREE, 1, 5, make_rng(1)))
        tr = type(tr)(tr.Lhat, tr.L, np.zeros_like(tr.Y))
        assert np.all(immigrant_tail(tr, 2.0) == 0)

    def test_immigrant_tail_power_law(self):
        d = DegreeDistribution.power_law(2.5, 200)
        c = 3 ** (1 / 0.4)
        settled = 0
        for i in range(1000):
            tr = simulate_counts("gws", d, 12, replica_rng(5, i), s=3, track_ordinary=False)
            tail = immigrant_tail(tr, c)
            settled += tail[-1] == 0 or (tail[-1] - tail[-2]) / tail[-1] < 1e-3
        assert settled >= 950

    def test_counts_match_tree_law(self):
        gen = [growth_trace(gen_gws(TWO_THREE, 2, 5, replica_rng(3, i))).L[5] for i in range(4000)]
        cnt = [simulate_counts("gws", TWO_THREE, 5, replica_rng(4, i), s=2).L[5] for i in range(4000)]
        se = math.sqrt(np.var(gen) / 4000 + np.var(cnt) / 4000)
        assert abs(np.mean(gen) - np.mean(cnt)) < 4 * se


class TestSigma:
    def test_two_three(self):
        assert sigma_rate(size_biased(TWO_THREE), 2) == pytest.approx(1.6, abs=1e-15)

    def test_equals_s(self):
        d = DegreeDistribution.from_dict({4: 0.5, 6: 0.5})
        assert sigma_rate(size_biased(d), 3) == 3.0

    def test_near_lower_edge(self):
        d = DegreeDistribution.from_dict({2: 0.999, 3: 0.001})
        sigma = sigma_rate(size_biased(d), 2)
        assert 1 < sigma < 1.01

    def test_matches_expected_growth(self):
        sb = size_biased(TWO_THREE)
        assert expected_distinguished(TWO_THREE, 2, 5) / expected_distinguished(TWO_THREE, 2, 4) == pytest.approx(
            sigma_rate(sb, 2)
        )


class TestIO:
    def test_round_trip(self, tmp_path):
        t = gen_gws(TWO_THREE, 2, 5, make_rng(17))
        path = tmp_path / "t.tree"
        write_tree(t, path, dist=TWO_THREE, seed=17)
        back, header = read_tree(path)
        assert header["model"] == "gws" and header["seed"] == "17"
        assert header["dist_hash"] == TWO_THREE.fingerprint()
        for name in ("parent", "level", "distinguished", "offspring"):
            assert np.array_equal(getattr(back, name), getattr(t, name))
        assert back.depth == t.depth and back.s == 2

    def test_vertex_cap(self):
        with pytest.raises(VertexCapExceeded) as info:
            generate("gw", TWO_THREE, 40, make_rng(1), vertex_cap=500)
        assert info.value.cap == 500
        assert info.value.requested > 500

    def test_truncate_is_prefix(self):
        t = gen_gw(TWO_THREE, 7, make_rng(30))
        small = t.truncate(4)
        assert small.n_vertices == t.level_offsets[5]
        assert small.n_stubs == t.shell_sizes()[5]
        assert small.check() == []
