import numpy as np
import pytest

from specrank.errors import InvalidInterval
from specrank.ldos import (
    cdos,
    collect_ritz,
    count_eigs_lanczos,
    estimate_rank_lanczos,
    evaluate_dos_lanczos,
    rank_lanczos,
)
from specrank.lanczos import RitzSpectrum
from specrank.ldos import RitzData
from specrank.linops import Diagonal
from specrank.oracle import ExactSpectrum, exact_count, exact_dos
from specrank.probe import ProbeConfig, generate_probes


def make_data(per_probe, n):
    rules = [RitzSpectrum(np.asarray(nodes, float), np.asarray(weights, float)) for nodes, weights in per_probe]
    return RitzData(per_probe=rules, n=n, steps=max(len(p[0]) for p in per_probe))


class TestCollectRitz:
    def test_scalar_operator(self):
        op = Diagonal([3.0])
        probes = generate_probes(1, ProbeConfig(num_probes=4, seed=0))
        data = collect_ritz(op, 1, probes)
        for s in data.per_probe:
            np.testing.assert_allclose(s.nodes, [3.0])
            np.testing.assert_allclose(s.weights, [1.0])

    def test_full_krylov_recovers_eigenvalues(self):
        values = np.linspace(0.3, 2.1, 12)
        op = Diagonal(values)
        probes = generate_probes(12, ProbeConfig(num_probes=5, seed=1))
        data = collect_ritz(op, 12, probes)
        for s in data.per_probe:
            np.testing.assert_allclose(s.nodes, values, atol=1e-8)

    def test_extreme_nodes_match_oracle(self):
        # Isolated extreme eigenvalues so a 50-step run pins both ends.
        rng = np.random.default_rng(2)
        values = np.sort(np.concatenate([[0.0], rng.uniform(0.1, 0.9, 498), [1.0]]))
        op = Diagonal(values)
        probes = generate_probes(500, ProbeConfig(num_probes=3, seed=7))
        data = collect_ritz(op, 50, probes)
        for s in data.per_probe:
            assert abs(s.nodes[0] - values[0]) <= 1e-6
            assert abs(s.nodes[-1] - values[-1]) <= 1e-6


class TestCounts:
    def test_interval_covering_all_nodes_counts_dimension(self):
        op = Diagonal(np.linspace(0.2, 0.8, 30))
        probes = generate_probes(30, ProbeConfig(num_probes=6, seed=3))
        data = collect_ritz(op, 10, probes)
        series = count_eigs_lanczos(data, 0.0, 1.0)
        np.testing.assert_allclose(series.per_probe, 30.0, atol=30 * 1e-12)

    def test_empty_interval_counts_zero(self):
        data = make_data([([0.5, 0.9], [0.4, 0.6])], n=10)
        assert count_eigs_lanczos(data, 0.0, 0.3).mean == 0.0

    def test_rejects_reversed_interval(self):
        data = make_data([([0.5], [1.0])], n=2)
        with pytest.raises(InvalidInterval):
            count_eigs_lanczos(data, 0.9, 0.1)

    def test_planted_gap_count_within_five_percent(self):
        rng = np.random.default_rng(4)
        values = np.concatenate([rng.uniform(0.0, 0.1, 700), rng.uniform(0.5, 1.0, 300)])
        op = Diagonal(values)
        probes = generate_probes(1000, ProbeConfig(num_probes=30, seed=5))
        data = collect_ritz(op, 50, probes)
        series = count_eigs_lanczos(data, 0.3, 1.1)
        exact = exact_count(ExactSpectrum(np.sort(values)), 0.3, 1.1)
        assert abs(series.mean - exact) / exact <= 0.05

    def test_partition_additivity_per_probe(self):
        op = Diagonal(np.linspace(0.0, 1.0, 80))
        probes = generate_probes(80, ProbeConfig(num_probes=5, seed=6))
        data = collect_ritz(op, 20, probes)
        left = count_eigs_lanczos(data, -0.1, 0.4).per_probe
        right = count_eigs_lanczos(data, 0.4, 1.1).per_probe
        whole = count_eigs_lanczos(data, -0.1, 1.1).per_probe
        # Disjoint node partition; only float summation order differs.
        np.testing.assert_allclose(left + right, whole, rtol=1e-13, atol=1e-10)


class TestRank:
    def test_eps_below_all_nodes_gives_dimension(self):
        data = make_data([([0.5, 0.9], [0.4, 0.6]), ([0.4, 1.0], [0.7, 0.3])], n=25)
        estimate = rank_lanczos(data, 0.1)
        np.testing.assert_allclose(estimate.series.per_probe, 25.0)

    def test_eps_above_all_nodes_gives_zero(self):
        data = make_data([([0.5, 0.9], [0.4, 0.6])], n=25)
        assert rank_lanczos(data, 2.0).mean == 0.0

    def test_complement_identity_per_probe(self):
        op = Diagonal(np.linspace(0.05, 0.95, 60))
        probes = generate_probes(60, ProbeConfig(num_probes=4, seed=8))
        data = collect_ritz(op, 25, probes)
        eps = 0.4
        lo = 0.0  # strictly below every node of a PSD-ish spectrum
        counts = count_eigs_lanczos(data, lo - 1e-9, eps).per_probe
        ranks = rank_lanczos(data, eps).series.per_probe
        np.testing.assert_allclose(counts + ranks, 60.0, atol=1e-9)

    def test_monotone_nonincreasing_in_eps(self):
        op = Diagonal(np.linspace(0.0, 1.0, 90))
        probes = generate_probes(90, ProbeConfig(num_probes=3, seed=9))
        data = collect_ritz(op, 30, probes)
        means = [rank_lanczos(data, e).mean for e in np.linspace(-0.1, 1.1, 25)]
        assert all(a >= b - 1e-9 for a, b in zip(means, means[1:]))


class TestCdos:
    def test_prefix_sums(self):
        data = make_data([([1.0, 2.0], [0.25, 0.75])], n=5)
        curve, _ = cdos(data, 1.5)
        nodes, cumulative = curve.per_probe[0]
        np.testing.assert_allclose(nodes, [1.0, 2.0])
        np.testing.assert_allclose(cumulative, [0.25, 1.0])

    def test_rank_identical_to_complement_form(self):
        op = Diagonal(np.linspace(0.1, 1.3, 70))
        probes = generate_probes(70, ProbeConfig(num_probes=6, seed=10))
        data = collect_ritz(op, 24, probes)
        for eps in (0.05, 0.3, 0.77, 1.5):
            _, via_cdos = cdos(data, eps)
            direct = rank_lanczos(data, eps)
            np.testing.assert_array_equal(via_cdos.series.per_probe, direct.series.per_probe)

    def test_aggregated_curve_is_a_nondecreasing_cdf(self):
        op = Diagonal(np.linspace(0.0, 2.0, 60))
        probes = generate_probes(60, ProbeConfig(num_probes=5, seed=12))
        data = collect_ritz(op, 20, probes)
        curve, _ = cdos(data, 1.0)
        assert np.all(np.diff(curve.cumulative) >= -1e-12)
        assert curve.cumulative[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(curve.nodes) > 0)

    def test_full_krylov_cumulative_matches_exact_counts(self):
        values = np.linspace(0.2, 1.8, 15)
        op = Diagonal(values)
        probes = generate_probes(15, ProbeConfig(num_probes=2, seed=11))
        data = collect_ritz(op, 15, probes)
        spectrum = ExactSpectrum(values)
        curve, _ = cdos(data, 1.0)
        # Full Krylov with a uniform-component probe: n * cumulative weight at
        # node k equals the exact count up to that node.
        v_uniform = np.ones(15) / np.sqrt(15.0)
        data_u = collect_ritz(op, 15, [v_uniform])
        nodes, cumulative = cdos(data_u, 1.0)[0].per_probe[0]
        for k in range(len(nodes)):
            counted = exact_count(spectrum, values[0] - 1.0, nodes[k] + 1e-9)
            assert 15.0 * cumulative[k] == pytest.approx(counted, abs=1e-8)
        for _, cum in curve.per_probe:
            np.testing.assert_allclose(cum[-1], 1.0, atol=1e-10)


class TestLanczosDos:
    def test_single_node_is_a_unit_gaussian(self):
        data = make_data([([0.0], [1.0])], n=3)
        curve = evaluate_dos_lanczos(data, grid_points=600, blur=0.1)
        assert abs(curve.integral() - 1.0) <= 1e-3
        assert abs(curve.grid[int(np.argmax(curve.density))]) <= 2e-3

    def test_case1_morphology(self, case1):
        probes = generate_probes(case1.op.n, ProbeConfig(num_probes=8, seed=12))
        data = collect_ritz(case1.op, 50, probes)
        curve = evaluate_dos_lanczos(data)
        spike_at = curve.grid[int(np.argmax(curve.density))]
        assert spike_at < 0.05
        in_gap = curve.density[(curve.grid > 0.3) & (curve.grid < 0.7)]
        near_one = curve.density[(curve.grid > 0.93) & (curve.grid < 1.07)]
        assert in_gap.max() < 0.01 * curve.density.max()
        assert near_one.max() > 10 * in_gap.max()

    def test_matches_oracle_blur_on_full_krylov(self):
        # A probe with equal components in the eigenbasis carries exactly the
        # uniform spectral measure, so the regularized curves must coincide.
        values = np.linspace(0.1, 0.9, 24)
        op = Diagonal(values)
        v = np.ones(24) / np.sqrt(24.0)
        data = collect_ritz(op, 24, [v])
        blur = 0.05
        mine = evaluate_dos_lanczos(data, grid_points=512, blur=blur)
        reference = exact_dos(ExactSpectrum(values), grid_points=512, blur=blur)
        np.testing.assert_allclose(mine.grid, reference.grid, atol=1e-12)
        l1 = np.trapezoid(np.abs(mine.density - reference.density), mine.grid)
        assert l1 <= 1e-6

    def test_integral_close_to_one(self):
        op = Diagonal(np.linspace(0.0, 2.0, 150))
        probes = generate_probes(150, ProbeConfig(num_probes=10, seed=13))
        data = collect_ritz(op, 30, probes)
        curve = evaluate_dos_lanczos(data)
        assert abs(curve.integral() - 1.0) <= 0.01


class TestPipeline:
    def test_estimate_rank_with_manual_eps(self):
        rng = np.random.default_rng(14)
        values = np.concatenate([rng.uniform(0.0, 0.05, 600), rng.uniform(0.6, 1.0, 400)])
        op = Diagonal(values)
        estimate = estimate_rank_lanczos(op, steps=40, config=ProbeConfig(num_probes=20, seed=15), eps=0.3)
        exact = int((values > 0.3).sum())
        assert abs(estimate.mean - exact) / exact <= 0.05
        assert estimate.threshold.method == "manual"

    def test_estimate_rank_auto_threshold(self, case1):
        estimate = estimate_rank_lanczos(case1.op, steps=50, config=ProbeConfig(num_probes=30, seed=42))
        lo, hi = case1.gap
        assert lo < estimate.eps < hi
        assert abs(estimate.mean - 128.0) / 128.0 <= 0.04
        assert set(estimate.timings) >= {"lanczos", "threshold", "count"}
