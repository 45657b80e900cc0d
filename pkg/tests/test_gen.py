import numpy as np
import pytest

from specrank.errors import InvalidConfig
from specrank.gen import hadamard_lowrank, matern_covariance, planted_spectrum
from specrank.kpm import rank_kpm
from specrank.ldos import estimate_rank_lanczos
from specrank.oracle import dense_eigs, exact_count
from specrank.probe import ProbeConfig


class TestHadamardLowRank:
    def test_noiseless_spectrum_is_exact(self):
        op, truth = hadamard_lowrank(256, 16, sigma=0.0, seed=0)
        ev = dense_eigs(op).eigenvalues
        np.testing.assert_allclose(ev[-16:], 1.0, atol=1e-10)
        np.testing.assert_allclose(ev[:-16], 0.0, atol=1e-10)
        assert truth.true_rank == 16
        assert truth.snr_db is None

    def test_full_rank_scaled_hadamard_is_identity(self):
        op, _ = hadamard_lowrank(4, 4, sigma=0.0, seed=0)
        np.testing.assert_allclose(op.matrix, np.eye(4), atol=1e-12)

    def test_case1_realized_snr(self, case1):
        assert case1.truth.snr_db == pytest.approx(38.72, abs=0.3)

    def test_case2_case3_snr(self, case2, case3):
        assert case2.truth.snr_db == pytest.approx(14.63, abs=0.3)
        assert case3.truth.snr_db == pytest.approx(-7.12, abs=0.3)

    def test_noise_keeps_matrix_psd(self, case3):
        assert case3.spectrum.eigenvalues[0] >= -1e-8 * case3.spectrum.eigenvalues[-1]

    def test_requires_power_of_two(self):
        with pytest.raises(InvalidConfig, match="power of two"):
            hadamard_lowrank(100, 10)

    def test_requires_k_in_range(self):
        with pytest.raises(InvalidConfig):
            hadamard_lowrank(64, 65)

    def test_deterministic_in_seed(self):
        a1, _ = hadamard_lowrank(64, 8, sigma=0.01, seed=5)
        a2, _ = hadamard_lowrank(64, 8, sigma=0.01, seed=5)
        assert np.array_equal(a1.matrix, a2.matrix)
        a3, _ = hadamard_lowrank(64, 8, sigma=0.01, seed=6)
        assert not np.array_equal(a1.matrix, a3.matrix)


class TestMatern:
    def test_unit_diagonal(self):
        for kind, dims in (("1d", 40), ("2d", (6, 7))):
            op = matern_covariance(kind, dims)
            np.testing.assert_allclose(np.diag(op.matrix), 1.0, atol=1e-14)

    def test_1d_grid_is_psd(self):
        op = matern_covariance("1d", 2048, nu=0.5, length_scale=0.05)
        ev = dense_eigs(op).eigenvalues
        assert ev[0] >= -1e-8 * ev[-1]

    def test_rejects_unsupported_smoothness(self):
        with pytest.raises(InvalidConfig, match="closed forms"):
            matern_covariance("1d", 16, nu=1.0)

    def test_smoothness_orders_agree_at_zero_distance_only(self):
        a = matern_covariance("1d", 32, nu=0.5).matrix
        b = matern_covariance("1d", 32, nu=2.5).matrix
        assert a[0, 0] == b[0, 0] == 1.0
        assert not np.allclose(a, b)

    def test_2d_grid_estimators_match_oracle(self):
        # Smooth spectrum, no sharp gap: the threshold comes from the
        # slow-down rule and both estimators must still count accurately.
        op = matern_covariance("2d", (64, 64), nu=2.5, length_scale=0.1)
        spectrum = dense_eigs(op)
        top = float(spectrum.eigenvalues[-1]) + 1.0
        config = ProbeConfig(num_probes=30, seed=42)

        kpm_est = rank_kpm(op, degree=50, config=config)
        kpm_oracle = exact_count(spectrum, kpm_est.eps, top)
        assert 10 <= kpm_oracle <= 100
        assert abs(kpm_est.mean - kpm_oracle) / kpm_oracle <= 0.05

        lan_est = estimate_rank_lanczos(op, steps=50, config=config)
        lan_oracle = exact_count(spectrum, lan_est.eps, top)
        assert 10 <= lan_oracle <= 100
        assert abs(lan_est.mean - lan_oracle) / lan_oracle <= 0.05


class TestPlantedSpectrum:
    def test_two_ones_two_zeros(self):
        op, truth = planted_spectrum([1.0, 1.0, 0.0, 0.0])
        spectrum = dense_eigs(op)
        for eps in (0.1, 0.5, 0.9):
            assert exact_count(spectrum, eps, 2.0) == 2
        np.testing.assert_array_equal(truth.eigenvalues, [0.0, 0.0, 1.0, 1.0])

    def test_rotation_preserves_spectrum(self):
        values = np.random.default_rng(1).uniform(0.0, 3.0, 50)
        plain, _ = planted_spectrum(values, rotate=False)
        rotated, _ = planted_spectrum(values, rotate=True, seed=9)
        ev_plain = dense_eigs(plain).eigenvalues
        ev_rot = dense_eigs(rotated).eigenvalues
        np.testing.assert_allclose(ev_plain, ev_rot, atol=1e-10)
        assert not np.allclose(rotated.to_dense(), plain.to_dense())

    def test_rejects_empty_list(self):
        with pytest.raises(InvalidConfig):
            planted_spectrum([])

    def test_quadratic_spread_density_hugs_zero_at_right_end(self):
        # Eigenvalues K*(n-i)^2 spread apart as they grow; the density is
        # large near zero and vanishingly small at the top of the range.
        from specrank.kpm import DampingKind, evaluate_dos, exact_moments

        n = 2048
        j = np.arange(n, dtype=float)
        values = 2.5 * (j / (n - 1)) ** 2
        mom = exact_moments(values, 50, (-0.01, 2.51))
        curve = evaluate_dos(mom, DampingKind.JACKSON, 400)
        right = curve.density[curve.grid > 2.0]
        assert right.max() <= 0.05 * curve.density.max()
