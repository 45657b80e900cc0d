import numpy as np
import pytest

from specrank.errors import InvalidInterval, OracleCapError
from specrank.gen import hadamard_lowrank, planted_spectrum
from specrank.kpm import DampingKind, evaluate_dos, exact_moments
from specrank.linops import Diagonal
from specrank.oracle import ExactSpectrum, dense_eigs, exact_count, exact_dos


class TestDenseEigs:
    def test_sorts_ascending(self):
        spectrum = dense_eigs(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(spectrum.eigenvalues, [1.0, 2.0, 3.0], atol=1e-12)

    def test_two_by_two_exchange(self):
        spectrum = dense_eigs(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 1.0], atol=1e-12)

    def test_hadamard_lowrank_known_spectrum(self):
        op, _ = hadamard_lowrank(256, 16, sigma=0.0, seed=0)
        ev = dense_eigs(op).eigenvalues
        np.testing.assert_allclose(ev[-16:], 1.0, atol=1e-10)
        np.testing.assert_allclose(ev[:240], 0.0, atol=1e-10)

    def test_cap_guard(self):
        with pytest.raises(OracleCapError, match="estimators"):
            dense_eigs(Diagonal(np.ones(100)), cap=50)

    def test_verification_mode(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((60, 60))
        a = 0.5 * (a + a.T)
        dense_eigs(a, verify=True)

    def test_trace_preserved(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((80, 80))
        a = 0.5 * (a + a.T)
        spectrum = dense_eigs(a)
        assert spectrum.eigenvalues.sum() == pytest.approx(np.trace(a), rel=1e-8)

    def test_accepts_operator_input(self):
        spectrum = dense_eigs(Diagonal([2.0, -1.0]))
        np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 2.0])


class TestExactCount:
    def test_half_open_convention(self):
        spectrum = ExactSpectrum(np.array([1.0, 2.0, 3.0]))
        assert exact_count(spectrum, 1.5, 3.0) == 2
        assert exact_count(spectrum, 1.0, 3.0) == 2  # endpoint a excluded
        assert exact_count(spectrum, 0.5, 3.0) == 3  # endpoint b included

    def test_empty_interval_above_spectrum(self):
        spectrum = ExactSpectrum(np.array([1.0, 2.0]))
        assert exact_count(spectrum, 5.0, 9.0) == 0

    def test_case1_interval(self, case1):
        # 128 signal eigenvalues sit between the cutoff and the top of the
        # spectrum (the exact upper endpoint depends on the noise draw).
        top = float(case1.spectrum.eigenvalues[-1])
        assert exact_count(case1.spectrum, 0.52, top + 1e-9) == 128

    def test_partition_sums_to_n(self):
        values = np.random.default_rng(4).uniform(0.0, 1.0, 500)
        spectrum = ExactSpectrum(np.sort(values))
        cuts = [-0.01, 0.2, 0.4, 0.6, 1.01]
        total = sum(exact_count(spectrum, a, b) for a, b in zip(cuts, cuts[1:]))
        assert total == 500

    def test_rejects_reversed(self):
        with pytest.raises(InvalidInterval):
            exact_count(ExactSpectrum(np.array([1.0])), 2.0, 1.0)


class TestExactDos:
    def test_single_eigenvalue_bump(self):
        curve = exact_dos(ExactSpectrum(np.array([1.0])), grid_points=500, blur=0.05)
        assert abs(curve.integral() - 1.0) <= 1e-3
        assert curve.grid[int(np.argmax(curve.density))] == pytest.approx(1.0, abs=0.01)

    def test_uniform_block_plus_zeros_morphology(self):
        rng = np.random.default_rng(6)
        values = np.sort(np.concatenate([np.zeros(1792), rng.uniform(0.2, 2.5, 256)]))
        curve = exact_dos(ExactSpectrum(values), grid_points=600, blur=0.02)
        assert curve.grid[int(np.argmax(curve.density))] == pytest.approx(0.0, abs=0.02)
        gap = curve.density[(curve.grid > 0.08) & (curve.grid < 0.12)]
        plateau = curve.density[(curve.grid > 0.4) & (curve.grid < 2.3)]
        assert gap.max() < plateau.mean()

    def test_interval_masses_match_kpm_reference(self):
        # Same spectrum through both density routes; compare integrated mass
        # over random intervals rather than pointwise (different smoothing).
        rng = np.random.default_rng(7)
        values = np.sort(np.concatenate([np.zeros(700), rng.uniform(0.5, 2.0, 300)]))
        spectrum = ExactSpectrum(values)
        reference = exact_dos(spectrum, grid_points=800, blur=0.01)
        mom = exact_moments(values, 80, (-0.05, 2.05))
        kpm_curve = evaluate_dos(mom, DampingKind.JACKSON, 800)
        for _ in range(20):
            a, b = np.sort(rng.uniform(-0.04, 2.0, 2))
            ref_mask = (reference.grid >= a) & (reference.grid <= b)
            kpm_mask = (kpm_curve.grid >= a) & (kpm_curve.grid <= b)
            if ref_mask.sum() < 2 or kpm_mask.sum() < 2:
                continue
            ref_mass = np.trapezoid(reference.density[ref_mask], reference.grid[ref_mask])
            kpm_mass = np.trapezoid(kpm_curve.density[kpm_mask], kpm_curve.grid[kpm_mask])
            assert abs(ref_mass - kpm_mass) <= 0.05

    def test_similarity_invariance(self):
        values = np.random.default_rng(8).uniform(0.0, 2.0, 40)
        plain, _ = planted_spectrum(values, rotate=False)
        rotated, _ = planted_spectrum(values, rotate=True, seed=3)
        np.testing.assert_allclose(
            dense_eigs(plain).eigenvalues, dense_eigs(rotated).eigenvalues, atol=1e-10
        )
