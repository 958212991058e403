import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from apps.bloch.services import BlochVector, DensityOperator, encode, gell_mann_basis, purity, validate_state
from apps.linalg.services import DomainError, is_unitary
from apps.metric.services import ProbabilityVector, born_probabilities, hs_distance_sq
from apps.mub.services import standard_mub
from apps.sampler.services import (
    MAX_SEED,
    POLARIZER_SETTINGS,
    ShotRecord,
    check_seed,
    convergence_sweep,
    empirical_probabilities,
    estimate_total_distance,
    haar_unitary,
    linear_inversion,
    make_rng,
    project_qubit_bloch,
    random_mixed,
    random_pure,
    simulate_shots,
    tomography_scenario,
)

ZERO = DensityOperator.pure([1, 0])
ONE = DensityOperator.pure([0, 1])
PLUS = DensityOperator.pure([1, 1])


def _separated_pure_pair(d=2, min_distance=0.5):
    """Первая пара с ||rho1 - rho2||^2 >= min_distance"""
    for seed in range(1000):
        rho1 = random_pure(d, seed, key=(0,))
        rho2 = random_pure(d, seed, key=(1,))
        if hs_distance_sq(rho1, rho2) >= min_distance:
            return rho1, rho2
    raise AssertionError("no separated pair found")


class SeedTestCase(SimpleTestCase):

    def test_seed_range(self):
        """Тест: seed: 64-битное беззнаковое целое"""
        self.assertEqual(check_seed(0), 0)
        self.assertEqual(check_seed(MAX_SEED), 2 ** 64 - 1)
        for bad in (-1, 2 ** 64, True, 1.5, "7"):
            with self.assertRaises(DomainError):
                check_seed(bad)

    def test_streams_are_reproducible(self):
        a = make_rng(42, (1, 2)).standard_normal(5)
        b = make_rng(42, (1, 2)).standard_normal(5)
        c = make_rng(42, (1, 3)).standard_normal(5)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.allclose(a, c))


class RandomStateTestCase(SimpleTestCase):

    def test_random_pure(self):
        for d in (2, 3, 7):
            rho = random_pure(d, 5)
            self.assertAlmostEqual(purity(rho), 1.0, places=12)
            validate_state(rho.matrix)

    def test_random_mixed_is_valid(self):
        """Тест: состояние Жинибра: эрмитово, след 1, PSD"""
        for d in (2, 3, 5):
            rho = random_mixed(d, 9)
            validate_state(rho.matrix)
            self.assertLess(purity(rho), 1.0)

    def test_deterministic(self):
        np.testing.assert_array_equal(random_mixed(3, 1).matrix, random_mixed(3, 1).matrix)
        np.testing.assert_array_equal(haar_unitary(4, 1), haar_unitary(4, 1))

    def test_haar_unitary(self):
        self.assertTrue(is_unitary(haar_unitary(5, 3)))

    def test_dimension_checked(self):
        with self.assertRaises(DomainError):
            random_pure(1, 0)


class SimulateShotsTestCase(SimpleTestCase):

    def setUp(self):
        self.m = standard_mub(2)

    def test_determinism(self):
        """Тест: одинаковые (состояние, базис, n, seed) дают одинаковые счёты"""
        a = simulate_shots(PLUS, self.m.bases[0], 1000, 13)
        b = simulate_shots(PLUS, self.m.bases[0], 1000, 13)
        self.assertEqual(a, b)
        self.assertEqual(sum(a.counts), 1000)
        self.assertEqual(a.label, "sigma_z")

    def test_eigenstate_is_deterministic(self):
        record = simulate_shots(ZERO, self.m.bases[0], 50, 0)
        self.assertEqual(record.counts, (50, 0))

    def test_counts_within_five_sigma(self):
        rho = random_mixed(3, 4)
        n = 10_000
        for basis in standard_mub(3).bases:
            p = born_probabilities(rho, basis).probs
            counts = np.array(simulate_shots(rho, basis, n, 77).counts)
            sigma = np.sqrt(n * p * (1 - p))
            self.assertTrue(np.all(np.abs(counts - n * p) <= 5 * sigma + 1e-9))

    def test_invalid_shot_count(self):
        with self.assertRaises(DomainError):
            simulate_shots(PLUS, self.m.bases[0], 0, 0)
        with self.assertRaises(DomainError):
            ShotRecord(label="x", counts=(1, 1), shots=3)

    def test_empirical_probabilities(self):
        f = empirical_probabilities(ShotRecord(label="x", counts=(3, 1), shots=4))
        self.assertIsInstance(f, ProbabilityVector)
        np.testing.assert_allclose(f.probs, [0.75, 0.25])


def test_frequencies_average_to_born_probabilities():
    """Средние частоты по 100 seed совпадают с вероятностями Борна"""
    rho = random_mixed(3, 6)
    basis = standard_mub(3).bases[1]
    n = 500
    p = born_probabilities(rho, basis).probs
    mean = np.mean([empirical_probabilities(simulate_shots(rho, basis, n, s)).probs for s in range(100)], axis=0)
    sigma = np.sqrt(p * (1 - p) / (n * 100))
    assert np.all(np.abs(mean - p) <= 5 * sigma)


class EstimateTotalDistanceTestCase(SimpleTestCase):

    def test_identical_eigenstates(self):
        """Тест: rho1 = rho2 = |0>: базис sigma_z даёт ровно 0, остальные: шум O(1/n)"""
        est = estimate_total_distance(ZERO, ZERO, standard_mub(2), 1000, 3)
        values = dict(est.per_basis)
        self.assertEqual(values["sigma_z"], 0.0)
        self.assertGreaterEqual(values["sigma_x"], 0.0)
        self.assertLess(est.estimate, 0.05)
        self.assertEqual(est.exact, 0.0)
        self.assertEqual(est.estimator, "plug-in")

    def test_orthogonal_pair_large_n(self):
        est = estimate_total_distance(ZERO, ONE, standard_mub(2), 1_000_000, 0)
        self.assertLessEqual(abs(est.estimate - 2.0), 0.01)

    def test_single_shot_is_bounded(self):
        """Тест: при n = 1 оценка в [0, 2(d+1)] и не обрезается"""
        for seed in range(20):
            est = estimate_total_distance(PLUS, ONE, standard_mub(2), 1, seed)
            self.assertTrue(0.0 <= est.estimate <= 6.0)

    def test_bias_corrected_needs_two_shots(self):
        with self.assertRaises(DomainError):
            estimate_total_distance(PLUS, ONE, standard_mub(2), 1, 0, bias_corrected=True)

    def test_determinism(self):
        a = estimate_total_distance(PLUS, ONE, standard_mub(2), 100, 8)
        b = estimate_total_distance(PLUS, ONE, standard_mub(2), 100, 8)
        self.assertEqual(a, b)


def test_bias_correction_removes_upward_bias():
    """Для rho1 = rho2 = I/2 plug-in смещён вверх, поправленная оценка в среднем 0"""
    half = DensityOperator.maximally_mixed(2)
    m = standard_mub(2)
    n = 10
    plug_in = [estimate_total_distance(half, half, m, n, s).estimate for s in range(400)]
    corrected = [estimate_total_distance(half, half, m, n, s, bias_corrected=True).estimate for s in range(400)]
    # ожидаемое смещение plug-in: 3 базиса * 2 системы * (1/2) / n = 0.3
    assert np.mean(plug_in) > 0.2
    spread = np.std(corrected) / math.sqrt(len(corrected))
    assert abs(np.mean(corrected)) <= 5 * spread


class ConvergenceSweepTestCase(SimpleTestCase):

    def test_slope_is_minus_one_half(self):
        """Тест: RMS ошибки убывает как n^(-1/2)"""
        rho1, rho2 = _separated_pure_pair()
        result = convergence_sweep(rho1, rho2, standard_mub(2), [1000, 10_000, 100_000, 1_000_000], range(50))
        self.assertEqual(len(result.rows), 200)
        self.assertAlmostEqual(result.slope, -0.5, delta=0.1)
        self.assertEqual(sorted(result.rms), [1000, 10_000, 100_000, 1_000_000])

    def test_rows_are_sorted(self):
        result = convergence_sweep(PLUS, ONE, standard_mub(2), [100, 10], [1, 0])
        self.assertEqual([(r.seed, r.n) for r in result.rows], [(0, 10), (0, 100), (1, 10), (1, 100)])

    def test_single_shot_count_has_no_slope(self):
        result = convergence_sweep(PLUS, ONE, standard_mub(2), [100], [0, 1])
        self.assertIsNone(result.slope)


class ProjectionTestCase(SimpleTestCase):

    def test_inside_ball_unchanged(self):
        v = BlochVector(2, [0.3, 0.1, -0.2])
        self.assertIs(project_qubit_bloch(v), v)

    def test_outside_ball_normalised(self):
        """Тест: проекция идемпотентна и лежит на сфере"""
        v = project_qubit_bloch(BlochVector(2, [1.0, 0.5, 0.2]))
        self.assertAlmostEqual(v.norm_sq, 1.0, places=12)
        np.testing.assert_allclose(project_qubit_bloch(v).coords, v.coords)

    def test_qubits_only(self):
        with self.assertRaises(DomainError):
            project_qubit_bloch(BlochVector(3, np.zeros(8)))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_linear_inversion_recovers_bloch_vector(d):
    """Точные вероятности полного набора восстанавливают вектор Блоха"""
    rho = random_mixed(d, 10)
    m = standard_mub(d)
    probs = [born_probabilities(rho, b) for b in m.bases]
    np.testing.assert_allclose(linear_inversion(probs, m).coords, encode(rho, gell_mann_basis(d)).coords, atol=1e-10)


class TomographyScenarioTestCase(SimpleTestCase):

    def test_horizontal_against_diagonal(self):
        """Тест: H и 45 градусов: точное D = 1"""
        report = tomography_scenario(ZERO, PLUS, 100_000, 0)
        self.assertAlmostEqual(report.exact, 1.0, places=12)
        self.assertLessEqual(abs(report.estimate - 1.0), 0.02)
        self.assertEqual([s.setting for s in report.settings], ["horizontal", "diagonal_45", "right_circular"])
        self.assertEqual(report.intensity_shots, 300_000)

    def test_stokes_and_reconstruction(self):
        report = tomography_scenario(ZERO, PLUS, 1_000_000, 1)
        np.testing.assert_allclose(report.stokes_1, [0, 0, 1], atol=0.01)
        np.testing.assert_allclose(report.stokes_2, [1, 0, 0], atol=0.01)
        # после проекции восстановленные матрицы: допустимые состояния
        validate_state(report.reconstructed_1)
        validate_state(report.reconstructed_2)
        self.assertLessEqual(abs(report.reconstructed_distance - 1.0), 0.05)

    def test_qubits_only(self):
        with self.assertRaises(DomainError):
            tomography_scenario(random_pure(3, 0), random_pure(3, 1), 100, 0)

    def test_setting_names(self):
        self.assertEqual(set(POLARIZER_SETTINGS), set(standard_mub(2).labels))
