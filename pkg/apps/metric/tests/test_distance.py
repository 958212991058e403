import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from apps.bloch.services import DensityOperator, encode, gell_mann_basis
from apps.linalg.services import DomainError, ShapeError
from apps.metric.services import (
    ProbabilityVector,
    born_probabilities,
    fidelity_pure,
    hs_distance_sq,
    information_content,
    operational_metric,
    single_distance,
    single_distance_bloch,
    total_distance,
)
from apps.mub.services import corrupt_mub, rotate_mub, standard_mub
from apps.sampler.services import haar_unitary, random_mixed, random_pure

ZERO = DensityOperator.pure([1, 0])
ONE = DensityOperator.pure([0, 1])
PLUS = DensityOperator.pure([1, 1])


class ProbabilityVectorTestCase(SimpleTestCase):

    def test_rounding_noise_clipped(self):
        p = ProbabilityVector([1.0 + 1e-12, -1e-12])
        self.assertEqual(p.probs[1], 0.0)

    def test_negativity_tolerance_is_tight(self):
        """Тест: отрицательное значение ниже -1e-12 уже не шум"""
        with self.assertRaises(DomainError):
            ProbabilityVector([1.0 + 1e-10, -1e-10])
        with self.assertRaises(DomainError):
            ProbabilityVector([0.5 + 2e-12, 0.5, -2e-12])

    def test_invalid_vectors(self):
        """Тест: отрицательные вероятности и неверная сумма"""
        with self.assertRaises(DomainError):
            ProbabilityVector([1.2, -0.2])
        with self.assertRaises(DomainError):
            ProbabilityVector([0.5, 0.6])
        with self.assertRaises(ShapeError):
            ProbabilityVector([])


class BornProbabilitiesTestCase(SimpleTestCase):

    def setUp(self):
        self.m = standard_mub(2)

    def test_zero_state(self):
        """Тест: |0> в базисах sigma_z, sigma_x, sigma_y"""
        probs = [born_probabilities(ZERO, b).probs for b in self.m.bases]
        np.testing.assert_allclose(probs[0], [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(probs[1], [0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(probs[2], [0.5, 0.5], atol=1e-15)

    def test_mixed_state(self):
        np.testing.assert_allclose(
            born_probabilities(DensityOperator.maximally_mixed(3), standard_mub(3).bases[2]).probs,
            [1 / 3] * 3, atol=1e-15,
        )

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            born_probabilities(DensityOperator.maximally_mixed(3), self.m.bases[0])


class SingleDistanceTestCase(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(single_distance(ProbabilityVector([1, 0]), ProbabilityVector([0, 1])), 2.0)
        self.assertAlmostEqual(
            single_distance(ProbabilityVector([0.7, 0.3]), ProbabilityVector([0.5, 0.5])), 0.08
        )
        self.assertEqual(single_distance(ProbabilityVector([0.5, 0.5]), ProbabilityVector([0.5, 0.5])), 0.0)

    def test_length_mismatch(self):
        with self.assertRaises(ShapeError):
            single_distance(ProbabilityVector([1, 0]), ProbabilityVector([1, 0, 0]))

    def test_bloch_form_matches_probabilities(self):
        """Тест: блоховская форма D_alpha совпадает с вероятностной"""
        d = 3
        ob = gell_mann_basis(d)
        rho1, rho2 = random_mixed(d, 11), random_mixed(d, 12)
        v1, v2 = encode(rho1, ob), encode(rho2, ob)
        for basis in standard_mub(d).bases:
            expected = single_distance(born_probabilities(rho1, basis), born_probabilities(rho2, basis))
            self.assertAlmostEqual(single_distance_bloch(v1, v2, basis, ob), expected, places=12)


class TotalDistanceTestCase(SimpleTestCase):

    def test_orthogonal_qubits(self):
        """Тест: |0> и |1>: вклады (2, 0, 0), сумма 2"""
        report = total_distance(ZERO, ONE, standard_mub(2))
        values = [v for _, v in report.per_basis]
        np.testing.assert_allclose(values, [2.0, 0.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(report.total, 2.0, places=12)
        self.assertLessEqual(report.deviation, 1e-12)

    def test_pure_against_mixed(self):
        half = DensityOperator.maximally_mixed(2)
        self.assertAlmostEqual(total_distance(ZERO, half, standard_mub(2)).total, 0.5, places=12)
        diag = DensityOperator(2, np.diag([0.7, 0.3]))
        self.assertAlmostEqual(total_distance(diag, half, standard_mub(2)).total, 0.08, places=12)

    def test_total_is_sum_of_parts(self):
        report = total_distance(random_mixed(5, 1), random_mixed(5, 2), standard_mub(5))
        self.assertLessEqual(abs(report.total - math.fsum(v for _, v in report.per_basis)), 1e-12)
        self.assertEqual(len(report.per_basis), 6)

    def test_corrupted_set_shows_deviation(self):
        """Тест: с дублированным базисом совпадение с HS нарушается"""
        report = total_distance(ZERO, PLUS, corrupt_mub(standard_mub(2)))
        self.assertGreater(report.deviation, 1e-3)

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            total_distance(ZERO, DensityOperator.maximally_mixed(3), standard_mub(2))
        with self.assertRaises(ShapeError):
            total_distance(ZERO, ONE, standard_mub(3))

    def test_report_dict(self):
        data = total_distance(ZERO, ONE, standard_mub(2)).as_dict()
        self.assertEqual([row["basis"] for row in data["per_basis"]], ["sigma_z", "sigma_x", "sigma_y"])
        self.assertIn("deviation", data)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_total_distance_equals_hs_distance(d):
    """Сумма по полному набору совпадает с ||rho1 - rho2||^2"""
    m = standard_mub(d)
    for trial in range(500):
        rho1 = random_mixed(d, 2024, key=(trial, 0))
        rho2 = random_mixed(d, 2024, key=(trial, 1))
        report = total_distance(rho1, rho2, m)
        assert report.deviation <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_equivalence_holds_for_rotated_sets(d):
    """Унитарно повёрнутые наборы дают то же расстояние"""
    m = standard_mub(d)
    for r in range(10):
        rotated = rotate_mub(m, haar_unitary(d, 99, key=(r,)))
        for trial in range(50):
            rho1 = random_mixed(d, 7, key=(r, trial, 0))
            rho2 = random_pure(d, 7, key=(r, trial, 1))
            assert total_distance(rho1, rho2, rotated).deviation <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 5])
def test_distance_bounds(d):
    """0 <= D <= 2, D = 2 для ортогональных чистых состояний"""
    m = standard_mub(d)
    for trial in range(100):
        value = total_distance(random_mixed(d, 3, key=(trial, 0)), random_pure(d, 3, key=(trial, 1)), m).total
        assert -1e-12 <= value <= 2 + 1e-12
    e0 = DensityOperator.pure(np.eye(d)[0])
    e1 = DensityOperator.pure(np.eye(d)[1])
    assert abs(total_distance(e0, e1, m).total - 2.0) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_maximum_only_for_orthogonal_pure_pairs(d):
    """D < 2 для неортогональных чистых пар и для любых пар со смешанным состоянием"""
    m = standard_mub(d)
    for trial in range(200):
        a = random_pure(d, 11, key=(trial, 0))
        b = random_pure(d, 11, key=(trial, 1))
        value = total_distance(a, b, m).total
        assert value < 2 - 1e-9
        assert abs((2 - value) - 2 * fidelity_pure(a, b)) <= 1e-10
        mixed = random_mixed(d, 11, key=(trial, 2))
        assert total_distance(a, mixed, m).total < 2 - 1e-9
        assert total_distance(mixed, random_mixed(d, 11, key=(trial, 3)), m).total < 2 - 1e-9
    if d > 2:
        # носители ортогональны, но второе состояние смешанное: D = 1 + 1/(d-1)
        e0 = DensityOperator.pure(np.eye(d)[0])
        rest = DensityOperator(d, np.diag([0.0] + [1.0 / (d - 1)] * (d - 1)).astype(np.complex128))
        assert abs(total_distance(e0, rest, m).total - (1 + 1 / (d - 1))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_square_root_is_a_metric(d):
    """sqrt(D): симметрия, ноль на равных состояниях, неравенство треугольника"""
    m = standard_mub(d)
    for trial in range(100):
        a, b, c = (random_mixed(d, 17, key=(trial, k)) for k in range(3))
        ab = operational_metric(a, b, m)
        assert abs(ab - operational_metric(b, a, m)) <= 1e-12
        assert operational_metric(a, a, m) <= 1e-7
        assert ab <= operational_metric(a, c, m) + operational_metric(c, b, m) + 1e-10


class InformationContentTestCase(SimpleTestCase):

    def test_known_values(self):
        """Тест: 0 для I/d, (d-1)/d для чистых состояний"""
        self.assertAlmostEqual(information_content(DensityOperator.maximally_mixed(3)), 0.0, places=15)
        self.assertAlmostEqual(information_content(ZERO), 0.5, places=12)
        self.assertAlmostEqual(information_content(DensityOperator.pure([1, 0, 0])), 2 / 3, places=12)
        for d in (5, 7):
            self.assertAlmostEqual(information_content(random_pure(d, 0)), (d - 1) / d, places=12)

    def test_normalisation_factor(self):
        self.assertAlmostEqual(information_content(ZERO, n=2.0), 1.0, places=12)
        with self.assertRaises(DomainError):
            information_content(ZERO, n=0.0)

    def test_matches_distance_to_maximally_mixed(self):
        for d in (2, 3, 5):
            m = standard_mub(d)
            mixed = DensityOperator.maximally_mixed(d)
            for trial in range(100):
                rho = random_mixed(d, 5, key=(trial,))
                self.assertAlmostEqual(information_content(rho), total_distance(rho, mixed, m).total, places=10)

    def test_hs_distance_symmetric(self):
        a, b = random_mixed(3, 1), random_mixed(3, 2)
        self.assertAlmostEqual(hs_distance_sq(a, b), hs_distance_sq(b, a), places=15)
