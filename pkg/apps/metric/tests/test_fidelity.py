import numpy as np
import pytest
from django.test import SimpleTestCase

from apps.bloch.services import DensityOperator
from apps.linalg.services import DomainError, ShapeError
from apps.metric.services import (
    PairSigns,
    fidelity,
    fidelity_pure,
    ordering_check,
    ordering_check_references,
    purity_fidelity_relation,
    total_distance,
)
from apps.mub.services import standard_mub
from apps.sampler.services import random_mixed, random_pure

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ZERO = DensityOperator.pure([1, 0])
ONE = DensityOperator.pure([0, 1])
PLUS = DensityOperator.pure([1, 1])
DIAG = DensityOperator(2, np.diag([0.7, 0.3]))
TILTED = DensityOperator(2, (np.eye(2) + 0.8 * SIGMA_X + 0.5 * SIGMA_Z) / 2)


class FidelityTestCase(SimpleTestCase):

    def test_known_values(self):
        """Тест: F(rho, rho) = 1, ортогональные: 0, I/2 против чистого: 1/2"""
        self.assertAlmostEqual(fidelity(ZERO, ZERO), 1.0, places=12)
        self.assertAlmostEqual(fidelity(ZERO, ONE), 0.0, places=12)
        self.assertAlmostEqual(fidelity(DensityOperator.maximally_mixed(2), ZERO), 0.5, places=12)

    def test_mixed_self_fidelity(self):
        """Тест: F(rho, rho) = 1 с точностью 1e-9 для 500 смешанных состояний"""
        for d in (2, 3):
            for trial in range(500):
                rho = random_mixed(d, 4, key=(trial,))
                self.assertLessEqual(abs(fidelity(rho, rho) - 1.0), 1e-9)

    def test_pure_self_fidelity(self):
        for d in (2, 3, 5):
            for trial in range(100):
                rho = random_pure(d, 4, key=(trial,))
                self.assertLessEqual(abs(fidelity(rho, rho) - 1.0), 1e-9)

    def test_symmetry_and_range(self):
        for d in (2, 3, 5):
            for trial in range(50):
                a = random_mixed(d, 8, key=(trial, 0))
                b = random_mixed(d, 8, key=(trial, 1))
                f = fidelity(a, b)
                self.assertTrue(0.0 <= f <= 1.0)
                self.assertLessEqual(abs(f - fidelity(b, a)), 1e-8)

    def test_symmetric_for_pure_against_mixed(self):
        """Тест: F(sigma, rho) = F(rho, sigma), когда одно из состояний чистое"""
        for trial in range(500):
            sigma = random_pure(2, 17, key=(trial, 0))
            rho = random_mixed(2, 17, key=(trial, 1))
            self.assertLessEqual(abs(fidelity(sigma, rho) - fidelity(rho, sigma)), 1e-8)

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            fidelity(ZERO, DensityOperator.maximally_mixed(3))


class FidelityPureTestCase(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(fidelity_pure(ZERO, DIAG), 0.7, places=12)
        self.assertAlmostEqual(fidelity_pure(ZERO, PLUS), 0.5, places=12)

    def test_mixed_reference_rejected(self):
        """Тест: эталон должен быть чистым"""
        with self.assertRaises(DomainError):
            fidelity_pure(DIAG, ZERO)

    def test_agrees_with_general_fidelity(self):
        """Тест: для чистого эталона общая формула совпадает с Tr(sigma rho) до 1e-9"""
        for d in (2, 3):
            for trial in range(150):
                sigma = random_pure(d, 21, key=(trial, 0))
                rho = random_mixed(d, 21, key=(trial, 1))
                self.assertLessEqual(abs(fidelity_pure(sigma, rho) - fidelity(sigma, rho)), 1e-9)
                self.assertLessEqual(abs(fidelity_pure(sigma, rho) - fidelity(rho, sigma)), 1e-9)

    def test_agrees_on_pure_pairs(self):
        for d in (2, 3):
            for trial in range(300):
                sigma = random_pure(d, 22, key=(trial, 0))
                rho = random_pure(d, 22, key=(trial, 1))
                self.assertLessEqual(abs(fidelity(sigma, rho) - fidelity_pure(sigma, rho)), 1e-9)


class PurityFidelityRelationTestCase(SimpleTestCase):

    def test_examples(self):
        """Тест: D = P(sigma) + P(rho) - 2F: 0.18 и 2"""
        lhs, rhs = purity_fidelity_relation(ZERO, DIAG)
        self.assertAlmostEqual(lhs, 0.18, places=12)
        self.assertAlmostEqual(rhs, 0.18, places=12)
        lhs, rhs = purity_fidelity_relation(ZERO, ONE)
        self.assertAlmostEqual(lhs, 2.0, places=12)
        self.assertAlmostEqual(rhs, 2.0, places=12)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pure_states_distance_is_two_minus_twice_fidelity(d):
    """Для чистых состояний D = 2 - 2F"""
    m = standard_mub(d)
    for trial in range(1000):
        sigma = random_pure(d, 31, key=(trial, 0))
        rho = random_pure(d, 31, key=(trial, 1))
        d_total = total_distance(sigma, rho, m).total
        assert abs(d_total - (2 - 2 * fidelity_pure(sigma, rho))) <= 1e-10


class OrderingCheckTestCase(SimpleTestCase):

    def test_qubit_counterexample(self):
        """Тест: F выше у второго состояния, но и D выше: нарушение"""
        report = ordering_check(ZERO, [DIAG, TILTED], standard_mub(2))
        np.testing.assert_allclose(report.fidelities, [0.70, 0.75], atol=1e-12)
        np.testing.assert_allclose(report.distances, [0.18, 0.445], atol=1e-12)
        self.assertEqual(report.pairs_checked, 1)
        self.assertFalse(report.equivalent)
        violation = report.violations[0]
        self.assertEqual((violation.i, violation.j), (0, 1))
        self.assertEqual(report.signs, [PairSigns(i=0, j=1, fidelity_sign=-1, distance_sign=1)])

    def test_pure_tests_are_consistent(self):
        """Тест: для чистых тестовых состояний нарушений нет"""
        for d in (2, 3, 5):
            sigma = random_pure(d, 1)
            tests = [random_pure(d, 2, key=(k,)) for k in range(30)]
            report = ordering_check(sigma, tests, standard_mub(d))
            self.assertTrue(report.equivalent)
            self.assertEqual(report.pairs_checked, 30 * 29 // 2)

    def test_signs_recorded_for_every_pair(self):
        """Тест: знаки записаны для каждой пары, для чистых состояний они совпадают"""
        sigma = random_pure(3, 5)
        tests = [random_pure(3, 6, key=(k,)) for k in range(12)]
        report = ordering_check(sigma, tests, standard_mub(3))
        self.assertEqual(len(report.signs), report.pairs_checked)
        self.assertEqual([(s.i, s.j) for s in report.signs],
                         [(i, j) for i in range(12) for j in range(i + 1, 12)])
        for s in report.signs:
            self.assertEqual(s.fidelity_sign, s.distance_sign)
            self.assertNotEqual(s.fidelity_sign, 0)

    def test_single_state_has_no_pairs(self):
        report = ordering_check(ZERO, [DIAG], standard_mub(2))
        self.assertEqual(report.pairs_checked, 0)
        self.assertTrue(report.equivalent)

    def test_ties_are_not_violations(self):
        report = ordering_check(ZERO, [DIAG, DIAG], standard_mub(2))
        self.assertTrue(report.equivalent)
        self.assertEqual(report.signs, [PairSigns(i=0, j=1, fidelity_sign=0, distance_sign=0)])

    def test_mixed_reference_rejected(self):
        with self.assertRaises(DomainError):
            ordering_check(DIAG, [ZERO, ONE], standard_mub(2))

    def test_reference_set(self):
        """Тест: набор эталонов: отдельный отчёт на каждый"""
        reports = ordering_check_references([ZERO, PLUS], [DIAG, TILTED], standard_mub(2))
        self.assertEqual(len(reports), 2)
        self.assertFalse(reports[0].equivalent)
