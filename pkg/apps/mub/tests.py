import numpy as np
import pytest
from django.test import SimpleTestCase
from scipy.stats import unitary_group

from apps.bloch.services import gell_mann_basis
from apps.linalg.services import DomainError, ShapeError
from apps.mub.services import (
    MeasurementBasis,
    MubSet,
    UnsupportedDimensionError,
    basis_bloch_vectors,
    corrupt_mub,
    is_prime,
    rotate_mub,
    standard_mub,
    subspace_projector,
    verify_mub,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class StandardMubTestCase(SimpleTestCase):

    def test_qubit_is_pauli_triple(self):
        """Тест: для d=2: собственные базисы sigma_z, sigma_x, sigma_y"""
        m = standard_mub(2)
        self.assertEqual(m.labels, ["sigma_z", "sigma_x", "sigma_y"])
        for basis, pauli in zip(m.bases, (SIGMA_Z, SIGMA_X, SIGMA_Y)):
            # A_+ - A_- = sigma
            np.testing.assert_allclose(basis.projectors[0] - basis.projectors[1], pauli, atol=1e-15)

    def test_qutrit_overlaps(self):
        """Тест d=3: 4 базиса, все перекрёстные |<phi|phi'>|^2 = 1/3"""
        m = standard_mub(3)
        self.assertEqual(len(m.bases), 4)
        for a in range(4):
            for b in range(a + 1, 4):
                probs = np.einsum("iab,jba->ij", m.bases[a].projectors, m.bases[b].projectors).real
                np.testing.assert_allclose(probs, 1 / 3, atol=1e-12)

    def test_non_prime_rejected(self):
        """Тест: d=4 и d=6 не поддерживаются"""
        for d in (4, 6, 1):
            with self.assertRaises(UnsupportedDimensionError):
                standard_mub(d)

    def test_error_message_mentions_prime_powers(self):
        with self.assertRaises(UnsupportedDimensionError) as ctx:
            standard_mub(9)
        self.assertIn("prime-power", str(ctx.exception))

    def test_is_prime(self):
        self.assertEqual([n for n in range(20) if is_prime(n)], [2, 3, 5, 7, 11, 13, 17, 19])


@pytest.mark.parametrize("d", [2, 3, 5, 7, 11, 13])
def test_standard_mub_passes_verification(d):
    """Полный набор проходит все проверки при tol = 1e-9"""
    report = verify_mub(standard_mub(d), tol=1e-9)
    assert report.passed, report.as_dict()
    assert report.basis_count == d + 1


def test_standard_mub_qutrit_is_exact():
    report = verify_mub(standard_mub(3))
    assert max(report.deviations.values()) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_projector_bloch_geometry(d):
    """a_i . a_j = d delta_ij - 1 и sum a_i = 0 для каждого базиса"""
    ob = gell_mann_basis(d)
    for basis in standard_mub(d).bases:
        a = basis_bloch_vectors(basis, ob)
        np.testing.assert_allclose(a @ a.T, d * np.eye(d) - 1, atol=1e-9)
        np.testing.assert_allclose(a.sum(axis=0), 0.0, atol=1e-9)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_subspaces_split_bloch_space(d):
    """d+1 проекторов ранга d-1 попарно ортогональны и дают единицу"""
    ob = gell_mann_basis(d)
    projectors = [subspace_projector(b, ob) for b in standard_mub(d).bases]
    for p in projectors:
        assert abs(np.trace(p) - (d - 1)) <= 1e-9
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            assert np.max(np.abs(projectors[i] @ projectors[j])) <= 1e-9
    np.testing.assert_allclose(sum(projectors), np.eye(d * d - 1), atol=1e-9)


class VerifyMubTestCase(SimpleTestCase):

    def test_duplicate_basis_fails_overlap(self):
        """Тест: копия вычислительного базиса даёт отклонение |1 - 1/d|"""
        for d in (2, 3, 5):
            report = verify_mub(corrupt_mub(standard_mub(d)))
            self.assertFalse(report.passed)
            self.assertIn("overlap", report.failed_checks)
            self.assertAlmostEqual(report.deviations["overlap"], 1 - 1 / d, places=12)

    def test_missing_basis_fails_count_and_resolution(self):
        m = standard_mub(3)
        report = verify_mub(MubSet(dim=3, bases=m.bases[:-1]))
        self.assertIn("basis_count", report.failed_checks)
        self.assertIn("resolution", report.failed_checks)

    def test_report_dict(self):
        data = verify_mub(standard_mub(2)).as_dict()
        self.assertTrue(data["passed"])
        self.assertEqual(set(data["deviations"]), {
            "intra_basis", "overlap", "bloch_orthogonality",
            "subspace_projector", "subspace_orthogonality", "resolution",
        })


@pytest.mark.parametrize("d", [3, 5])
def test_overlap_and_bloch_checks_agree(d):
    """Перекрытия 1/d и ортогональность векторов Блоха выполняются одновременно"""
    good = verify_mub(standard_mub(d))
    bad = verify_mub(corrupt_mub(standard_mub(d)))
    assert good.deviations["overlap"] <= 1e-9 and good.deviations["bloch_orthogonality"] <= 1e-9
    assert bad.deviations["overlap"] > 1e-9 and bad.deviations["bloch_orthogonality"] > 1e-9


class RotateMubTestCase(SimpleTestCase):

    def test_identity_rotation(self):
        m = standard_mub(3)
        rotated = rotate_mub(m, np.eye(3))
        for a, b in zip(m.bases, rotated.bases):
            np.testing.assert_allclose(a.projectors, b.projectors, atol=1e-15)
            self.assertEqual(a.label, b.label)

    def test_pauli_rotation(self):
        """Тест: сопряжение sigma_x оставляет набор корректным"""
        self.assertTrue(verify_mub(rotate_mub(standard_mub(2), SIGMA_X)).passed)

    def test_non_unitary_rejected(self):
        with self.assertRaises(DomainError):
            rotate_mub(standard_mub(2), 2 * SIGMA_X)
        with self.assertRaises(ShapeError):
            rotate_mub(standard_mub(2), np.eye(3))

    def test_haar_rotation_preserves_deviations(self):
        """Тест: случайный унитарный поворот d=5 сохраняет все отклонения"""
        m = standard_mub(5)
        u = unitary_group.rvs(5, random_state=np.random.default_rng(7))
        before = verify_mub(m)
        after = verify_mub(rotate_mub(m, u))
        self.assertTrue(after.passed)
        for name, dev in before.deviations.items():
            self.assertLessEqual(abs(after.deviations[name] - dev), 1e-10)


class MeasurementBasisTestCase(SimpleTestCase):

    def test_shape_checked(self):
        with self.assertRaises(ShapeError):
            MeasurementBasis(dim=2, projectors=np.zeros((3, 2, 2)))

    def test_mixed_dimensions_rejected(self):
        with self.assertRaises(ShapeError):
            MubSet(dim=2, bases=(standard_mub(3).bases[0],))
