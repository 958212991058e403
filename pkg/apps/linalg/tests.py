import numpy as np
import pytest
from django.test import SimpleTestCase
from hypothesis import given, settings, seed
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from apps.linalg.services import (
    ConvergenceError,
    DomainError,
    NotPSDError,
    ShapeError,
    as_matrix,
    eigh,
    hs_inner,
    hs_norm_sq,
    is_unitary,
    psd_sqrt,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)


def _random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


class HilbertSchmidtTestCase(SimpleTestCase):

    def test_identity_inner_product(self):
        """Тест Tr(I I) = 2"""
        self.assertAlmostEqual(hs_inner(np.eye(2), np.eye(2)), 2.0)

    def test_pauli_orthogonality(self):
        """Тест ортогональности и нормировки операторов Паули"""
        self.assertAlmostEqual(abs(hs_inner(SIGMA_Z, SIGMA_X)), 0.0)
        self.assertAlmostEqual(hs_inner(SIGMA_Z, SIGMA_Z), 2.0)

    def test_norms(self):
        """Тест нормы нуля, проектора и sigma_x"""
        self.assertEqual(hs_norm_sq(np.zeros((2, 2))), 0.0)
        self.assertAlmostEqual(hs_norm_sq(np.diag([1.0, 0.0])), 1.0)
        self.assertAlmostEqual(hs_norm_sq(SIGMA_X), 2.0)

    def test_conjugate_symmetry(self):
        """Тест hs_inner(a, b) = conj(hs_inner(b, a))"""
        rng = np.random.default_rng(3)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        self.assertAlmostEqual(hs_inner(a, b), np.conj(hs_inner(b, a)))

    def test_shape_errors(self):
        """Тест ошибок размерности"""
        with self.assertRaises(ShapeError):
            hs_inner(np.eye(2), np.eye(3))
        with self.assertRaises(ShapeError):
            hs_norm_sq(np.ones((2, 3)))
        with self.assertRaises(ShapeError):
            as_matrix(np.ones(3))

    def test_non_finite_rejected(self):
        with self.assertRaises(DomainError):
            as_matrix([[np.nan, 0], [0, 1]])


class EighTestCase(SimpleTestCase):

    def test_diagonal(self):
        """Тест диагональной матрицы: спектр и стандартный базис"""
        result = eigh(np.diag([0.3, 0.7]))
        np.testing.assert_allclose(result.eigenvalues, [0.3, 0.7], atol=1e-12)
        np.testing.assert_allclose(np.abs(result.eigenvectors), np.eye(2), atol=1e-12)

    def test_pauli_spectrum(self):
        """Тест спектра sigma_x и (sigma_x + sigma_z)/sqrt(2)"""
        np.testing.assert_allclose(eigh(SIGMA_X).eigenvalues, [-1, 1], atol=1e-12)
        h = (SIGMA_X + SIGMA_Z) / np.sqrt(2)
        np.testing.assert_allclose(eigh(h).eigenvalues, [-1, 1], atol=1e-12)

    def test_complex_entries(self):
        np.testing.assert_allclose(eigh(SIGMA_Y).eigenvalues, [-1, 1], atol=1e-12)

    def test_non_hermitian_rejected(self):
        """Тест отказа на неэрмитовой матрице"""
        with self.assertRaises(DomainError):
            eigh(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_sweep_cap(self):
        """Тест ошибки сходимости при нулевом лимите проходов"""
        with self.assertRaises(ConvergenceError):
            eigh(SIGMA_X, max_sweeps=0)

    def test_zero_matrix(self):
        result = eigh(np.zeros((3, 3)))
        np.testing.assert_allclose(result.eigenvalues, 0.0)

    def test_degenerate_spectrum(self):
        """Тест вырожденного спектра (проектор ранга 2 в d=4)"""
        rng = np.random.default_rng(11)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        p = q[:, :2] @ q[:, :2].conj().T
        result = eigh(p)
        np.testing.assert_allclose(result.eigenvalues, [0, 0, 1, 1], atol=1e-10)
        self.assertLessEqual(np.max(np.abs(result.reconstruct() - p)), 1e-10)


@pytest.mark.parametrize("n", [2, 3, 5, 7, 11])
def test_eigh_random_hermitian(n):
    """Реконструкция и ортонормированность на случайных эрмитовых матрицах"""
    rng = np.random.default_rng(100 + n)
    for _ in range(5):
        h = _random_hermitian(rng, n)
        result = eigh(h)
        v = result.eigenvectors
        assert np.max(np.abs(result.reconstruct() - h)) <= 1e-10
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-10
        assert np.all(np.diff(result.eigenvalues) >= 0)
        np.testing.assert_allclose(result.eigenvalues, np.linalg.eigvalsh(h), atol=1e-10)


def test_eigh_dimension_23():
    rng = np.random.default_rng(23)
    h = _random_hermitian(rng, 23)
    result = eigh(h)
    assert np.max(np.abs(result.reconstruct() - h)) <= 1e-10


class PsdSqrtTestCase(SimpleTestCase):

    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        """Тест sqrt(diag(4, 9)) = diag(2, 3)"""
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_projector_is_own_root(self):
        """Тест: проектор |+><+| является собственным корнем"""
        np.testing.assert_allclose(psd_sqrt(PLUS), PLUS, atol=1e-12)

    def test_small_negative_eigenvalue_clamped(self):
        """Тест обнуления малых отрицательных собственных значений"""
        s = psd_sqrt(np.diag([1.0, -5e-10]))
        np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-12)

    def test_negative_eigenvalue_rejected(self):
        with self.assertRaises(NotPSDError):
            psd_sqrt(np.diag([1.0, -1e-3]))


@pytest.mark.parametrize("n", [2, 4, 7])
def test_psd_sqrt_squares_back(n):
    """psd_sqrt(a)^2 = a для a = G^H G"""
    rng = np.random.default_rng(n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = g.conj().T @ g
    s = psd_sqrt(a)
    assert np.max(np.abs(s @ s - a)) <= 1e-9
    assert np.max(np.abs(s - s.conj().T)) <= 1e-12


def test_is_unitary():
    assert is_unitary(SIGMA_X)
    assert not is_unitary(2 * SIGMA_X)


_entries = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@seed(1)
@settings(max_examples=50, deadline=None)
@given(
    re=arrays(np.float64, (3, 3, 3), elements=_entries),
    im=arrays(np.float64, (3, 3, 3), elements=_entries),
    alpha=st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False),
)
def test_hs_inner_sesquilinear(re, im, alpha):
    """hs_inner(a, alpha*b + c) = alpha*hs_inner(a, b) + hs_inner(a, c)"""
    a, b, c = re + 1j * im
    lhs = hs_inner(a, alpha * b + c)
    rhs = alpha * hs_inner(a, b) + hs_inner(a, c)
    norm = np.linalg.norm
    scale = max(1.0, abs(alpha) * norm(a) * norm(b) + norm(a) * norm(c))
    assert abs(lhs - rhs) <= 1e-12 * scale


@seed(2)
@settings(max_examples=40, deadline=None)
@given(
    re=arrays(np.float64, (4, 4), elements=_entries),
    im=arrays(np.float64, (4, 4), elements=_entries),
)
def test_eigh_property(re, im):
    """Реконструкция Якоби для произвольной эрмитовой матрицы"""
    g = re + 1j * im
    h = 0.5 * (g + g.conj().T)
    result = eigh(h)
    scale = max(1.0, float(np.max(np.abs(h))))
    assert np.max(np.abs(result.reconstruct() - h)) <= 1e-10 * scale
