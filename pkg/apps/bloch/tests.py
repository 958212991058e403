import numpy as np
import pytest
from django.test import SimpleTestCase

from apps.bloch.services import (
    BlochVector,
    DensityOperator,
    HermiticityViolation,
    PositivityViolation,
    TraceViolation,
    decode,
    decode_hermitian,
    encode,
    expand_hermitian,
    gell_mann_basis,
    positivity_margin,
    purity,
    validate_state,
)
from apps.linalg.services import DomainError, NotPSDError, ShapeError, eigh, hs_inner, hs_norm_sq

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _ginibre_state(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return DensityOperator(dim=d, matrix=rho / np.trace(rho).real)


class GellMannBasisTestCase(SimpleTestCase):

    def test_qubit_basis_is_pauli(self):
        """Тест: для d=2 базис совпадает с (sigma_x, sigma_y, sigma_z)"""
        basis = gell_mann_basis(2)
        self.assertEqual(len(basis), 3)
        np.testing.assert_allclose(basis.lambdas[0], SIGMA_X, atol=1e-15)
        np.testing.assert_allclose(basis.lambdas[1], SIGMA_Y, atol=1e-15)
        np.testing.assert_allclose(basis.lambdas[2], SIGMA_Z, atol=1e-15)

    def test_qutrit_normalisation(self):
        """Тест: 8 матриц для d=3, у каждой ||lambda||^2 = 3"""
        basis = gell_mann_basis(3)
        self.assertEqual(len(basis), 8)
        for lam in basis.lambdas:
            self.assertAlmostEqual(hs_norm_sq(lam), 3.0, places=12)

    def test_dimension_too_small(self):
        with self.assertRaises(DomainError):
            gell_mann_basis(1)

    def test_basis_is_immutable(self):
        with self.assertRaises(ValueError):
            gell_mann_basis(2).lambdas[0, 0, 0] = 5.0


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
def test_basis_invariants(d):
    """Эрмитовость, бесследовость и Tr(lambda_a lambda_b) = d delta_ab"""
    lambdas = gell_mann_basis(d).lambdas
    for lam in lambdas:
        assert np.max(np.abs(lam - lam.conj().T)) <= 1e-12
        assert abs(np.trace(lam)) <= 1e-12
    gram = np.array([[hs_inner(a, b) for b in lambdas] for a in lambdas])
    assert np.max(np.abs(gram - d * np.eye(d * d - 1))) <= 1e-12


class EncodeDecodeTestCase(SimpleTestCase):

    def setUp(self):
        self.basis = gell_mann_basis(2)

    def test_encode_known_states(self):
        """Тест векторов Блоха |0>, I/2 и |+>"""
        zero = DensityOperator.pure([1, 0])
        plus = DensityOperator.pure([1, 1])
        np.testing.assert_allclose(encode(zero, self.basis).coords, [0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(
            encode(DensityOperator.maximally_mixed(2), self.basis).coords, [0, 0, 0], atol=1e-15
        )
        np.testing.assert_allclose(encode(plus, self.basis).coords, [1, 0, 0], atol=1e-15)

    def test_decode_known_vectors(self):
        np.testing.assert_allclose(decode(BlochVector(2, [0, 0, 0]), self.basis), np.eye(2) / 2)
        np.testing.assert_allclose(decode(BlochVector(2, [0, 0, 1]), self.basis), np.diag([1, 0]))

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeError):
            encode(DensityOperator.maximally_mixed(3), self.basis)
        with self.assertRaises(ShapeError):
            decode(BlochVector(3, np.zeros(8)), self.basis)

    def test_non_hermitian_input_rejected(self):
        """Тест: мнимый остаток выше 1e-12: ошибка"""
        with self.assertRaises(DomainError):
            encode(np.array([[0.5, 1.0], [0.0, 0.5]]), self.basis)

    def test_bloch_vector_length_checked(self):
        with self.assertRaises(ShapeError):
            BlochVector(2, [1.0, 0.0])


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_round_trip_and_norm_laws(d):
    """decode(encode(rho)) = rho, закон норм и тождество чистоты"""
    rng = np.random.default_rng(d)
    basis = gell_mann_basis(d)
    previous = None
    for _ in range(200):
        rho = _ginibre_state(rng, d)
        v = encode(rho, basis)
        assert np.max(np.abs(decode(v, basis) - rho.matrix)) <= 1e-10
        assert v.norm_sq <= d - 1 + 1e-9
        assert abs(purity(rho) - (1 + v.norm_sq) / d) <= 1e-10
        if previous is not None:
            rho2, v2 = previous
            lhs = hs_norm_sq(rho.matrix - rho2.matrix)
            rhs = np.sum((v.coords - v2.coords) ** 2) / d
            assert abs(lhs - rhs) <= 1e-10
        previous = (rho, v)


class PurityTestCase(SimpleTestCase):

    def test_maximally_mixed(self):
        for d in (2, 3, 5):
            self.assertAlmostEqual(purity(DensityOperator.maximally_mixed(d)), 1 / d)

    def test_pure_state(self):
        """Тест: для чистого состояния P = 1 и |rho|^2 = d - 1"""
        rho = DensityOperator.pure([1, 1j, -1])
        self.assertAlmostEqual(purity(rho), 1.0, places=12)
        self.assertAlmostEqual(encode(rho, gell_mann_basis(3)).norm_sq, 2.0, places=12)

    def test_diagonal_state(self):
        self.assertAlmostEqual(purity(DensityOperator(2, np.diag([0.7, 0.3]))), 0.58)


class HermitianExpansionTestCase(SimpleTestCase):

    def test_round_trip(self):
        """Тест разложения произвольного эрмитова оператора (h0, h_alpha)"""
        rng = np.random.default_rng(5)
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = g + g.conj().T
        basis = gell_mann_basis(3)
        h0, coords = expand_hermitian(h, basis)
        self.assertAlmostEqual(h0, np.trace(h).real)
        np.testing.assert_allclose(decode_hermitian(h0, coords, basis), h, atol=1e-12)


class ValidateStateTestCase(SimpleTestCase):

    def test_valid_state(self):
        rho = validate_state(np.diag([0.7, 0.3]))
        self.assertEqual(rho.dim, 2)

    def test_failed_checks_are_named(self):
        """Тест: каждое нарушение: своя ошибка с именем проверки"""
        with self.assertRaises(HermiticityViolation) as ctx:
            validate_state(np.array([[0.5, 0.2], [0.0, 0.5]]))
        self.assertEqual(ctx.exception.check, "hermitian")

        with self.assertRaises(TraceViolation) as ctx:
            validate_state(np.diag([0.7, 0.7]))
        self.assertEqual(ctx.exception.check, "trace")

        with self.assertRaises(PositivityViolation) as ctx:
            validate_state(np.diag([1.2, -0.2]))
        self.assertEqual(ctx.exception.check, "positivity")

    def test_outside_bloch_ball(self):
        """Тест: |v| = 1.2 sqrt(d-1) даёт не-PSD матрицу"""
        for d in (2, 3):
            basis = gell_mann_basis(d)
            v = encode(DensityOperator.pure(np.eye(d)[0]), basis).coords
            scaled = BlochVector(d, 1.2 * v)
            with self.assertRaises(NotPSDError):
                validate_state(decode(scaled, basis))

    def test_reflected_pure_vector_qutrit(self):
        """Тест d=3: v = -1.1 * (вектор чистого состояния) нарушает rho . sigma >= -1"""
        basis = gell_mann_basis(3)
        sigma = encode(DensityOperator.pure([1, 0, 0]), basis)
        v = BlochVector(3, -1.1 * sigma.coords)
        # rho . sigma = -1.1 * 2 < -1
        self.assertLess(positivity_margin(v, [sigma.coords]), 0.0)
        m = decode(v, basis)
        self.assertLess(eigh(m).eigenvalues[0], -1e-9)
        with self.assertRaises(PositivityViolation):
            validate_state(m)
