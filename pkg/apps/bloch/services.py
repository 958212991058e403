"""
Обобщённые векторы Блоха.

Базис эрмитовых бесследовых операторов lambda_alpha (обобщённые матрицы
Гелл-Манна) нормирован так, что Tr(lambda_a lambda_b) = d delta_ab.
Порядок базиса фиксирован: симметричные пары (j, k) в лексикографическом
порядке, затем антисимметричные пары, затем d-1 диагональных матриц.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from numpy.typing import NDArray

from apps.linalg.services import (
    DEFAULT_TOL,
    ComplexMatrix,
    DomainError,
    NotPSDError,
    ShapeError,
    as_matrix,
    eigh,
    hermiticity_error,
    hs_norm_sq,
)

logger = logging.getLogger(__name__)

# Мнимая часть Tr(lambda rho) для эрмитовых входов: чистый шум округления
_IMAG_RESIDUE_TOL = 1e-12


class StateValidationError(DomainError):
    """Матрица не является матрицей плотности; check: имя проваленной проверки"""
    check = "state"


class HermiticityViolation(StateValidationError):
    check = "hermitian"


class TraceViolation(StateValidationError):
    check = "trace"


class PositivityViolation(StateValidationError, NotPSDError):
    check = "positivity"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OperatorBasis:
    dim: int
    lambdas: NDArray[np.complex128] = field(repr=False)

    def __len__(self) -> int:
        return self.lambdas.shape[0]


@dataclass(frozen=True)
class BlochVector:
    dim: int
    coords: NDArray[np.float64]

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.shape != (self.dim ** 2 - 1,):
            raise ShapeError(
                f"Bloch vector for d={self.dim} needs {self.dim ** 2 - 1} coords, got {coords.shape}"
            )
        object.__setattr__(self, "coords", _frozen(coords))

    @property
    def norm_sq(self) -> float:
        return float(self.coords @ self.coords)


@dataclass(frozen=True)
class DensityOperator:
    """
    Матрица плотности d x d.

    Конструктор проверяет только форму; полная проверка (эрмитовость,
    след, спектр) делается в validate_state.
    """
    dim: int
    matrix: ComplexMatrix = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.dim, self.dim):
            raise ShapeError(f"density operator for d={self.dim} has shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        """|psi><psi| для (ненормированного) вектора psi"""
        v = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if norm == 0:
            raise DomainError("zero state vector")
        v = v / norm
        return cls(dim=v.size, matrix=np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityOperator":
        return cls(dim=d, matrix=np.eye(d) / d)


MatrixLike = Union[DensityOperator, np.ndarray]


def _matrix_of(rho: MatrixLike) -> ComplexMatrix:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    return as_matrix(rho)


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> OperatorBasis:
    """
    Обобщённые матрицы Гелл-Манна, перемасштабированные до ||lambda||^2 = d.
    Для d=2 это (sigma_x, sigma_y, sigma_z).
    """
    if d < 2:
        raise DomainError(f"operator basis needs d >= 2, got {d}")

    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    mats = []

    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)

    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)

    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(np.complex128))

    # у всех матриц выше ||m||^2 = 2
    lambdas = np.sqrt(d / 2.0) * np.stack(mats)
    logger.debug(f"Built Gell-Mann basis for d={d} ({len(mats)} operators)")
    return OperatorBasis(dim=d, lambdas=_frozen(lambdas))


def _check_dim(m: ComplexMatrix, basis: OperatorBasis) -> None:
    if m.shape != (basis.dim, basis.dim):
        raise ShapeError(f"matrix shape {m.shape} does not match basis dimension {basis.dim}")


def _traces(m: ComplexMatrix, basis: OperatorBasis) -> NDArray[np.float64]:
    # Tr(lambda_a m) = sum_ij lambda_a[i, j] m[j, i]
    values = np.einsum("aij,ji->a", basis.lambdas, m)
    residue = float(np.max(np.abs(values.imag)))
    if residue > _IMAG_RESIDUE_TOL:
        raise DomainError(f"Bloch coordinates have imaginary residue {residue:.3e}; input is not Hermitian")
    return values.real


def encode(rho: MatrixLike, basis: OperatorBasis) -> BlochVector:
    """rho_alpha = Tr(lambda_alpha rho)"""
    m = _matrix_of(rho)
    _check_dim(m, basis)
    return BlochVector(dim=basis.dim, coords=_traces(m, basis))


def decode(v: BlochVector, basis: OperatorBasis) -> ComplexMatrix:
    """
    (1/d)(I + sum_alpha v_alpha lambda_alpha).
    Результат эрмитов и с единичным следом, но не обязательно PSD.
    """
    if v.dim != basis.dim:
        raise ShapeError(f"Bloch vector dimension {v.dim} does not match basis dimension {basis.dim}")
    d = basis.dim
    return (np.eye(d) + np.tensordot(v.coords, basis.lambdas, axes=1)) / d


def expand_hermitian(h, basis: OperatorBasis) -> Tuple[float, NDArray[np.float64]]:
    """Разложение эрмитова оператора: h0 = Tr H, h_alpha = Tr(lambda_alpha H)"""
    m = as_matrix(h)
    _check_dim(m, basis)
    h0 = np.trace(m)
    if abs(h0.imag) > _IMAG_RESIDUE_TOL:
        raise DomainError("trace of a Hermitian operator must be real")
    return float(h0.real), _traces(m, basis)


def decode_hermitian(h0: float, coords, basis: OperatorBasis) -> ComplexMatrix:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape != (len(basis),):
        raise ShapeError(f"expected {len(basis)} coefficients, got {coords.shape}")
    d = basis.dim
    return (h0 * np.eye(d) + np.tensordot(coords, basis.lambdas, axes=1)) / d


def purity(rho: DensityOperator) -> float:
    """P(rho) = Tr rho^2 = ||rho||^2, лежит в [1/d, 1]"""
    return hs_norm_sq(rho.matrix)


def bloch_norm_sq(v: BlochVector) -> float:
    return v.norm_sq


def positivity_margin(v: BlochVector, pure_vectors) -> float:
    """
    min по чистым sigma из набора величины (rho . sigma + 1).
    Отрицательное значение означает, что v не соответствует состоянию.
    Это только необходимое условие; решающей остаётся спектральная проверка.
    """
    sigmas = np.atleast_2d(np.asarray(pure_vectors, dtype=np.float64))
    if sigmas.shape[1] != v.coords.size:
        raise ShapeError(f"pure vectors have length {sigmas.shape[1]}, expected {v.coords.size}")
    return float(np.min(sigmas @ v.coords + 1.0))


def validate_state(m, tol: float = DEFAULT_TOL) -> DensityOperator:
    """
    Проверяет эрмитовость, единичный след и неотрицательность спектра.
    Каждое нарушение: своё исключение с именем проверки в .check.
    """
    matrix = as_matrix(m)
    if matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {matrix.shape}")

    herm_err = hermiticity_error(matrix)
    if herm_err > tol:
        raise HermiticityViolation(f"hermitian check failed: max |m - m^H| = {herm_err:.3e}")

    trace = np.trace(matrix)
    if abs(trace - 1.0) > tol:
        raise TraceViolation(f"trace check failed: Tr m = {trace:.12g}")

    matrix = 0.5 * (matrix + matrix.conj().T)
    min_eig = float(eigh(matrix, tol).eigenvalues[0])
    if min_eig < -tol:
        raise PositivityViolation(f"positivity check failed: min eigenvalue {min_eig:.3e}")

    return DensityOperator(dim=matrix.shape[0], matrix=matrix)
