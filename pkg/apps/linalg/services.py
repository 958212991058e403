"""
Ядро плотной комплексной линейной алгебры: скалярное произведение
Гильберта-Шмидта, эрмитово разложение (циклический Якоби) и квадратный
корень из PSD-матрицы. На этом модуле стоят все остальные приложения.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]

# Допуски по умолчанию (двойная точность, d <= 23)
DEFAULT_TOL = 1e-9
MAX_SWEEPS = 100

# Относительный порог внедиагональной нормы для остановки Якоби
_JACOBI_EPS = 1e-13


class OpdistError(Exception):
    """Базовая ошибка проекта"""
    pass


class ShapeError(OpdistError):
    """Несовпадение размерностей или неквадратная матрица"""
    pass


class DomainError(OpdistError):
    """Аргумент вне области определения операции"""
    pass


class ConvergenceError(OpdistError):
    """Итерационный метод не сошёлся за отведённое число проходов"""
    pass


class NotPSDError(DomainError):
    """Матрица не является положительно полуопределённой"""
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: NDArray[np.float64]
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> ComplexMatrix:
    """
    Приводит вход к двумерному complex128-массиву.
    Пустые, не двумерные и содержащие NaN/Inf входы отклоняются.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def _square(a) -> ComplexMatrix:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def _same_square(a, b):
    x, y = _square(a), _square(b)
    if x.shape != y.shape:
        raise ShapeError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x, y


def adjoint(a) -> ComplexMatrix:
    return as_matrix(a).conj().T


def hermiticity_error(a) -> float:
    """max-abs отклонение a от a†"""
    m = _square(a)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    return hermiticity_error(a) <= tol


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    m = _square(u)
    identity = np.eye(m.shape[0])
    return float(np.max(np.abs(m.conj().T @ m - identity))) <= tol


def hs_inner(a, b) -> complex:
    """Скалярное произведение Гильберта-Шмидта Tr(a† b)"""
    x, y = _same_square(a, b)
    # vdot сопрягает первый аргумент: sum conj(x_ij) y_ij = Tr(x† y)
    return complex(np.vdot(x, y))


def hs_norm_sq(a) -> float:
    """Квадрат нормы Гильберта-Шмидта ||a||^2 = Tr(a† a)"""
    m = _square(a)
    return float(np.vdot(m, m).real)


def _off_diagonal_norm(m: ComplexMatrix) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _rotate(work: ComplexMatrix, vectors: ComplexMatrix, p: int, q: int) -> None:
    """
    Одно вращение Якоби в плоскости (p, q), зануляющее work[p, q].

    Сначала фаза элемента a_pq снимается диагональной унитарной матрицей,
    затем вещественное вращение решает симметричную задачу 2x2.
    """
    apq = work[p, q]
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2.0 * r, work[q, q].real - work[p, p].real)
    c, s = math.cos(theta), math.sin(theta)

    u2 = np.array(
        [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
        dtype=np.complex128,
    )
    idx = [p, q]
    work[:, idx] = work[:, idx] @ u2
    work[idx, :] = u2.conj().T @ work[idx, :]
    vectors[:, idx] = vectors[:, idx] @ u2

    work[p, q] = 0.0
    work[q, p] = 0.0
    work[p, p] = work[p, p].real
    work[q, q] = work[q, q].real


def eigh(a, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """
    Эрмитово разложение циклическим методом Якоби.

    Собственные значения возвращаются по возрастанию, столбцы eigenvectors
    ортонормированы. Если после max_sweeps проходов внедиагональная часть
    не упала ниже порога: ConvergenceError.
    """
    m = _square(a)
    err = hermiticity_error(m)
    if err > tol:
        raise DomainError(f"matrix is not Hermitian: max |a - a^H| = {err:.3e} > {tol:.1e}")

    n = m.shape[0]
    work = 0.5 * (m + m.conj().T)
    vectors = np.eye(n, dtype=np.complex128)

    scale = float(np.linalg.norm(work))
    threshold = _JACOBI_EPS * scale
    converged = False

    for _ in range(max_sweeps):
        if _off_diagonal_norm(work) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                # уже пренебрежимо малые элементы не трогаем
                if abs(work[p, q]) * n <= threshold:
                    continue
                _rotate(work, vectors, p, q)

    if not converged and _off_diagonal_norm(work) > threshold:
        logger.error(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps (n={n})")
        raise ConvergenceError(f"Jacobi did not converge after {max_sweeps} sweeps")

    eigenvalues = np.real(np.diag(work)).copy()
    order = np.argsort(eigenvalues, kind='stable')
    return EigenDecomposition(
        eigenvalues=eigenvalues[order],
        eigenvectors=vectors[:, order],
    )


def psd_sqrt(a, tol: float = DEFAULT_TOL) -> ComplexMatrix:
    """
    Квадратный корень из эрмитовой PSD-матрицы.
    Собственные значения из [-tol, 0) обнуляются перед извлечением корня
    (такие возникают у восстановленных по конечной выборке состояний).
    """
    decomposition = eigh(a, tol)
    w = decomposition.eigenvalues
    if w[0] < -tol:
        raise NotPSDError(f"matrix is not PSD: min eigenvalue {w[0]:.3e} < {-tol:.1e}")

    roots = np.sqrt(np.clip(w, 0.0, None))
    v = decomposition.eigenvectors
    s = (v * roots) @ v.conj().T
    return 0.5 * (s + s.conj().T)
