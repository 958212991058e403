"""
Полные наборы взаимно дополнительных измерений (MUB) для простых d
и их проверка: попарные перекрытия 1/d, ортогональность подпространств
векторов Блоха и разложение единицы пространства Блоха.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from apps.bloch.services import OperatorBasis, encode, gell_mann_basis
from apps.linalg.services import DEFAULT_TOL, DomainError, ShapeError, as_matrix, is_unitary

logger = logging.getLogger(__name__)


class UnsupportedDimensionError(DomainError):
    """Размерность, для которой построение полного набора не реализовано"""
    pass


@dataclass(frozen=True)
class MeasurementBasis:
    dim: int
    projectors: NDArray[np.complex128] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        p = np.array(self.projectors, dtype=np.complex128)
        if p.shape != (self.dim, self.dim, self.dim):
            raise ShapeError(f"basis for d={self.dim} needs {self.dim} projectors of shape "
                             f"({self.dim}, {self.dim}), got {p.shape}")
        p.setflags(write=False)
        object.__setattr__(self, "projectors", p)

    @classmethod
    def from_vectors(cls, vectors, label: str = "") -> "MeasurementBasis":
        """Базис из строк vectors: i-й проектор = |v_i><v_i|"""
        v = np.asarray(vectors, dtype=np.complex128)
        projectors = np.einsum("ia,ib->iab", v, v.conj())
        return cls(dim=v.shape[1], projectors=projectors, label=label)


@dataclass(frozen=True)
class MubSet:
    dim: int
    bases: Tuple[MeasurementBasis, ...]

    def __post_init__(self):
        bases = tuple(self.bases)
        for b in bases:
            if b.dim != self.dim:
                raise ShapeError(f"basis '{b.label}' has dimension {b.dim}, set has {self.dim}")
        object.__setattr__(self, "bases", bases)

    @property
    def labels(self) -> List[str]:
        return [b.label for b in self.bases]


@dataclass
class VerificationReport:
    dim: int
    tol: float
    basis_count: int
    deviations: Dict[str, float] = field(default_factory=dict)

    @property
    def failed_checks(self) -> List[str]:
        failed = [name for name, dev in self.deviations.items() if not dev <= self.tol]
        if self.basis_count != self.dim + 1:
            failed.append("basis_count")
        return failed

    @property
    def passed(self) -> bool:
        return not self.failed_checks

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "tol": self.tol,
            "basis_count": self.basis_count,
            "deviations": dict(self.deviations),
            "failed_checks": self.failed_checks,
            "passed": self.passed,
        }


def is_prime(n: int) -> bool:
    """Детерминированное пробное деление"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for k in range(3, math.isqrt(n) + 1, 2):
        if n % k == 0:
            return False
    return True


def _pauli_triple() -> Tuple[MeasurementBasis, ...]:
    # собственные базисы sigma_z, sigma_x, sigma_y; собственное значение +1 первым
    s = 1.0 / math.sqrt(2.0)
    return (
        MeasurementBasis.from_vectors([[1, 0], [0, 1]], label="sigma_z"),
        MeasurementBasis.from_vectors([[s, s], [s, -s]], label="sigma_x"),
        MeasurementBasis.from_vectors([[s, 1j * s], [s, -1j * s]], label="sigma_y"),
    )


def standard_mub(d: int) -> MubSet:
    """
    Вычислительный базис плюс d базисов с амплитудами
    exp[(2 pi i / d)(alpha k^2 + j k)] / sqrt(d), alpha, j, k = 1..d.

    При d=2 квадратичная фаза даёт только +-1 и повторяющиеся базисы,
    поэтому для кубита берётся тройка собственных базисов Паули.
    """
    if not is_prime(d):
        raise UnsupportedDimensionError(
            f"d={d} is not prime; only prime dimensions are supported "
            f"(prime-power Galois-field constructions are out of scope)"
        )
    if d == 2:
        return MubSet(dim=2, bases=_pauli_triple())

    bases = [MeasurementBasis.from_vectors(np.eye(d), label="computational")]
    k = np.arange(1, d + 1)
    for alpha in range(1, d + 1):
        # фаза считается по модулю d в целых числах, без потери точности
        exponents = (alpha * k[None, :] ** 2 + k[:, None] * k[None, :]) % d
        vectors = np.exp(2j * np.pi * exponents / d) / math.sqrt(d)
        bases.append(MeasurementBasis.from_vectors(vectors, label=f"alpha={alpha}"))

    logger.debug(f"Built standard MUB set for d={d}")
    return MubSet(dim=d, bases=tuple(bases))


def rotate_mub(m: MubSet, u, tol: float = DEFAULT_TOL) -> MubSet:
    """Сопряжение всех проекторов унитарной матрицей: A -> u A u^H"""
    u = as_matrix(u)
    if u.shape != (m.dim, m.dim):
        raise ShapeError(f"unitary shape {u.shape} does not match set dimension {m.dim}")
    if not is_unitary(u, tol):
        raise DomainError("rotation matrix is not unitary")

    bases = tuple(
        MeasurementBasis(
            dim=m.dim,
            projectors=np.einsum("ab,ibc,dc->iad", u, b.projectors, u.conj()),
            label=b.label,
        )
        for b in m.bases
    )
    return MubSet(dim=m.dim, bases=bases)


def corrupt_mub(m: MubSet) -> MubSet:
    """Отрицательный контроль: последний базис заменяется копией первого"""
    if len(m.bases) < 2:
        raise DomainError("need at least two bases to corrupt a set")
    first = m.bases[0]
    duplicate = MeasurementBasis(dim=m.dim, projectors=first.projectors, label=f"{first.label}-duplicate")
    return MubSet(dim=m.dim, bases=m.bases[:-1] + (duplicate,))


def basis_bloch_vectors(basis: MeasurementBasis, operator_basis: OperatorBasis) -> NDArray[np.float64]:
    """Векторы Блоха проекторов базиса, по строкам: shape (d, d^2 - 1)"""
    return np.stack([encode(p, operator_basis).coords for p in basis.projectors])


def subspace_projector(basis: MeasurementBasis, operator_basis: OperatorBasis) -> NDArray[np.float64]:
    """(1/d) sum_i a_i a_i^T: проектор на (d-1)-мерное подпространство базиса"""
    a = basis_bloch_vectors(basis, operator_basis)
    return a.T @ a / basis.dim


def _max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def _intra_basis_deviation(basis: MeasurementBasis, vectors: NDArray[np.float64]) -> float:
    d = basis.dim
    p = basis.projectors
    overlaps = np.einsum("iab,jba->ij", p, p)
    operator_dev = max(
        _max_abs(overlaps - np.eye(d)),
        _max_abs(p.sum(axis=0) - np.eye(d)),
    )
    bloch_dev = max(
        _max_abs(vectors @ vectors.T - (d * np.eye(d) - 1.0)),
        _max_abs(vectors.sum(axis=0)),
    )
    return max(operator_dev, bloch_dev)


def verify_mub(m: MubSet, tol: float = DEFAULT_TOL) -> VerificationReport:
    """
    Проверки полного набора:
      intra_basis: ортонормированность и полнота внутри базиса
        (в операторной и в блоховской форме);
      overlap: Tr(B_j A_i) = 1/d для всех пар базисов;
      bloch_orthogonality: a_i . b_j = 0;
      subspace_projector: (1/d) sum a_i a_i^T проектор ранга d-1;
      subspace_orthogonality: P_alpha P_beta = 0;
      resolution: sum_alpha P_alpha = единица пространства Блоха.
    Отчёт не бросает исключений, провалы видны в deviations.
    """
    d = m.dim
    ob = gell_mann_basis(d)
    vectors = [basis_bloch_vectors(b, ob) for b in m.bases]
    projectors = [a.T @ a / d for a in vectors]

    intra = max((_intra_basis_deviation(b, a) for b, a in zip(m.bases, vectors)), default=0.0)

    overlap = 0.0
    bloch_orth = 0.0
    subspace_orth = 0.0
    n = len(m.bases)
    for alpha in range(n):
        for beta in range(alpha + 1, n):
            pa, pb = m.bases[alpha].projectors, m.bases[beta].projectors
            probs = np.einsum("iab,jba->ij", pa, pb).real
            overlap = max(overlap, _max_abs(probs - 1.0 / d))
            bloch_orth = max(bloch_orth, _max_abs(vectors[alpha] @ vectors[beta].T))
            subspace_orth = max(subspace_orth, _max_abs(projectors[alpha] @ projectors[beta]))

    proj_dev = 0.0
    for p in projectors:
        proj_dev = max(proj_dev, _max_abs(p @ p - p), abs(np.trace(p) - (d - 1)))

    identity = np.eye(d * d - 1)
    resolution = _max_abs(sum(projectors, np.zeros_like(identity)) - identity)

    report = VerificationReport(
        dim=d,
        tol=tol,
        basis_count=n,
        deviations={
            "intra_basis": intra,
            "overlap": overlap,
            "bloch_orthogonality": bloch_orth,
            "subspace_projector": proj_dev,
            "subspace_orthogonality": subspace_orth,
            "resolution": resolution,
        },
    )
    if not report.passed:
        logger.warning(f"MUB verification failed for d={d}: {report.failed_checks}")
    return report

