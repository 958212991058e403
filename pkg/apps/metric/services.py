"""
Операционное расстояние и его сравнение с fidelity.

D_alpha: квадрат евклидова расстояния между векторами вероятностей исходов
одного измерения, D_total: сумма по полному набору дополнительных измерений.
Для любого полного набора D_total совпадает с ||rho1 - rho2||^2.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from apps.bloch.services import BlochVector, DensityOperator, OperatorBasis, purity
from apps.linalg.services import DomainError, ShapeError, eigh, hs_norm_sq, psd_sqrt
from apps.mub.services import MeasurementBasis, MubSet, basis_bloch_vectors

logger = logging.getLogger(__name__)

# Допуск на сумму вероятностей
PROBABILITY_TOL = 1e-9
# Отрицательные вероятности не ниже -NEGATIVITY_TOL считаются шумом и обнуляются
NEGATIVITY_TOL = 1e-12
# Мёртвая зона при сравнении F и D: разности внутри считаются ничьей
ORDERING_TOL = 1e-9
PURITY_TOL = 1e-9


@dataclass(frozen=True)
class ProbabilityVector:
    probs: NDArray[np.float64]

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64).ravel()
        if p.size == 0:
            raise ShapeError("empty probability vector")
        if np.min(p) < -NEGATIVITY_TOL:
            raise DomainError(f"negative probability {np.min(p):.3e}")
        # малые отрицательные значения: шум округления
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > PROBABILITY_TOL:
            raise DomainError(f"probabilities sum to {p.sum():.12g}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.probs.size


@dataclass
class DistanceReport:
    per_basis: List[Tuple[str, float]]
    total: float
    hs_distance_sq: float
    deviation: float

    def as_dict(self) -> dict:
        return {
            "per_basis": [{"basis": label, "distance": value} for label, value in self.per_basis],
            "total": self.total,
            "hs_distance_sq": self.hs_distance_sq,
            "deviation": self.deviation,
        }


class RelationSides(NamedTuple):
    lhs: float
    rhs: float


@dataclass(frozen=True)
class OrderingViolation:
    i: int
    j: int
    fidelity_i: float
    fidelity_j: float
    distance_i: float
    distance_j: float


@dataclass(frozen=True)
class PairSigns:
    """Знаки F_i - F_j и D_j - D_i; 0 внутри мёртвой зоны"""
    i: int
    j: int
    fidelity_sign: int
    distance_sign: int


@dataclass
class OrderingReport:
    fidelities: List[float]
    distances: List[float]
    pairs_checked: int
    violations: List[OrderingViolation] = field(default_factory=list)
    signs: List[PairSigns] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return not self.violations


def _check_same_dim(*states: DensityOperator) -> int:
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise ShapeError(f"dimension mismatch between states: {sorted(dims)}")
    return dims.pop()


def born_probabilities(rho: DensityOperator, basis: MeasurementBasis) -> ProbabilityVector:
    """p_i = Tr(m_i rho)"""
    if rho.dim != basis.dim:
        raise ShapeError(f"state dimension {rho.dim} does not match basis dimension {basis.dim}")
    probs = np.einsum("iab,ba->i", basis.projectors, rho.matrix).real
    return ProbabilityVector(probs)


def single_distance(p1: ProbabilityVector, p2: ProbabilityVector) -> float:
    """D_alpha = |p1 - p2|^2"""
    if p1.dim != p2.dim:
        raise ShapeError(f"probability vectors have different lengths: {p1.dim} vs {p2.dim}")
    diff = p1.probs - p2.probs
    return float(diff @ diff)


def single_distance_bloch(v1: BlochVector, v2: BlochVector, basis: MeasurementBasis,
                          operator_basis: OperatorBasis) -> float:
    """D_alpha в блоховской форме: (1/d^2) sum_i (m_i . (v1 - v2))^2"""
    if not v1.dim == v2.dim == basis.dim == operator_basis.dim:
        raise ShapeError("Bloch vectors, basis and operator basis must share one dimension")
    m = basis_bloch_vectors(basis, operator_basis)
    projections = m @ (v1.coords - v2.coords)
    return float(projections @ projections) / basis.dim ** 2


def hs_distance_sq(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """||rho1 - rho2||^2"""
    _check_same_dim(rho1, rho2)
    return hs_norm_sq(rho1.matrix - rho2.matrix)


def total_distance(rho1: DensityOperator, rho2: DensityOperator, m: MubSet) -> DistanceReport:
    """
    Сумма D_alpha по всем базисам набора и, для сравнения, ||rho1 - rho2||^2.
    Совпадение (deviation) только сообщается, не навязывается: набор,
    не прошедший verify_mub, даст большое отклонение.
    """
    d = _check_same_dim(rho1, rho2)
    if m.dim != d:
        raise ShapeError(f"state dimension {d} does not match set dimension {m.dim}")

    per_basis = [
        (b.label, single_distance(born_probabilities(rho1, b), born_probabilities(rho2, b)))
        for b in m.bases
    ]
    total = math.fsum(value for _, value in per_basis)
    hs = hs_distance_sq(rho1, rho2)
    return DistanceReport(per_basis=per_basis, total=total, hs_distance_sq=hs, deviation=abs(total - hs))


def operational_metric(rho1: DensityOperator, rho2: DensityOperator, m: MubSet) -> float:
    """sqrt(D_total): метрика, наследующая аксиомы нормы Гильберта-Шмидта"""
    return math.sqrt(max(total_distance(rho1, rho2, m).total, 0.0))


def information_content(rho: DensityOperator, n: float = 1.0) -> float:
    """I(rho) = N ||rho - I/d||^2; нормировка N не фиксирована, по умолчанию 1"""
    if not n > 0:
        raise DomainError(f"normalisation factor must be positive, got {n}")
    return n * hs_distance_sq(rho, DensityOperator.maximally_mixed(rho.dim))


def fidelity(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """
    F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.
    Если одно из состояний чистое, F = Tr(rho1 rho2) без извлечения корней.
    Иначе внешний корень берётся через собственные значения произведения,
    отрицательные значения обнуляются.
    """
    _check_same_dim(rho1, rho2)
    if _is_pure(rho1) or _is_pure(rho2):
        return min(max(_overlap(rho1, rho2), 0.0), 1.0)

    s = psd_sqrt(rho1.matrix)
    product = s @ rho2.matrix @ s
    product = 0.5 * (product + product.conj().T)
    w = eigh(product).eigenvalues
    value = float(np.sum(np.sqrt(np.clip(w, 0.0, None)))) ** 2
    return min(max(value, 0.0), 1.0)


def _is_pure(rho: DensityOperator) -> bool:
    return abs(purity(rho) - 1.0) <= PURITY_TOL


def _overlap(a: DensityOperator, b: DensityOperator) -> float:
    """Tr(a b)"""
    return float(np.einsum("ab,ba->", a.matrix, b.matrix).real)


def _require_pure(sigma: DensityOperator) -> None:
    if not _is_pure(sigma):
        raise DomainError(f"reference state must be pure, purity = {purity(sigma):.12g}")


def fidelity_pure(sigma: DensityOperator, rho: DensityOperator) -> float:
    """F_sigma(rho) = Tr(sigma rho) = <sigma|rho|sigma> для чистого sigma"""
    _check_same_dim(sigma, rho)
    _require_pure(sigma)
    return _overlap(sigma, rho)


def purity_fidelity_relation(sigma: DensityOperator, rho: DensityOperator) -> RelationSides:
    """D_sigma(rho) и P(sigma) + P(rho) - 2 F_sigma(rho)"""
    f = fidelity_pure(sigma, rho)
    return RelationSides(
        lhs=hs_distance_sq(sigma, rho),
        rhs=purity(sigma) + purity(rho) - 2.0 * f,
    )


def ordering_check(sigma: DensityOperator, tests: Sequence[DensityOperator], m: MubSet) -> OrderingReport:
    """
    Проверка эквивалентности порядков: F(rho_i) <= F(rho_j) <=> D(rho_i) >= D(rho_j).
    Для каждой пары i < j в signs записываются знаки F_i - F_j и D_j - D_i
    (0, если разность по модулю не больше ORDERING_TOL). Порядки согласованы,
    когда fidelity_sign == distance_sign. В violations попадают только пары,
    где обе разности ненулевые и знаки различаются.
    """
    _require_pure(sigma)
    fidelities = np.array([fidelity_pure(sigma, rho) for rho in tests])
    distances = np.array([total_distance(sigma, rho, m).total for rho in tests])

    violations = []
    signs = []
    n = len(tests)
    for i in range(n):
        for j in range(i + 1, n):
            sf = _dead_zone_sign(fidelities[i] - fidelities[j])
            sd = _dead_zone_sign(distances[j] - distances[i])
            signs.append(PairSigns(i=i, j=j, fidelity_sign=sf, distance_sign=sd))
            if sf != 0 and sd != 0 and sf != sd:
                violations.append(OrderingViolation(
                    i=i, j=j,
                    fidelity_i=float(fidelities[i]), fidelity_j=float(fidelities[j]),
                    distance_i=float(distances[i]), distance_j=float(distances[j]),
                ))

    if violations:
        logger.info(f"Ordering check: {len(violations)} violations among {n} test states")
    return OrderingReport(
        fidelities=fidelities.tolist(),
        distances=distances.tolist(),
        pairs_checked=n * (n - 1) // 2,
        violations=violations,
        signs=signs,
    )


def _dead_zone_sign(x: float) -> int:
    if abs(x) <= ORDERING_TOL:
        return 0
    return 1 if x > 0 else -1


def ordering_check_references(sigmas: Sequence[DensityOperator], tests: Sequence[DensityOperator],
                              m: MubSet) -> List[OrderingReport]:
    """F и D эквивалентны на наборе эталонов, если эквивалентны для каждого из них"""
    return [ordering_check(sigma, tests, m) for sigma in sigmas]
