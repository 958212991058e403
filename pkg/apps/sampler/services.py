"""
Случайные состояния и моделирование измерений с конечным числом повторов.

Все функции детерминированы по (входы, seed). Независимые потоки для
отдельных задач получаются из одного seed через spawn_key:
    SeedSequence(entropy=seed, spawn_key=key) -> PCG64 -> Generator.
Общего изменяемого состояния ГСЧ нет.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress, unitary_group

from apps.bloch.services import BlochVector, DensityOperator, decode, gell_mann_basis
from apps.linalg.services import ComplexMatrix, DomainError, ShapeError, hs_norm_sq
from apps.metric.services import ProbabilityVector, born_probabilities, hs_distance_sq, single_distance
from apps.mub.services import MeasurementBasis, MubSet, basis_bloch_vectors, standard_mub

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.PCG64"
SEED_SPLITTING_RULE = "SeedSequence(entropy=seed, spawn_key=task_key) per independent stream"
MAX_SEED = 2 ** 64 - 1

# Установки поляризатора для кубита (собственный базис -> название)
POLARIZER_SETTINGS = {
    "sigma_z": "horizontal",
    "sigma_x": "diagonal_45",
    "sigma_y": "right_circular",
}

Key = Tuple[int, ...]
# 64-битное беззнаковое целое, проверяется check_seed
RngSeed = int


@dataclass(frozen=True)
class ShotRecord:
    label: str
    counts: Tuple[int, ...]
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise DomainError(f"shot count must be positive, got {self.shots}")
        if any(c < 0 for c in self.counts) or sum(self.counts) != self.shots:
            raise DomainError(f"counts {self.counts} do not add up to {self.shots} shots")


@dataclass
class DistanceEstimate:
    estimate: float
    exact: float
    n_per_basis: int
    per_basis: List[Tuple[str, float]] = field(default_factory=list)
    bias_corrected: bool = False

    @property
    def estimator(self) -> str:
        return "bias-corrected" if self.bias_corrected else "plug-in"

    @property
    def abs_error(self) -> float:
        return abs(self.estimate - self.exact)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: RngSeed
    estimate: float
    exact: float
    abs_error: float


@dataclass
class ConvergenceResult:
    rows: List[ConvergenceRow]
    rms: Dict[int, float]
    slope: Optional[float]


@dataclass
class SettingRecord:
    setting: str
    basis: str
    frequencies_1: List[float]
    frequencies_2: List[float]


@dataclass
class TomographyReport:
    shots: int
    intensity_shots: int
    settings: List[SettingRecord]
    stokes_1: List[float]
    stokes_2: List[float]
    reconstructed_1: ComplexMatrix
    reconstructed_2: ComplexMatrix
    estimate: float
    exact: float
    reconstructed_distance: float
    bias_corrected: bool = False


def check_seed(seed: RngSeed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def make_rng(seed: RngSeed, key: Key = ()) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def _check_dim(d: int) -> None:
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")


def random_pure(d: int, seed: RngSeed, key: Key = ()) -> DensityOperator:
    """Haar-случайное чистое состояние: нормированный комплексный гауссов вектор"""
    _check_dim(d)
    rng = make_rng(seed, key)
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityOperator.pure(psi)


def random_mixed(d: int, seed: RngSeed, key: Key = ()) -> DensityOperator:
    """rho = G G^H / Tr(G G^H), G: комплексная матрица Жинибра"""
    _check_dim(d)
    rng = make_rng(seed, key)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(dim=d, matrix=rho / np.trace(rho).real)


def haar_unitary(d: int, seed: RngSeed, key: Key = ()) -> ComplexMatrix:
    _check_dim(d)
    return unitary_group.rvs(d, random_state=make_rng(seed, key))


def simulate_shots(rho: DensityOperator, basis: MeasurementBasis, n: int, seed: RngSeed,
                   key: Key = ()) -> ShotRecord:
    """Полиномиальная выборка n исходов с вероятностями Борна"""
    if n < 1:
        raise DomainError(f"shot count must be positive, got {n}")
    p = born_probabilities(rho, basis).probs
    counts = make_rng(seed, key).multinomial(n, p / p.sum())
    return ShotRecord(label=basis.label, counts=tuple(int(c) for c in counts), shots=n)


def empirical_probabilities(record: ShotRecord) -> ProbabilityVector:
    return ProbabilityVector(np.asarray(record.counts, dtype=np.float64) / record.shots)


def _sample_frequencies(rho1: DensityOperator, rho2: DensityOperator, m: MubSet, n: int,
                        seed: RngSeed, key: Key) -> List[Tuple[MeasurementBasis, ProbabilityVector, ProbabilityVector]]:
    if not rho1.dim == rho2.dim == m.dim:
        raise ShapeError(f"dimensions differ: states {rho1.dim}, {rho2.dim}; set {m.dim}")
    sampled = []
    for index, basis in enumerate(m.bases):
        # независимые потоки для каждого (базис, система)
        f1 = empirical_probabilities(simulate_shots(rho1, basis, n, seed, key + (index, 0)))
        f2 = empirical_probabilities(simulate_shots(rho2, basis, n, seed, key + (index, 1)))
        sampled.append((basis, f1, f2))
    return sampled


def _bias_term(f: ProbabilityVector, n: int) -> float:
    return float(np.sum(f.probs * (1.0 - f.probs))) / (n - 1)


def _estimate_from_frequencies(sampled, n: int, bias_corrected: bool) -> List[Tuple[str, float]]:
    if bias_corrected and n < 2:
        raise DomainError("bias-corrected estimator needs at least 2 shots per basis")
    per_basis = []
    for basis, f1, f2 in sampled:
        value = single_distance(f1, f2)
        if bias_corrected:
            value -= _bias_term(f1, n) + _bias_term(f2, n)
        per_basis.append((basis.label, value))
    return per_basis


def estimate_total_distance(rho1: DensityOperator, rho2: DensityOperator, m: MubSet, n_per_basis: int,
                            seed: RngSeed, bias_corrected: bool = False, key: Key = ()) -> DistanceEstimate:
    """
    Оценка D_total по частотам: |f1 - f2|^2, просуммированное по базисам.
    Оценка «plug-in» смещена вверх на O(1/n); вариант bias_corrected
    вычитает sum f(1-f)/(n-1) для обеих систем и несмещён при n >= 2.
    Оценка не обрезается: при n = 1 она лежит в [0, 2(d+1)].
    """
    sampled = _sample_frequencies(rho1, rho2, m, n_per_basis, seed, key)
    per_basis = _estimate_from_frequencies(sampled, n_per_basis, bias_corrected)
    return DistanceEstimate(
        estimate=math.fsum(v for _, v in per_basis),
        exact=hs_distance_sq(rho1, rho2),
        n_per_basis=n_per_basis,
        per_basis=per_basis,
        bias_corrected=bias_corrected,
    )


def convergence_sweep(rho1: DensityOperator, rho2: DensityOperator, m: MubSet, shot_counts: Sequence[int],
                      seeds: Sequence[RngSeed], bias_corrected: bool = False) -> ConvergenceResult:
    """
    Оценки для каждой пары (n, seed), RMS ошибки по seed для каждого n и
    наклон log10(RMS) от log10(n). Наклон None, если различных n меньше двух
    или RMS обращается в ноль.
    """
    rows = []
    for seed in seeds:
        for n in shot_counts:
            est = estimate_total_distance(rho1, rho2, m, n, seed, bias_corrected, key=(int(n),))
            rows.append(ConvergenceRow(n=int(n), seed=int(seed), estimate=est.estimate,
                                       exact=est.exact, abs_error=est.abs_error))
    rows.sort(key=lambda r: (r.seed, r.n))

    rms = {}
    for n in sorted(set(int(n) for n in shot_counts)):
        errors = np.array([r.abs_error for r in rows if r.n == n])
        rms[n] = float(np.sqrt(np.mean(errors ** 2)))

    slope = None
    if len(rms) >= 2 and all(v > 0 for v in rms.values()):
        fit = linregress(np.log10(list(rms.keys())), np.log10(list(rms.values())))
        slope = float(fit.slope)
    logger.debug(f"Convergence sweep over n={sorted(rms)}: slope={slope}")
    return ConvergenceResult(rows=rows, rms=rms, slope=slope)


def linear_inversion(frequencies: Sequence[ProbabilityVector], m: MubSet) -> BlochVector:
    """
    Вектор Блоха по частотам полного набора: sum_alpha sum_i f_alpha,i m_alpha,i.
    Для кубита это параметры Стокса f(+) - f(-) по трём осям.
    """
    if len(frequencies) != len(m.bases):
        raise ShapeError(f"expected {len(m.bases)} frequency vectors, got {len(frequencies)}")
    ob = gell_mann_basis(m.dim)
    coords = np.zeros(len(ob))
    for f, basis in zip(frequencies, m.bases):
        coords += f.probs @ basis_bloch_vectors(basis, ob)
    return BlochVector(dim=m.dim, coords=coords)


def project_qubit_bloch(v: BlochVector) -> BlochVector:
    """Ближайшая точка шара Блоха: вектор длиннее 1 нормируется, остальные не меняются"""
    if v.dim != 2:
        raise DomainError("Bloch-ball projection is defined for qubits only")
    norm = math.sqrt(v.norm_sq)
    if norm <= 1.0:
        return v
    return BlochVector(dim=2, coords=v.coords / norm)


def tomography_scenario(rho1: DensityOperator, rho2: DensityOperator, n: int, seed: RngSeed,
                        bias_corrected: bool = False, key: Key = ()) -> TomographyReport:
    """
    Томография поляризационного кубита: три поляризатора (горизонтальный,
    45 градусов, правый круговой) образуют полный набор дополнительных
    измерений. Фильтр 50% пропускания нужен только для нормировки
    интенсивности; здесь частоты нормированы сами, и он отражён лишь
    полным числом повторов intensity_shots.
    """
    if rho1.dim != 2 or rho2.dim != 2:
        raise DomainError("tomography scenario is defined for qubits (d = 2) only")

    m = standard_mub(2)
    sampled = _sample_frequencies(rho1, rho2, m, n, seed, key)
    per_basis = _estimate_from_frequencies(sampled, n, bias_corrected)

    settings = [
        SettingRecord(
            setting=POLARIZER_SETTINGS[basis.label],
            basis=basis.label,
            frequencies_1=f1.probs.tolist(),
            frequencies_2=f2.probs.tolist(),
        )
        for basis, f1, f2 in sampled
    ]
    ob = gell_mann_basis(2)
    stokes_1 = linear_inversion([f1 for _, f1, _ in sampled], m)
    stokes_2 = linear_inversion([f2 for _, _, f2 in sampled], m)
    recon_1 = decode(project_qubit_bloch(stokes_1), ob)
    recon_2 = decode(project_qubit_bloch(stokes_2), ob)

    return TomographyReport(
        shots=n,
        intensity_shots=n * len(m.bases),
        settings=settings,
        stokes_1=stokes_1.coords.tolist(),
        stokes_2=stokes_2.coords.tolist(),
        reconstructed_1=recon_1,
        reconstructed_2=recon_2,
        estimate=math.fsum(v for _, v in per_basis),
        exact=hs_distance_sq(rho1, rho2),
        reconstructed_distance=hs_norm_sq(recon_1 - recon_2),
        bias_corrected=bias_corrected,
    )
