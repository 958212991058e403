"""
Команды командной строки: построение и проверка наборов MUB, отчёты о
расстоянии, эксперименты эквивалентности и порядка, серии с конечным
числом повторов и сценарий поляризационной томографии.

Каждая команда возвращает CommandResult; код выхода:
0: проверка пройдена, 1: проверка не пройдена,
2: неверная конфигурация или неподдерживаемая размерность, 3: ошибка ввода-вывода.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings

from apps.bloch.services import DensityOperator
from apps.linalg.services import DomainError, OpdistError
from apps.metric.services import (
    fidelity,
    information_content,
    ordering_check,
    total_distance,
)
from apps.mub.services import corrupt_mub, rotate_mub, standard_mub, verify_mub
from apps.sampler.services import (
    POLARIZER_SETTINGS,
    RNG_ALGORITHM,
    SEED_SPLITTING_RULE,
    check_seed,
    convergence_sweep,
    haar_unitary,
    random_mixed,
    random_pure,
    tomography_scenario,
)
from apps.cli.writers import complex_matrix_to_json, write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3

COMMANDS = ("mub", "distance", "equivalence", "ordering", "shots", "tomography")
FORMATS = ("csv", "json")
PAIR_KINDS = ("mixed", "pure", "orthogonal", "h45", "identical")
ORDERING_MODES = ("both", "mixed", "pure")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ConfigError(OpdistError):
    """Неверные параметры запуска"""
    pass


def _get_run_defaults() -> dict:
    """Настройки запуска: OPDIST из settings поверх значений по умолчанию"""
    default = {
        "VERSION": "1.0.0",
        "TOLERANCE": 1e-9,
        "TRIALS": 100,
        "SEEDS": [0],
        "SHOTS": [1000, 10_000, 100_000, 1_000_000],
        "FORMAT": "csv",
        "OUTPUT_DIR": Path("results"),
    }
    cfg = getattr(settings, "OPDIST", None) or {}
    return {**default, **cfg}


@dataclass(frozen=True)
class RunConfig:
    command: str
    dim: int
    seeds: Tuple[int, ...]
    trials: int
    shots: Tuple[int, ...]
    tolerance: float
    fmt: str = "csv"
    out: Optional[Path] = None
    output_dir: Path = Path("results")
    pair: str = "mixed"
    mode: str = "both"
    bias_corrected: bool = False
    self_test: bool = False

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        object.__setattr__(self, "shots", tuple(self.shots))

        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command '{self.command}'")
        if self.dim < 2:
            raise ConfigError(f"dimension must be >= 2, got {self.dim}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        for seed in self.seeds:
            try:
                check_seed(seed)
            except DomainError as e:
                raise ConfigError(str(e)) from e
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.shots or any(n < 1 for n in self.shots):
            raise ConfigError(f"every shot count must be >= 1, got {list(self.shots)}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got '{self.fmt}'")
        if self.pair not in PAIR_KINDS:
            raise ConfigError(f"pair must be one of {PAIR_KINDS}, got '{self.pair}'")
        if self.mode not in ORDERING_MODES:
            raise ConfigError(f"mode must be one of {ORDERING_MODES}, got '{self.mode}'")

    def echo(self) -> dict:
        """Параметры, определяющие содержимое результата (без путей)"""
        return {
            "command": self.command,
            "dim": self.dim,
            "seeds": list(self.seeds),
            "trials": self.trials,
            "shots": list(self.shots),
            "tolerance": self.tolerance,
            "format": self.fmt,
            "pair": self.pair,
            "mode": self.mode,
            "bias_corrected": self.bias_corrected,
            "self_test": self.self_test,
        }

    def output_path(self) -> Path:
        if self.out is not None:
            return Path(self.out)
        return Path(self.output_dir) / f"{self.command}_d{self.dim}.{self.fmt}"


@dataclass
class CommandResult:
    exit_code: int
    message: str
    paths: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_OK


def build_config(command: str, **options) -> RunConfig:
    """RunConfig из флагов; отсутствующие значения берутся из настроек"""
    defaults = _get_run_defaults()

    def pick(name, key):
        value = options.get(name)
        return defaults[key] if value is None else value

    return RunConfig(
        command=command,
        dim=options.get("dim") if options.get("dim") is not None else 2,
        seeds=pick("seeds", "SEEDS"),
        trials=pick("trials", "TRIALS"),
        shots=pick("shots", "SHOTS"),
        tolerance=pick("tolerance", "TOLERANCE"),
        fmt=pick("fmt", "FORMAT"),
        out=options.get("out"),
        output_dir=Path(defaults["OUTPUT_DIR"]),
        pair=options.get("pair") or "mixed",
        mode=options.get("mode") or "both",
        bias_corrected=bool(options.get("bias_corrected")),
        self_test=bool(options.get("self_test")),
    )


def _metadata(cfg: RunConfig) -> dict:
    return {
        "tool": "opdist",
        "version": _get_run_defaults()["VERSION"],
        "command": cfg.command,
        "config": cfg.echo(),
        "rng": RNG_ALGORITHM,
        "seed_splitting": SEED_SPLITTING_RULE,
    }


def _emit_table(cfg: RunConfig, header: Sequence[str], rows: List[Sequence[Any]],
                summary: Dict[str, Any], extra: Optional[Dict[str, Any]] = None) -> Path:
    path = cfg.output_path()
    if cfg.fmt == "csv":
        return write_csv(path, {**_metadata(cfg), **summary}, header, rows)
    document = {
        "metadata": _metadata(cfg),
        "summary": summary,
        "rows": [dict(zip(header, row)) for row in rows],
    }
    document.update(extra or {})
    return write_json(path, document)


def _pair_for(kind: str, d: int, seed: int, key: Tuple[int, ...] = ()) -> Tuple[DensityOperator, DensityOperator]:
    """Пара состояний заданного вида"""
    if kind == "mixed":
        return random_mixed(d, seed, key + (0,)), random_mixed(d, seed, key + (1,))
    if kind == "pure":
        return random_pure(d, seed, key + (0,)), random_pure(d, seed, key + (1,))
    if kind == "orthogonal":
        eye = np.eye(d)
        return DensityOperator.pure(eye[0]), DensityOperator.pure(eye[1])
    if kind == "h45":
        # для кубита: горизонтальная и диагональная (45 градусов) поляризации
        return DensityOperator.pure(np.eye(d)[0]), DensityOperator.pure(np.ones(d))
    if kind == "identical":
        rho = random_mixed(d, seed, key + (0,))
        return rho, rho
    raise ConfigError(f"unknown pair kind '{kind}'")


def cmd_mub(cfg: RunConfig) -> CommandResult:
    m = standard_mub(cfg.dim)
    report = verify_mub(m, cfg.tolerance)
    bases = [
        {"label": b.label, "projectors": [complex_matrix_to_json(p) for p in b.projectors]}
        for b in m.bases
    ]
    path = cfg.output_path()
    if cfg.fmt == "csv":
        rows = [(name, dev, dev <= cfg.tolerance) for name, dev in report.deviations.items()]
        rows.append(("basis_count", report.basis_count, report.basis_count == cfg.dim + 1))
        paths = [
            write_csv(path, {**_metadata(cfg), "passed": report.passed}, ["check", "deviation", "passed"], rows),
            write_json(path.with_suffix(".bases.json"), {"metadata": _metadata(cfg), "bases": bases}),
        ]
    else:
        paths = [write_json(path, {"metadata": _metadata(cfg), "bases": bases, "report": report.as_dict()})]

    if report.passed:
        return CommandResult(EXIT_OK, f"{len(m.bases)} bases exported, verification passed",
                             paths, report.as_dict())
    return CommandResult(EXIT_CHECK_FAILED, f"verification failed: {report.failed_checks}",
                         paths, report.as_dict())


def cmd_distance(cfg: RunConfig) -> CommandResult:
    m = standard_mub(cfg.dim)
    rows, reports = [], []
    for seed in sorted(cfg.seeds):
        rho1, rho2 = _pair_for(cfg.pair, cfg.dim, seed)
        report = total_distance(rho1, rho2, m)
        f = fidelity(rho1, rho2)
        info_1, info_2 = information_content(rho1), information_content(rho2)
        rows.append((seed, report.total, report.hs_distance_sq, report.deviation, f, info_1, info_2))
        reports.append({"seed": seed, "fidelity": f, "information_1": info_1,
                        "information_2": info_2, **report.as_dict()})

    max_dev = max(r[3] for r in rows)
    summary = {"max_deviation": max_dev, "passed": max_dev <= cfg.tolerance}
    header = ["seed", "total", "hs_distance_sq", "deviation", "fidelity", "information_1", "information_2"]
    path = _emit_table(cfg, header, rows, summary, {"reports": reports})

    code = EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED
    return CommandResult(code, f"max deviation {max_dev:.3e}", [path], summary)


def cmd_equivalence(cfg: RunConfig) -> CommandResult:
    """
    Для каждого seed: случайно повёрнутый полный набор и cfg.trials пар
    состояний. С self_test последний базис заменяется копией первого.
    """
    base = standard_mub(cfg.dim)
    if cfg.self_test:
        logger.warning("Self-test: running equivalence on a corrupted MUB set")
        base = corrupt_mub(base)

    rows = []
    for seed in sorted(cfg.seeds):
        m = rotate_mub(base, haar_unitary(cfg.dim, seed, key=(0,)))
        for trial in range(cfg.trials):
            rho1, rho2 = _pair_for(cfg.pair, cfg.dim, seed, key=(1, trial))
            report = total_distance(rho1, rho2, m)
            rows.append((seed, trial, report.total, report.hs_distance_sq, report.deviation))

    max_dev = max(r[4] for r in rows)
    summary = {"max_deviation": max_dev, "passed": max_dev <= cfg.tolerance, "self_test": cfg.self_test}
    path = _emit_table(cfg, ["seed", "trial", "d_total", "hs_distance_sq", "deviation"], rows, summary)

    if summary["passed"]:
        return CommandResult(EXIT_OK, f"max deviation {max_dev:.3e} <= {cfg.tolerance:g}", [path], summary)
    return CommandResult(EXIT_CHECK_FAILED, f"max deviation {max_dev:.3e} exceeds {cfg.tolerance:g}",
                         [path], summary)


def fixed_counterexample() -> Tuple[DensityOperator, List[DensityOperator]]:
    """sigma = |0><0|, rho1 = diag(0.7, 0.3), rho2 = (I + 0.8 sigma_x + 0.5 sigma_z)/2"""
    sigma = DensityOperator.pure([1, 0])
    rho1 = DensityOperator(2, np.diag([0.7, 0.3]).astype(np.complex128))
    rho2 = DensityOperator(2, (np.eye(2) + 0.8 * SIGMA_X + 0.5 * SIGMA_Z) / 2)
    return sigma, [rho1, rho2]


def _state_cell(rho: DensityOperator) -> str:
    return json.dumps(complex_matrix_to_json(rho.matrix))


def cmd_ordering(cfg: RunConfig) -> CommandResult:
    """
    Смешанный режим ищет нарушения эквивалентности порядков F и D,
    чистый режим подтверждает их отсутствие. Для d=2 смешанный режим
    начинается с фиксированного контрпримера (trial = -1).
    """
    m = standard_mub(cfg.dim)
    modes = ("mixed", "pure") if cfg.mode == "both" else (cfg.mode,)
    seeds = sorted(cfg.seeds)

    rows = []
    counts = {mode: 0 for mode in modes}
    pairs = {mode: 0 for mode in modes}

    def run(mode, seed, trial, sigma, tests):
        report = ordering_check(sigma, tests, m)
        pairs[mode] += report.pairs_checked
        counts[mode] += len(report.violations)
        for v in report.violations:
            rows.append((mode, seed, trial, _state_cell(sigma), _state_cell(tests[v.i]), _state_cell(tests[v.j]),
                         v.fidelity_i, v.fidelity_j, v.distance_i, v.distance_j))

    for seed in seeds:
        if "mixed" in modes and cfg.dim == 2 and seed == seeds[0]:
            run("mixed", seed, -1, *fixed_counterexample())
        for trial in range(cfg.trials):
            sigma = random_pure(cfg.dim, seed, key=(0, trial))
            if "mixed" in modes:
                run("mixed", seed, trial, sigma,
                    [random_mixed(cfg.dim, seed, key=(1, trial, k)) for k in range(2)])
            if "pure" in modes:
                run("pure", seed, trial, sigma,
                    [random_pure(cfg.dim, seed, key=(2, trial, k)) for k in range(2)])

    rows.sort(key=lambda r: (r[1], r[2], r[0]))
    summary = {f"{mode}_violations": counts[mode] for mode in modes}
    summary.update({f"{mode}_pairs": pairs[mode] for mode in modes})

    passed = True
    if "mixed" in modes:
        passed &= counts["mixed"] >= 1
    if "pure" in modes:
        passed &= counts["pure"] == 0
    summary["passed"] = passed

    header = ["mode", "seed", "trial", "sigma", "rho_i", "rho_j",
              "fidelity_i", "fidelity_j", "distance_i", "distance_j"]
    path = _emit_table(cfg, header, rows, summary)
    message = ", ".join(f"{mode}: {counts[mode]} violations in {pairs[mode]} pairs" for mode in modes)
    return CommandResult(EXIT_OK if passed else EXIT_CHECK_FAILED, message, [path], summary)


def cmd_shots(cfg: RunConfig) -> CommandResult:
    """
    Строки (n, seed, оценка, точное значение, ошибка), затем RMS по seed
    для каждого n и строка с наклоном log10(RMS) от log10(n).
    Пара состояний фиксируется по наименьшему seed.
    """
    m = standard_mub(cfg.dim)
    rho1, rho2 = _pair_for(cfg.pair, cfg.dim, min(cfg.seeds))
    result = convergence_sweep(rho1, rho2, m, cfg.shots, cfg.seeds, cfg.bias_corrected)

    rows = [("sample", r.n, r.seed, r.estimate, r.exact, r.abs_error) for r in result.rows]
    rows += [("rms", n, None, None, None, rms) for n, rms in result.rms.items()]
    rows.append(("slope", None, None, result.slope, None, None))

    summary = {
        "slope": result.slope,
        "estimator": "bias-corrected" if cfg.bias_corrected else "plug-in",
    }
    path = _emit_table(cfg, ["kind", "n", "seed", "estimate", "exact", "abs_error"], rows, summary)
    slope = "n/a" if result.slope is None else f"{result.slope:.3f}"
    return CommandResult(EXIT_OK, f"log-log slope {slope}", [path], summary)


def cmd_tomography(cfg: RunConfig) -> CommandResult:
    if cfg.dim != 2:
        raise ConfigError(f"tomography is defined for qubits only, got d={cfg.dim}")

    rho1, rho2 = _pair_for(cfg.pair, 2, min(cfg.seeds))
    rows, reports = [], []
    for seed in sorted(cfg.seeds):
        for n in sorted(cfg.shots):
            report = tomography_scenario(rho1, rho2, n, seed, cfg.bias_corrected, key=(n,))
            rows.append((n, seed, report.estimate, report.exact, report.reconstructed_distance,
                         *report.stokes_1, *report.stokes_2))
            reports.append({
                "n": n,
                "seed": seed,
                "intensity_shots": report.intensity_shots,
                "settings": [vars(s) for s in report.settings],
                "reconstructed_1": report.reconstructed_1,
                "reconstructed_2": report.reconstructed_2,
            })

    summary = {"settings": list(POLARIZER_SETTINGS.values())}
    header = ["n", "seed", "estimate", "exact", "reconstructed_distance",
              "stokes_1_x", "stokes_1_y", "stokes_1_z", "stokes_2_x", "stokes_2_y", "stokes_2_z"]
    path = _emit_table(cfg, header, rows, summary, {"reports": reports})
    return CommandResult(EXIT_OK, f"{len(rows)} tomography runs", [path], summary)


RUNNERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "mub": cmd_mub,
    "distance": cmd_distance,
    "equivalence": cmd_equivalence,
    "ordering": cmd_ordering,
    "shots": cmd_shots,
    "tomography": cmd_tomography,
}


def run_command(cfg: RunConfig) -> CommandResult:
    return RUNNERS[cfg.command](cfg)
