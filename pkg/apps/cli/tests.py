import csv
import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from apps.cli.services import ConfigError, RunConfig, build_config, fixed_counterexample
from apps.cli.writers import format_cell, write_csv
from apps.metric.services import ordering_check
from apps.mub.services import standard_mub


def _call(name, *args, **kwargs):
    return call_command(name, *args, stdout=StringIO(), stderr=StringIO(), **kwargs)


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    metadata = [line for line in lines if line.startswith("# ")]
    rows = list(csv.DictReader(line for line in lines if not line.startswith("# ")))
    return metadata, rows


def _returncode(name, *args, **kwargs):
    with pytest.raises(CommandError) as ctx:
        _call(name, *args, **kwargs)
    return ctx.value.returncode


class RunConfigTestCase(SimpleTestCase):

    def _config(self, **overrides):
        params = dict(command="distance", dim=2, seeds=[0], trials=10, shots=[100], tolerance=1e-9)
        params.update(overrides)
        return RunConfig(**params)

    def test_valid_config(self):
        cfg = self._config()
        self.assertEqual(cfg.seeds, (0,))
        self.assertEqual(cfg.output_path().name, "distance_d2.csv")

    def test_invalid_values(self):
        """Тест: каждый неверный параметр: ConfigError"""
        for overrides in ({"trials": 0}, {"tolerance": 0.0}, {"shots": [10, 0]}, {"seeds": [-1]},
                          {"seeds": []}, {"dim": 1}, {"fmt": "xml"}, {"pair": "bell"}, {"command": "plot"}):
            with self.assertRaises(ConfigError):
                self._config(**overrides)

    def test_echo_excludes_paths(self):
        echo = self._config(out="/tmp/a.csv").echo()
        self.assertNotIn("out", echo)
        self.assertEqual(echo["seeds"], [0])

    @override_settings(OPDIST={"TRIALS": 5, "SEEDS": [3, 4]})
    def test_defaults_from_settings(self):
        """Тест: OPDIST из настроек дополняет значения по умолчанию"""
        cfg = build_config("equivalence", dim=3)
        self.assertEqual(cfg.trials, 5)
        self.assertEqual(cfg.seeds, (3, 4))
        self.assertEqual(cfg.tolerance, 1e-9)

    def test_flags_override_settings(self):
        cfg = build_config("shots", dim=2, seeds=[7], shots=[10, 20], tolerance=1e-6)
        self.assertEqual(cfg.seeds, (7,))
        self.assertEqual(cfg.shots, (10, 20))


class FormatCellTestCase(SimpleTestCase):

    def test_round_trippable_floats(self):
        self.assertEqual(float(format_cell(0.1)), 0.1)
        self.assertEqual(format_cell(1 / 3), "0.33333333333333331")
        self.assertEqual(format_cell(None), "")
        self.assertEqual(format_cell(True), "true")
        self.assertEqual(format_cell(7), "7")


def test_csv_metadata_scalars_use_cell_format(tmp_path):
    """Скалярные метаданные записываются так же, как ячейки таблицы"""
    out = write_csv(tmp_path / "m.csv", {"max_deviation": 1 / 3, "passed": False, "missing": None,
                                         "shots": [10, 20]}, ["a"], [[0.1]])
    metadata, rows = _read_csv(out)
    assert metadata == [
        "# max_deviation: 0.33333333333333331",
        "# passed: false",
        "# missing: ",
        "# shots: [10, 20]",
    ]
    assert rows == [{"a": "0.10000000000000001"}]


def test_equivalence_max_deviation_round_trips(tmp_path):
    out = tmp_path / "eq.csv"
    _call("equivalence", dim=2, trials=3, out=out)
    metadata, rows = _read_csv(out)
    line = next(line for line in metadata if line.startswith("# max_deviation: "))
    value = line.split(": ", 1)[1]
    assert value == format_cell(float(value))
    assert float(value) == max(float(r["deviation"]) for r in rows)


def test_mub_qutrit_export(tmp_path):
    out = tmp_path / "mub.csv"
    _call("mub", dim=5, out=out)
    metadata, rows = _read_csv(out)
    assert "# passed: true" in metadata
    assert all(row["passed"] == "true" for row in rows)
    bases = json.loads((tmp_path / "mub.bases.json").read_text())["bases"]
    assert len(bases) == 6
    assert len(bases[0]["projectors"]) == 5


def test_mub_qubit_json(tmp_path):
    out = tmp_path / "mub.json"
    _call("mub", dim=2, out=out, fmt="json")
    document = json.loads(out.read_text())
    assert [b["label"] for b in document["bases"]] == ["sigma_z", "sigma_x", "sigma_y"]
    # |0><0|: элементы как пары [re, im]
    assert document["bases"][0]["projectors"][0] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    assert document["report"]["passed"] is True
    assert document["metadata"]["rng"] == "numpy.random.PCG64"


def test_mub_non_prime_dimension(tmp_path):
    assert _returncode("mub", dim=6, out=tmp_path / "mub.csv") == 2


def test_equivalence_passes(tmp_path):
    out = tmp_path / "eq.csv"
    _call("equivalence", dim=3, trials=100, tolerance=1e-9, out=out)
    _, rows = _read_csv(out)
    assert len(rows) == 100
    assert max(float(r["deviation"]) for r in rows) <= 1e-9


def test_equivalence_identical_pair(tmp_path):
    out = tmp_path / "eq.csv"
    _call("equivalence", dim=2, trials=1, pair="identical", out=out)
    _, rows = _read_csv(out)
    assert float(rows[0]["d_total"]) == 0.0


def test_equivalence_self_test_fails(tmp_path):
    """Испорченный набор даёт код 1 и отклонение в сводке"""
    out = tmp_path / "eq.csv"
    assert _returncode("equivalence", "--self-test", dim=3, trials=5, out=out) == 1
    metadata, _ = _read_csv(out)
    assert any(line.startswith("# max_deviation:") for line in metadata)
    assert "# self_test: true" in metadata


def test_ordering_finds_mixed_violations(tmp_path):
    out = tmp_path / "ordering.json"
    _call("ordering", dim=2, trials=100, out=out, fmt="json")
    summary = json.loads(out.read_text())["summary"]
    assert summary["mixed_violations"] >= 1
    assert summary["pure_violations"] == 0


def test_ordering_pure_mode(tmp_path):
    out = tmp_path / "ordering.csv"
    _call("ordering", dim=3, trials=1000, mode="pure", out=out)
    metadata, rows = _read_csv(out)
    assert "# pure_violations: 0" in metadata
    assert rows == []


def test_ordering_rejects_zero_trials(tmp_path):
    assert _returncode("ordering", dim=2, trials=0, out=tmp_path / "o.csv") == 2


def test_fixed_counterexample_is_a_violation():
    sigma, tests = fixed_counterexample()
    assert not ordering_check(sigma, tests, standard_mub(2)).equivalent


def test_shots_orthogonal_pair(tmp_path):
    out = tmp_path / "shots.csv"
    _call("shots", dim=2, pair="orthogonal", shots=[1_000_000], seeds=[0], out=out)
    _, rows = _read_csv(out)
    samples = [r for r in rows if r["kind"] == "sample"]
    assert len(samples) == 1
    assert abs(float(samples[0]["estimate"]) - 2.0) <= 0.01
    assert rows[-1]["kind"] == "slope"


def test_shots_rows_sorted(tmp_path):
    out = tmp_path / "shots.csv"
    _call("shots", dim=3, shots=[100, 10], seeds=[5, 1], out=out)
    _, rows = _read_csv(out)
    keys = [(int(r["seed"]), int(r["n"])) for r in rows if r["kind"] == "sample"]
    assert keys == [(1, 10), (1, 100), (5, 10), (5, 100)]


def test_tomography_qubit(tmp_path):
    out = tmp_path / "tomo.json"
    _call("tomography", shots=[100_000], out=out, fmt="json")
    document = json.loads(out.read_text())
    row = document["rows"][0]
    assert row["exact"] == pytest.approx(1.0)
    assert row["estimate"] == pytest.approx(1.0, abs=0.02)
    settings = [s["setting"] for s in document["reports"][0]["settings"]]
    assert settings == ["horizontal", "diagonal_45", "right_circular"]


def test_tomography_rejects_qutrits(tmp_path):
    assert _returncode("tomography", dim=3, out=tmp_path / "t.csv") == 2


def test_bad_seed_is_config_error(tmp_path):
    assert _returncode("distance", seeds=[-1], out=tmp_path / "d.csv") == 2


def test_io_error(tmp_path):
    """Недоступный путь вывода: код 3"""
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert _returncode("distance", out=blocker / "d.csv") == 3


@pytest.mark.parametrize("name, extra", [
    ("distance", {"pair": "mixed"}),
    ("equivalence", {"trials": 5}),
    ("shots", {"shots": [10, 100]}),
    ("ordering", {"trials": 20}),
])
def test_runs_are_byte_identical(tmp_path, name, extra):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    _call(name, dim=3, seeds=[0, 1], out=first, **extra)
    _call(name, dim=3, seeds=[0, 1], out=second, **extra)
    assert first.read_bytes() == second.read_bytes()


def test_distance_metadata_header(tmp_path):
    out = tmp_path / "d.csv"
    _call("distance", dim=2, pair="orthogonal", out=out)
    metadata, rows = _read_csv(out)
    assert any(line.startswith("# version: ") for line in metadata)
    assert "# rng: numpy.random.PCG64" in metadata
    assert any(line.startswith("# config: ") for line in metadata)
    assert float(rows[0]["total"]) == pytest.approx(2.0, abs=1e-12)
    assert float(rows[0]["fidelity"]) == pytest.approx(0.0, abs=1e-12)
