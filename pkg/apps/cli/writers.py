"""
Запись результатов: CSV с заголовком метаданных и JSON.
Никаких временных меток: одинаковый запуск даёт побайтно одинаковые файлы.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def format_cell(value: Any) -> str:
    """17 значащих цифр для float, пустая строка для None"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def complex_matrix_to_json(m) -> list:
    """Комплексные элементы как пары [re, im]"""
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return complex_matrix_to_json(value)
        return value.tolist()
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _ensure_parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def write_csv(path: Path, metadata: Dict[str, Any], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    _ensure_parent(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for key, value in metadata.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(to_jsonable(value), sort_keys=True)
            else:
                value = format_cell(value)
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    logger.info(f"Wrote CSV table {path}")
    return path


def write_json(path: Path, document: Dict[str, Any]) -> Path:
    path = Path(path)
    _ensure_parent(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(to_jsonable(document), sort_keys=True, indent=2))
        fh.write("\n")
    logger.info(f"Wrote JSON document {path}")
    return path
