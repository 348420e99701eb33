"""Вспомогательные функции: разбор комплексных чисел и атомарная запись файлов."""

import os
import tempfile
from pathlib import Path
from typing import Any, List, Union

from models.errors import ConfigError

ComplexLike = Union[complex, float, int, str, List[float]]


def parse_complex(value: Any) -> complex:
    """
    Разбирает комплексное число из JSON-представления.

    Args:
        value: Число, пара [re, im], строка вида "1+2j" или "inf"

    Returns:
        Комплексное число
    """
    if isinstance(value, bool):
        raise ConfigError(f"Ожидалось число, получено {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"Комплексное число задается парой [re, im], получено {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        if text in ("inf", "∞", "Infinity"):
            return complex(float("inf"))
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            raise ConfigError(f"Не удалось разобрать комплексное число {value!r}")
    raise ConfigError(f"Неподдерживаемый тип значения {type(value).__name__}")


def complex_to_json(value: complex) -> Union[float, List[float]]:
    """Вещественное число остается числом, комплексное становится парой [re, im]."""
    value = complex(value)
    if value.imag == 0:
        return value.real
    return [value.real, value.imag]


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Записывает текст во временный файл рядом с целевым и переименовывает его.

    Args:
        path: Путь к файлу
        text: Содержимое в UTF-8

    Returns:
        Путь к записанному файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path
