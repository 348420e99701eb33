"""Модуль для управления конфигурацией приложения."""

import os
from dotenv import load_dotenv

from models.errors import ConfigError


class Config:
    """Класс для управления конфигурацией приложения из переменных окружения."""

    def __init__(self):
        """Инициализация конфигурации - загружает переменные окружения."""
        # Загружаем переменные окружения из .env файла
        load_dotenv()

        # Загружаем конфигурацию
        self._load_config()

        # Валидируем значения
        self._validate_config()

    def _load_config(self) -> None:
        """Загружает все переменные окружения."""
        self.db_path: str = os.getenv("DB_PATH", "runs.db")
        self.log_level: str = os.getenv("LOG_LEVEL", "INFO").upper()
        self.output_dir: str = os.getenv("OUTPUT_DIR", "out")

        # Численные параметры
        self.default_seed: int = self._read_int("DEFAULT_SEED", "0")
        self.scan_workers: int = self._read_int("SCAN_WORKERS", "1")
        self.condition_limit: float = self._read_float("CONDITION_LIMIT", "1e12")
        self.lawson_max_iter: int = self._read_int("LAWSON_MAX_ITER", "500")
        self.lawson_tol: float = self._read_float("LAWSON_TOL", "1e-6")
        self.padding_factor: int = self._read_int("PADDING_FACTOR", "2")

    def _validate_config(self) -> None:
        """Валидирует значения переменных окружения."""
        if self.scan_workers < 1:
            raise ConfigError("SCAN_WORKERS должен быть не меньше 1", path="SCAN_WORKERS")

        if self.padding_factor < 2:
            raise ConfigError(
                "PADDING_FACTOR должен быть не меньше 2, иначе произведения операторов теряют точность",
                path="PADDING_FACTOR"
            )

        if self.condition_limit <= 1:
            raise ConfigError("CONDITION_LIMIT должен быть больше 1", path="CONDITION_LIMIT")

        if not 0 < self.lawson_tol < 1:
            raise ConfigError("LAWSON_TOL должен лежать в (0, 1)", path="LAWSON_TOL")

        if self.lawson_max_iter < 1:
            raise ConfigError("LAWSON_MAX_ITER должен быть не меньше 1", path="LAWSON_MAX_ITER")

    @staticmethod
    def _read_int(name: str, default: str) -> int:
        raw = os.getenv(name, default)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{name} должен быть целым числом, получено {raw!r}", path=name)

    @staticmethod
    def _read_float(name: str, default: str) -> float:
        raw = os.getenv(name, default)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{name} должен быть числом, получено {raw!r}", path=name)
