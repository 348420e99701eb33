"""Хранилище истории запусков в SQLite."""

from typing import Optional

import aiosqlite

RUNS_SCHEMA = """
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        experiment TEXT NOT NULL,
        config_hash TEXT NOT NULL,
        seed INTEGER NOT NULL,
        schema TEXT NOT NULL,
        summary TEXT,
        report_path TEXT,
        report_json TEXT NOT NULL,
        timings_json TEXT,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    )
"""

# Повторные запуски одной конфигурации ищутся по хешу
RUNS_INDEX = "CREATE INDEX IF NOT EXISTS idx_runs_config_hash ON runs(config_hash, created_at)"


class Database:
    """
    Подключение к базе истории запусков.

    Можно использовать как асинхронный контекстный менеджер:
    подключение открывается на входе и закрывается на выходе.
    """

    def __init__(self, db_path: str = "runs.db"):
        """
        Args:
            db_path: Файл базы SQLite; ":memory:" для временной базы
        """
        self.db_path = db_path
        self._connection: Optional[aiosqlite.Connection] = None

    async def connect(self) -> None:
        """Открывает подключение и создает таблицу запусков, если ее нет."""
        self._connection = await aiosqlite.connect(self.db_path)
        self._connection.row_factory = aiosqlite.Row
        await self._connection.execute(RUNS_SCHEMA)
        await self._connection.execute(RUNS_INDEX)
        await self._connection.commit()

    async def close(self) -> None:
        if self._connection is not None:
            await self._connection.close()
            self._connection = None

    async def __aenter__(self) -> "Database":
        await self.connect()
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.close()

    @property
    def connection(self) -> aiosqlite.Connection:
        if self._connection is None:
            raise RuntimeError("Нет подключения к базе истории. Вызовите await database.connect()")
        return self._connection
