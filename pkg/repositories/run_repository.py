"""Репозиторий для работы с историей запусков экспериментов."""

import json
from typing import Any, Dict, List, Optional

from repositories.database import Database


class RunRepository:
    """Репозиторий для хранения отчетов экспериментов в базе данных."""

    def __init__(self, database: Database):
        """
        Инициализация репозитория.

        Args:
            database: Экземпляр Database для работы с БД
        """
        self.db = database

    async def save_run(
        self,
        experiment: str,
        config_hash: str,
        seed: int,
        schema: str,
        report: Dict[str, Any],
        summary: Optional[str] = None,
        report_path: Optional[str] = None,
        timings: Optional[Dict[str, float]] = None
    ) -> int:
        """
        Сохраняет запуск эксперимента.

        Args:
            experiment: Вид эксперимента
            config_hash: SHA-256 канонической конфигурации
            seed: Зерно генератора
            schema: Версия схемы отчета
            report: Отчет без замеров времени
            summary: Краткий итог (вердикт или зазор)
            report_path: Путь к файлу отчета
            timings: Замеры времени по этапам

        Returns:
            ID записи
        """
        async with self.db.connection.cursor() as cursor:
            await cursor.execute("""
                INSERT INTO runs (experiment, config_hash, seed, schema, summary, report_path, report_json, timings_json)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                experiment,
                config_hash,
                seed,
                schema,
                summary,
                report_path,
                json.dumps(report, sort_keys=True),
                json.dumps(timings) if timings is not None else None
            ))
            await self.db.connection.commit()
            return cursor.lastrowid

    async def get_runs(self, limit: int = 20) -> List[Dict[str, Any]]:
        """
        Получает последние запуски без тел отчетов.

        Args:
            limit: Максимальное число записей

        Returns:
            Список записей от новых к старым
        """
        async with self.db.connection.cursor() as cursor:
            await cursor.execute("""
                SELECT id, experiment, config_hash, seed, summary, report_path, created_at
                FROM runs
                ORDER BY id DESC
                LIMIT ?
            """, (limit,))
            rows = await cursor.fetchall()
            return [dict(row) for row in rows]

    async def get_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        """
        Получает запуск вместе с отчетом.

        Args:
            run_id: ID записи

        Returns:
            Запись с разобранными полями report и timings или None
        """
        async with self.db.connection.cursor() as cursor:
            await cursor.execute("SELECT * FROM runs WHERE id = ?", (run_id,))
            row = await cursor.fetchone()

            if not row:
                return None

            run = dict(row)
            run["report"] = json.loads(run.pop("report_json"))
            timings = run.pop("timings_json")
            run["timings"] = json.loads(timings) if timings else None
            return run

    async def find_by_config(self, config_hash: str) -> List[int]:
        """ID запусков с той же канонической конфигурацией."""
        async with self.db.connection.cursor() as cursor:
            await cursor.execute(
                "SELECT id FROM runs WHERE config_hash = ? ORDER BY id ASC",
                (config_hash,)
            )
            rows = await cursor.fetchall()
            return [row["id"] for row in rows]
