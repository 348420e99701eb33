"""Сервис декларативных экспериментов: разбор конфигураций, запуск и отчеты."""

import asyncio
import csv
import hashlib
import io
import json
import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence

import numpy as np
from pydantic import ValidationError
from scipy import fft

from models.chain import DeltaPoint, DerivationConstraint, GamelinChain
from models.domain import DomainSpec, WeightSpec
from models.errors import ConfigError, ExperimentError, ReportKindError
from models.experiment import SCHEMA_VERSION, ExperimentConfig, FunctionBlock
from models.functions import BoundaryFunction
from models.reports import Report, ScanGrid
from repositories.run_repository import RunRepository
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService
from services.kernel_service import KernelService
from services.szego_service import SzegoService
from services.widom_service import WidomService
from utils import atomic_write_text, complex_to_json, parse_complex

logger = logging.getLogger(__name__)

PLOT_KINDS = ("convergence", "sigma-grid")
DELTA_OPERATIONS = ("product", "inverse", "gamma")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return complex_to_json(value)
    raise TypeError(f"Значение типа {type(value).__name__} не сериализуется в JSON")


def dump_json(payload: Dict[str, Any]) -> str:
    """Каноническое представление: отсортированные ключи, фиксированные отступы."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, default=_json_default) + "\n"


def _write_rows(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _format_coordinates(values: Sequence[Any]) -> str:
    parts = []
    for value in values:
        if isinstance(value, list):
            parts.append(f"{value[0]}{value[1]:+}j")
        else:
            parts.append(str(value))
    return ";".join(parts)


class ExperimentService:
    """Сервис для запуска экспериментов Сегё, Видома и выгрузки ядер."""

    def __init__(
        self,
        boundary_service: BoundaryService,
        constraint_service: ConstraintService,
        kernel_service: KernelService,
        szego_service: SzegoService,
        widom_service: WidomService,
        run_repository: Optional[RunRepository] = None,
        output_dir: str = "out",
        default_seed: int = 0,
        scan_workers: int = 1
    ):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
            constraint_service: Сервис цепочек ограничений
            kernel_service: Сервис ядер
            szego_service: Сервис теоремы Сегё
            widom_service: Сервис критерия Видома
            run_repository: Репозиторий истории запусков (опционально)
            output_dir: Каталог отчетов по умолчанию
            default_seed: Зерно для конфигураций без seed
            scan_workers: Число потоков сканирования по умолчанию
        """
        self.boundary_service = boundary_service
        self.constraint_service = constraint_service
        self.kernel_service = kernel_service
        self.szego_service = szego_service
        self.widom_service = widom_service
        self.run_repository = run_repository
        self.output_dir = output_dir
        self.default_seed = default_seed
        self.scan_workers = scan_workers

    def parse_config(self, text: str) -> ExperimentConfig:
        """
        Разбирает и проверяет JSON-конфигурацию эксперимента.

        Args:
            text: Текст конфигурации

        Returns:
            Проверенная конфигурация со всеми значениями по умолчанию

        Raises:
            ConfigError: Синтаксическая ошибка (со строкой и столбцом) или нарушение схемы (с путем поля)
        """
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"Некорректный JSON в строке {e.lineno}, столбце {e.colno}: {e.msg}",
                line=e.lineno,
                column=e.colno
            )
        if isinstance(raw, dict) and "seed" not in raw:
            raw["seed"] = self.default_seed
        try:
            return ExperimentConfig.model_validate(raw)
        except ValidationError as e:
            errors = e.errors()
            details = "; ".join(
                f"{'.'.join(str(part) for part in error['loc']) or '<корень>'}: {error['msg']}"
                for error in errors
            )
            path = ".".join(str(part) for part in errors[0]["loc"]) if errors else None
            raise ConfigError(f"Конфигурация не прошла проверку: {details}", path=path)

    def config_hash(self, config: ExperimentConfig) -> str:
        """SHA-256 канонической конфигурации."""
        canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def domain_from_config(self, config: ExperimentConfig, truncation: Optional[int] = None) -> DomainSpec:
        truncation = truncation or config.truncation
        if config.domain.kind == "disk":
            return DomainSpec.disk(truncation)
        return DomainSpec.annulus(config.domain.q, truncation, config.domain.x0)

    def function_from_block(self, block: FunctionBlock, domain: DomainSpec) -> BoundaryFunction:
        """
        Граничная функция по блоку данных.

        Отсчеты в n равномерных узлах переводятся в моды степени (n−1)//2;
        при exponentiate данные задают логарифм, экспонента берется на сетке области.
        """
        rows = block.coefficients if block.coefficients is not None else block.samples
        values = np.array([[parse_complex(value) for value in row] for row in rows], dtype=complex)
        if values.shape[0] != domain.n_components:
            raise ConfigError(
                f"Функция задана на {values.shape[0]} компонент(ах), а граница области имеет "
                f"{domain.n_components}",
                path="coefficients" if block.coefficients is not None else "samples"
            )
        if block.coefficients is not None:
            function = BoundaryFunction(values)
        else:
            count = values.shape[1]
            degree = (count - 1) // 2
            spectrum = fft.fft(values, axis=1) / count
            function = BoundaryFunction(spectrum[:, np.arange(-degree, degree + 1) % count])
        if block.exponentiate:
            function = self.boundary_service.boundary_exp(function, domain)
        return function

    def load_chain(self, text: str) -> GamelinChain:
        """Цепочка из JSON: список записей или объект с полем chain."""
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Некорректный JSON цепочки: {e.msg}", line=e.lineno, column=e.colno)
        if isinstance(raw, dict):
            raw = raw.get("chain", [])
        if not isinstance(raw, list):
            raise ConfigError("Цепочка должна быть списком записей", path="chain")
        return GamelinChain.from_records(raw)

    def delta_calc(self, chain: GamelinChain, operation: str, points: Sequence[str]) -> DeltaPoint:
        """
        Арифметика точек Δ для цепочки.

        Args:
            chain: Цепочка ограничений
            operation: product, inverse или gamma
            points: Точки как строки значений через запятую ("0.5,inf")

        Returns:
            Результирующая точка
        """
        parsed = [
            DeltaPoint.from_values([value for value in point.split(",") if value.strip()])
            for point in points
        ]
        expected = {"product": 2, "inverse": 1, "gamma": 0}
        if operation not in expected:
            raise ConfigError(f"Неизвестная операция {operation!r}", path="op")
        if len(parsed) != expected[operation]:
            raise ConfigError(
                f"Операция {operation} требует {expected[operation]} точек, получено {len(parsed)}",
                path="points"
            )
        if operation == "product":
            return self.constraint_service.delta_product(parsed[0], parsed[1], chain)
        if operation == "inverse":
            return self.constraint_service.delta_inverse(parsed[0], chain)
        return self.constraint_service.delta_gamma(chain)

    async def run(self, config: ExperimentConfig) -> Report:
        """
        Выполняет эксперимент и пишет отчеты.

        Ошибки этапов оборачиваются в ExperimentError с именем этапа.

        Args:
            config: Проверенная конфигурация

        Returns:
            Отчет с замерами времени
        """
        timings: Dict[str, float] = {}
        stage = "prepare"
        try:
            with self._timer(timings, stage):
                domain = self.domain_from_config(config)
                chain = config.gamelin_chain()

            stage = "validate"
            with self._timer(timings, stage):
                await asyncio.to_thread(self.constraint_service.require_admissible, chain, domain, config.seed)

            stage = "compute"
            with self._timer(timings, stage):
                results = await asyncio.to_thread(self._compute, config, domain, chain)

            report = Report(SCHEMA_VERSION, config.model_dump(mode="json"), results, timings)

            stage = "write"
            with self._timer(timings, stage):
                report_path = self._write_outputs(report, config)

            stage = "save"
            if self.run_repository is not None:
                run_id = await self.run_repository.save_run(
                    experiment=config.experiment,
                    config_hash=self.config_hash(config),
                    seed=config.seed,
                    schema=SCHEMA_VERSION,
                    report=report.to_dict(),
                    summary=self._summary(report),
                    report_path=str(report_path) if report_path else None,
                    timings=timings
                )
                logger.info(f"Запуск сохранен в истории с ID {run_id}")
        except ExperimentError:
            raise
        except Exception as e:
            logger.error(f"Эксперимент {config.experiment} остановлен на этапе '{stage}': {e}")
            raise ExperimentError(stage, e) from e
        return report

    def emit_plot_data(self, report: Report, kind: str, path: Optional[str] = None) -> str:
        """
        CSV для построения графиков.

        Args:
            report: Отчет эксперимента
            kind: convergence (M, gap) или sigma-grid (alpha, delta, sigma_min)
            path: Путь для записи (опционально)

        Returns:
            Текст CSV
        """
        if kind not in PLOT_KINDS:
            raise ReportKindError(f"Неизвестный вид данных {kind!r}, ожидался один из {PLOT_KINDS}")
        if kind == "convergence":
            if "trace" not in report.results:
                raise ReportKindError("Трасса сходимости есть только в отчете szego")
            text = _write_rows(("M", "gap"), [(point["M"], point["gap"]) for point in report.results["trace"]])
        else:
            if "cells" not in report.results:
                raise ReportKindError("Сетка σ_min есть только в отчете widom")
            text = _write_rows(("alpha", "delta", "sigma_min"), [
                (_format_coordinates(cell["alpha"]), _format_coordinates(cell["delta"]), cell["sigma_min"])
                for cell in report.results["cells"]
            ])
        if path is not None:
            atomic_write_text(path, text)
        return text

    def _compute(self, config: ExperimentConfig, domain: DomainSpec, chain: GamelinChain) -> Dict[str, Any]:
        if config.experiment == "szego":
            rho = self.function_from_block(config.rho, domain)
            report = self.szego_service.verify(rho, chain, domain, config.domain.schedule, config.seed)
            results = report.to_dict()
            if domain.is_disk and self._is_neil(chain):
                results["lambda_rhs"] = self.szego_service.theorem_lambda_rhs(rho, domain)
            return results

        if config.experiment == "widom":
            phi = self.function_from_block(config.phi, domain)
            grid = ScanGrid(
                sigma_points=config.scan.sigma_points,
                rings=config.scan.rings,
                per_ring=config.scan.per_ring,
                delta=config.scan.delta,
                workers=config.scan.workers or self.scan_workers
            )
            return self.widom_service.widom_scan(phi, chain, domain, grid).to_dict()

        point = DeltaPoint.from_values(config.delta_point) if config.delta_point is not None \
            else self.constraint_service.delta_gamma(chain)
        points = [parse_complex(value) for value in config.points]
        space = self.kernel_service.build_constrained_space(domain, WeightSpec.unit(), chain, point)
        matrix = self.kernel_service.kernel_matrix(space.kernel, points, points)
        return {
            "delta": point.to_json(),
            "points": [complex_to_json(z) for z in points],
            "kernel": [[complex_to_json(value) for value in row] for row in matrix],
        }

    def _write_outputs(self, report: Report, config: ExperimentConfig) -> Optional[Path]:
        directory = Path(config.output.directory or self.output_dir)
        report_path = None
        if "json" in config.output.formats:
            report_path = directory / f"{config.output.prefix}.json"
            atomic_write_text(report_path, dump_json(report.to_dict(config.output.include_timings)))
            logger.info(f"Отчет записан в {report_path}")
        if "csv" in config.output.formats:
            table_path = directory / f"{config.output.prefix}.csv"
            atomic_write_text(table_path, self._table(report, config.experiment))
            logger.info(f"Таблица записана в {table_path}")
        return report_path

    def _table(self, report: Report, experiment: str) -> str:
        results = report.results
        if experiment == "szego":
            return _write_rows(("M", "lhs", "gap"), [
                (point["M"], point["lhs"], point["gap"]) for point in results["trace"]
            ])
        if experiment == "widom":
            return _write_rows(("alpha", "delta", "sigma_min", "norm"), [
                (_format_coordinates(cell["alpha"]), _format_coordinates(cell["delta"]),
                 cell["sigma_min"], cell["norm"])
                for cell in results["cells"]
            ])
        rows = []
        for i, row in enumerate(results["kernel"]):
            for j, value in enumerate(row):
                value = parse_complex(value)
                rows.append((i, j, value.real, value.imag))
        return _write_rows(("i", "j", "re", "im"), rows)

    def _summary(self, report: Report) -> str:
        results = report.results
        if "verdict" in results:
            return results["verdict"]
        if "gap" in results and results["gap"] is not None:
            return f"gap={results['gap']:.3e}"
        return f"kernel {len(results.get('points', []))}×{len(results.get('points', []))}"

    @staticmethod
    def _is_neil(chain: GamelinChain) -> bool:
        return (
            len(chain) == 1
            and isinstance(chain[0], DerivationConstraint)
            and chain[0].c == 0
            and chain[0].order == 1
        )

    @contextmanager
    def _timer(self, timings: Dict[str, float], stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            timings[stage] = time.perf_counter() - start
