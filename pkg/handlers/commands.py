import argparse
import logging
from pathlib import Path

from models.errors import (
    ChainAdmissibilityError,
    ConfigError,
    DomainError,
    ExperimentError,
    NumericalGuardError,
)
from services.experiment_service import DELTA_OPERATIONS, dump_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def exit_code_for(error: BaseException) -> int:
    """Код выхода по исключению; ошибки этапов разворачиваются до причины."""
    if isinstance(error, ExperimentError):
        error = error.cause
    if isinstance(error, (ConfigError, ChainAdmissibilityError, DomainError)):
        return EXIT_CONFIG
    if isinstance(error, NumericalGuardError):
        return EXIT_NUMERICAL
    return EXIT_FAILURE


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Не удалось прочитать файл {path}: {e.strerror}", path=path)


def register_command_handlers(subparsers, experiment_service, run_repository=None):
    """Регистрирует все командные хендлеры"""

    async def run_experiment(args: argparse.Namespace, expected: str) -> int:
        config = experiment_service.parse_config(_read_text(args.config))
        if config.experiment != expected:
            raise ConfigError(
                f"Команда ожидает эксперимент {expected!r}, а конфигурация описывает {config.experiment!r}",
                path="experiment"
            )
        report = await experiment_service.run(config)
        results = report.results
        if expected == "szego":
            print(f"C_ρ = {results['c_rho']:.10f}")
            print(f"Правая часть: {results['rhs']:.10f}")
            print(f"Левая часть (M={results['degree']}): {results['lhs']:.10f}")
            print(f"Разрыв: {results['gap']:.3e}")
        elif expected == "widom":
            print(f"Вердикт: {results['verdict']}")
            print(f"min σ = {results['min_sigma']:.6f}, dist(φ, A) = {results['distance']['value']:.6f}")
            print(f"Запас: {results['margin']:.6f}")
        else:
            print(f"Ядро вычислено в {len(results['points'])} точках")
        return EXIT_OK

    async def cmd_szego_verify(args: argparse.Namespace) -> int:
        """Обработчик команды szego-verify"""
        return await run_experiment(args, "szego")

    async def cmd_widom_scan(args: argparse.Namespace) -> int:
        """Обработчик команды widom-scan"""
        return await run_experiment(args, "widom")

    async def cmd_kernel_dump(args: argparse.Namespace) -> int:
        """Обработчик команды kernel-dump"""
        return await run_experiment(args, "kernel")

    async def cmd_delta_calc(args: argparse.Namespace) -> int:
        """Обработчик команды delta-calc - арифметика точек Δ"""
        chain = experiment_service.load_chain(_read_text(args.chain))
        result = experiment_service.delta_calc(chain, args.op, args.points or [])
        print(dump_json({"op": args.op, "result": result.to_json()}), end="")
        return EXIT_OK

    async def cmd_history(args: argparse.Namespace) -> int:
        """Обработчик команды history - показывает последние запуски"""
        if run_repository is None:
            print("История запусков недоступна: база данных не подключена.")
            return EXIT_FAILURE

        runs = await run_repository.get_runs(args.limit)

        if not runs:
            print("История запусков пуста. Запустите szego-verify, widom-scan или kernel-dump.")
            return EXIT_OK

        for run in runs:
            print(
                f"#{run['id']} {run['created_at']} {run['experiment']} "
                f"seed={run['seed']} {run['summary'] or ''} {run['report_path'] or ''}".rstrip()
            )
        return EXIT_OK

    for name, handler, help_text in (
        ("szego-verify", cmd_szego_verify, "Проверить теорему Сегё для конфигурации"),
        ("widom-scan", cmd_widom_scan, "Сканировать операторы Тёплица по сетке Σ×Δ"),
        ("kernel-dump", cmd_kernel_dump, "Выгрузить таблицу ядра K(z_i, z_j)"),
    ):
        parser = subparsers.add_parser(name, help=help_text)
        parser.add_argument("-c", "--config", required=True, help="JSON-конфигурация эксперимента")
        parser.set_defaults(handler=handler)

    parser = subparsers.add_parser("delta-calc", help="Арифметика точек пространства Δ")
    parser.add_argument("--chain", required=True, help="JSON-файл с цепочкой ограничений")
    parser.add_argument("--op", required=True, choices=DELTA_OPERATIONS)
    parser.add_argument(
        "--points",
        nargs="*",
        help="Точки Δ: значения координат через запятую, бесконечность как inf"
    )
    parser.set_defaults(handler=cmd_delta_calc)

    parser = subparsers.add_parser("history", help="Показать последние запуски")
    parser.add_argument("--limit", type=int, default=20)
    parser.set_defaults(handler=cmd_history)
