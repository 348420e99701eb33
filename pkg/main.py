import argparse
import asyncio
import logging
import sys

from config import Config
from handlers import exit_code_for, setup_handlers
from models.errors import ConfigError
from repositories.database import Database
from repositories.run_repository import RunRepository
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService
from services.experiment_service import ExperimentService
from services.kernel_service import KernelService
from services.szego_service import SzegoService
from services.toeplitz_service import ToeplitzService
from services.widom_service import WidomService

logger = logging.getLogger(__name__)


def build_parser(experiment_service, run_repository=None) -> argparse.ArgumentParser:
    """Парсер командной строки со всеми подкомандами."""
    parser = argparse.ArgumentParser(
        prog="constrained-hardy",
        description="Численная проверка теорем Сегё и Видома для пространств Харди с ограничениями"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    setup_handlers(subparsers, experiment_service, run_repository)
    return parser


async def main(argv=None) -> int:
    """Главная функция CLI"""
    try:
        config = Config()
    except ConfigError as e:
        logging.basicConfig(level=logging.INFO)
        logger.error(f"Ошибка конфигурации окружения: {e}")
        return exit_code_for(e)

    # Настройка логирования
    logging.basicConfig(
        level=config.log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # Инициализируем базу данных и репозиторий
    database = Database(db_path=config.db_path)
    run_repository = RunRepository(database)

    # Инициализируем сервисы
    boundary_service = BoundaryService()
    constraint_service = ConstraintService(boundary_service)
    kernel_service = KernelService(boundary_service, constraint_service, config.condition_limit)
    szego_service = SzegoService(boundary_service, constraint_service, kernel_service)
    toeplitz_service = ToeplitzService(
        boundary_service,
        constraint_service,
        kernel_service,
        padding_factor=config.padding_factor,
        lawson_max_iter=config.lawson_max_iter,
        lawson_tol=config.lawson_tol
    )
    widom_service = WidomService(
        boundary_service, constraint_service, kernel_service, toeplitz_service, config.scan_workers
    )
    experiment_service = ExperimentService(
        boundary_service,
        constraint_service,
        kernel_service,
        szego_service,
        widom_service,
        run_repository=run_repository,
        output_dir=config.output_dir,
        default_seed=config.default_seed,
        scan_workers=config.scan_workers
    )

    args = build_parser(experiment_service, run_repository).parse_args(argv)

    async with database:
        try:
            return await args.handler(args)
        except Exception as e:
            logger.error(f"Команда {args.command} завершилась с ошибкой: {e}")
            return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
