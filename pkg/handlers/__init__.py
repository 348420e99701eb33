"""Подкоманды командной строки."""

from handlers.commands import exit_code_for, register_command_handlers


def setup_handlers(subparsers, experiment_service, run_repository=None):
    """
    Регистрирует все хендлеры в парсере командной строки.

    Args:
        subparsers: Результат ArgumentParser.add_subparsers
        experiment_service: Экземпляр ExperimentService
        run_repository: Экземпляр RunRepository (опционально)
    """
    register_command_handlers(subparsers, experiment_service, run_repository)


__all__ = ['setup_handlers', 'exit_code_for']
