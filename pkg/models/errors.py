"""Исключения библиотеки constrained-hardy."""

from typing import Optional


class HardyError(Exception):
    """Базовое исключение для всех ошибок библиотеки."""


class ShapeError(HardyError, ValueError):
    """Размер входного массива не совпадает с ожидаемым."""


class DomainError(HardyError, ValueError):
    """Параметры или значения вне допустимой области."""


class InvalidWeightError(HardyError, ValueError):
    """Плотность веса неположительна в одном из узлов квадратуры."""


class EvaluationError(HardyError, ValueError):
    """Точка вычисления лежит вне области сходимости ряда."""


class UnsupportedDomainError(HardyError, ValueError):
    """Операция не поддерживается для данного типа области."""


class PreconditionError(HardyError, ValueError):
    """Нарушено предусловие операции."""


class ReportKindError(HardyError, ValueError):
    """Тип отчета не совпадает с запрошенным видом данных."""


class ChainAdmissibilityError(HardyError, ValueError):
    """Цепочка ограничений не проходит проверку допустимости."""

    def __init__(self, message: str, stage: int):
        super().__init__(message)
        self.stage = stage


class ConfigError(HardyError, ValueError):
    """Ошибка конфигурации эксперимента."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        path: Optional[str] = None
    ):
        super().__init__(message)
        self.line = line
        self.column = column
        self.path = path


class NumericalGuardError(HardyError, ArithmeticError):
    """Базовое исключение для аварийных остановок численных проверок."""


class IllConditionedError(NumericalGuardError):
    """Матрица Грама слишком плохо обусловлена для выбранного усечения."""


class DegenerateConstraintError(NumericalGuardError):
    """Представитель ограничения вырожден (почти нулевая норма)."""


class TruncationError(NumericalGuardError):
    """Усечение ряда или разложения недостаточно точно."""


class DeltaArithmeticError(NumericalGuardError):
    """Неопределенное проективное произведение 0·∞."""


class ExperimentError(HardyError):
    """Ошибка на одном из этапов эксперимента."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"Этап '{stage}' завершился с ошибкой: {cause}")
        self.stage = stage
        self.cause = cause
