"""Репозитории для работы с базой данных."""

from repositories.database import Database
from repositories.run_repository import RunRepository

__all__ = ['Database', 'RunRepository']
