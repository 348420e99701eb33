"""Типы данных: области, граничные функции, цепочки ограничений, пространства и отчеты."""
