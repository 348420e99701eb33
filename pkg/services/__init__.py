"""Сервисы численных экспериментов."""
