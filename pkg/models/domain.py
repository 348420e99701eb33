"""Геометрия области и описание весов."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from models.errors import DomainError


# Допустимый диапазон модуля кольца
MIN_ANNULUS_MODULUS = 0.05
MAX_ANNULUS_MODULUS = 0.95


class DomainKind(str, Enum):
    """Тип области."""
    DISK = "disk"
    ANNULUS = "annulus"


@dataclass(frozen=True)
class DomainSpec:
    """
    Круг или кольцо q < |z| < 1 с базовой точкой x0 и усечением M.

    Квадратурная сетка на каждой окружности содержит 4M+1 равномерных узлов,
    поэтому произведения функций степени до 2M вычисляются без наложения частот.
    """
    kind: DomainKind
    truncation: int
    q: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        if self.truncation < 1:
            raise DomainError(f"Усечение M должно быть положительным, получено {self.truncation}")
        if self.kind == DomainKind.DISK:
            if self.x0 != 0:
                raise DomainError("Для круга базовая точка x0 должна быть 0")
            return
        if not 0 < self.q < 1:
            raise DomainError(f"q outside (0,1): {self.q}")
        if not MIN_ANNULUS_MODULUS <= self.q <= MAX_ANNULUS_MODULUS:
            raise DomainError(
                f"Модуль кольца q={self.q} вне диапазона "
                f"[{MIN_ANNULUS_MODULUS}, {MAX_ANNULUS_MODULUS}]"
            )
        if not self.q < self.x0 < 1:
            raise DomainError(f"Базовая точка x0={self.x0} должна лежать на интервале (q, 1)")

    @classmethod
    def disk(cls, truncation: int) -> "DomainSpec":
        return cls(DomainKind.DISK, truncation)

    @classmethod
    def annulus(cls, q: float, truncation: int, x0: float | None = None) -> "DomainSpec":
        """Кольцо с модулем q; по умолчанию x0 = √q."""
        if x0 is None:
            x0 = math.sqrt(q)
        return cls(DomainKind.ANNULUS, truncation, float(q), float(x0))

    def with_truncation(self, truncation: int) -> "DomainSpec":
        """Та же область с другим усечением."""
        return DomainSpec(self.kind, truncation, self.q, self.x0)

    @property
    def is_disk(self) -> bool:
        return self.kind == DomainKind.DISK

    @property
    def Z(self) -> Tuple[str, ...]:
        """Фиксированные обратимые функции: для кольца z ↦ z."""
        return () if self.is_disk else ("z",)

    @property
    def sigma(self) -> int:
        return len(self.Z)

    @property
    def n_components(self) -> int:
        return 1 if self.is_disk else 2

    @property
    def n_nodes(self) -> int:
        return 4 * self.truncation + 1

    @property
    def radii(self) -> Tuple[float, ...]:
        """Радиусы граничных окружностей: внешняя первой."""
        return (1.0,) if self.is_disk else (1.0, self.q)

    @property
    def inner_radius(self) -> float:
        return 0.0 if self.is_disk else self.q

    @property
    def basepoint(self) -> complex:
        return complex(self.x0)

    @property
    def exponents(self) -> np.ndarray:
        """
        Показатели мономов базиса в порядке возрастания степени.

        Для круга 0..M, для кольца 0, 1, -1, 2, -2, ..., M, -M, так что базис
        усечения M является префиксом базиса любого большего усечения.
        """
        if self.is_disk:
            return np.arange(self.truncation + 1)
        order = [0]
        for k in range(1, self.truncation + 1):
            order.extend((k, -k))
        return np.array(order)

    def nodes(self) -> np.ndarray:
        """Углы квадратурной сетки θ_j = 2πj/N."""
        return 2 * np.pi * np.arange(self.n_nodes) / self.n_nodes

    def boundary_points(self) -> np.ndarray:
        """Точки сетки на каждой граничной окружности, форма (компоненты, N)."""
        circle = np.exp(1j * self.nodes())
        return np.array([r * circle for r in self.radii])

    def contains(self, z: complex) -> bool:
        """Лежит ли точка строго внутри области."""
        modulus = abs(z)
        return self.inner_radius < modulus < 1 if not self.is_disk else modulus < 1


class WeightKind(str, Enum):
    """Вариант веса."""
    EXP_N = "exp_n"
    Z_POWER = "z_power"


@dataclass(frozen=True)
class WeightSpec:
    """
    Вес скалярного произведения.

    EXP_N: плотность e^{Σ n_i λ_i} на N-базисе.
    Z_POWER: плотность ∏|Z_j|^{α_j}; для кольца 1 на внешней окружности и q^α на внутренней.
    """
    kind: WeightKind = WeightKind.Z_POWER
    values: Tuple[float, ...] = field(default_factory=tuple)

    @classmethod
    def unit(cls) -> "WeightSpec":
        return cls(WeightKind.Z_POWER, ())

    @classmethod
    def z_power(cls, alpha) -> "WeightSpec":
        return cls(WeightKind.Z_POWER, tuple(float(a) for a in np.atleast_1d(alpha)))

    @classmethod
    def exp_n(cls, n) -> "WeightSpec":
        return cls(WeightKind.EXP_N, tuple(float(a) for a in np.atleast_1d(n)))

    @property
    def is_trivial(self) -> bool:
        return all(value == 0 for value in self.values)
