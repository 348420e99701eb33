"""Представления граничных функций и рядов Лорана."""

from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy import fft

from models.errors import ShapeError


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """
    Усеченные коэффициенты Фурье на каждой граничной компоненте.

    coefficients имеет форму (компоненты, 2M+1); столбец k+M хранит c[k].
    """
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.atleast_2d(np.array(self.coefficients, dtype=complex))
        if coefficients.ndim != 2 or coefficients.shape[1] % 2 == 0:
            raise ShapeError(
                f"Ожидался массив коэффициентов формы (компоненты, 2M+1), получено {coefficients.shape}"
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_modes(cls, modes: Dict[int, complex], n_components: int, degree: int) -> "BoundaryFunction":
        """Функция с заданными модами, одинаковыми на всех компонентах."""
        coefficients = np.zeros((n_components, 2 * degree + 1), dtype=complex)
        for k, value in modes.items():
            if abs(k) > degree:
                raise ShapeError(f"Мода {k} превышает степень {degree}")
            coefficients[:, k + degree] = value
        return cls(coefficients)

    @classmethod
    def constant(cls, value: complex, n_components: int, degree: int) -> "BoundaryFunction":
        return cls.from_modes({0: value}, n_components, degree)

    @property
    def degree(self) -> int:
        return (self.coefficients.shape[1] - 1) // 2

    @property
    def n_components(self) -> int:
        return self.coefficients.shape[0]

    @property
    def real_valued(self) -> bool:
        mirrored = self.coefficients[:, ::-1].conj()
        return bool(np.allclose(mirrored, self.coefficients, rtol=0, atol=1e-12))

    def coefficient(self, k: int, component: int = 0) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coefficients[component, k + self.degree])

    def samples(self, n_nodes: int) -> np.ndarray:
        """
        Значения на равномерной сетке из n_nodes узлов на каждой компоненте.

        Моды сворачиваются по модулю n_nodes, поэтому результат точен на любой сетке.
        """
        folded = np.zeros((self.n_components, n_nodes), dtype=complex)
        index = np.arange(-self.degree, self.degree + 1) % n_nodes
        for component in range(self.n_components):
            np.add.at(folded[component], index, self.coefficients[component])
        return fft.ifft(folded, axis=1) * n_nodes

    def conj(self) -> "BoundaryFunction":
        """Комплексно сопряженная функция: c'[k] = conj(c[-k])."""
        return BoundaryFunction(self.coefficients[:, ::-1].conj())

    def truncate(self, degree: int) -> "BoundaryFunction":
        """Обрезает или дополняет нулями до степени degree."""
        coefficients = np.zeros((self.n_components, 2 * degree + 1), dtype=complex)
        keep = min(degree, self.degree)
        coefficients[:, degree - keep:degree + keep + 1] = \
            self.coefficients[:, self.degree - keep:self.degree + keep + 1]
        return BoundaryFunction(coefficients)

    def __add__(self, other: "BoundaryFunction") -> "BoundaryFunction":
        degree = max(self.degree, other.degree)
        return BoundaryFunction(self.truncate(degree).coefficients + other.truncate(degree).coefficients)

    def scale(self, factor: complex) -> "BoundaryFunction":
        return BoundaryFunction(self.coefficients * factor)


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """
    Ряд Лорана Σ a_k z^k с симметричным диапазоном k = -degree..degree.

    Для аналитических в круге функций все коэффициенты с k < 0 равны нулю.
    """
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex).ravel()
        if coefficients.size % 2 == 0:
            raise ShapeError(f"Длина массива коэффициентов ряда Лорана должна быть нечетной: {coefficients.size}")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_taylor(cls, taylor) -> "LaurentSeries":
        """Ряд по коэффициентам Тейлора a_0, a_1, ..."""
        taylor = np.asarray(taylor, dtype=complex).ravel()
        degree = max(taylor.size - 1, 0)
        coefficients = np.zeros(2 * degree + 1, dtype=complex)
        coefficients[degree:degree + taylor.size] = taylor
        return cls(coefficients)

    @classmethod
    def from_modes(cls, modes: Dict[int, complex], degree: int | None = None) -> "LaurentSeries":
        if degree is None:
            degree = max((abs(k) for k in modes), default=0)
        coefficients = np.zeros(2 * degree + 1, dtype=complex)
        for k, value in modes.items():
            coefficients[k + degree] = value
        return cls(coefficients)

    @classmethod
    def from_exponents(cls, exponents: np.ndarray, values: np.ndarray, degree: int) -> "LaurentSeries":
        """Ряд по значениям коэффициентов при заданных показателях."""
        coefficients = np.zeros(2 * degree + 1, dtype=complex)
        coefficients[np.asarray(exponents) + degree] = values
        return cls(coefficients)

    @property
    def degree(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def has_negative_powers(self) -> bool:
        return bool(np.any(self.coefficients[:self.degree] != 0))

    @property
    def exponents(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coefficients[k + self.degree])

    def taylor(self) -> np.ndarray:
        """Коэффициенты при неотрицательных степенях."""
        return np.array(self.coefficients[self.degree:])

    def truncate(self, degree: int) -> "LaurentSeries":
        coefficients = np.zeros(2 * degree + 1, dtype=complex)
        keep = min(degree, self.degree)
        coefficients[degree - keep:degree + keep + 1] = \
            self.coefficients[self.degree - keep:self.degree + keep + 1]
        return LaurentSeries(coefficients)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        degree = max(self.degree, other.degree)
        return LaurentSeries(self.truncate(degree).coefficients + other.truncate(degree).coefficients)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + other.scale(-1)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        # Свертка коэффициентов, степень результата равна сумме степеней
        return LaurentSeries(np.convolve(self.coefficients, other.coefficients))

    def scale(self, factor: complex) -> "LaurentSeries":
        return LaurentSeries(self.coefficients * factor)
