"""Сервис граничных функций: квадратура, представляющая мера, веса и ряды."""

import logging
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import fft

from models.domain import DomainSpec, WeightKind, WeightSpec
from models.errors import (
    DomainError,
    EvaluationError,
    InvalidWeightError,
    ShapeError,
    TruncationError,
)
from models.functions import BoundaryFunction, LaurentSeries

logger = logging.getLogger(__name__)

# Допуск на относительную массу хвоста ряда
TAIL_TOLERANCE = 1e-8

# Допуск на мнимую часть вещественных граничных значений
REAL_TOLERANCE = 1e-10


@lru_cache(maxsize=64)
def _annulus_mode_weights(q: float, x0: float, kmax: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Веса гармонической меры точки x0 по модам s = |k| = 0..kmax.

    Для моды s ≥ 1 это решение системы 2×2 для r^s e^{ikθ} и r^{-s} e^{ikθ},
    согласованных с единицей на одной окружности и нулем на другой;
    для моды 0 используется пара {1, log r}.
    """
    s = np.arange(kmax + 1, dtype=float)
    w_out = np.empty(kmax + 1)
    w_in = np.empty(kmax + 1)
    ratio = np.log(x0) / np.log(q)
    w_out[0] = 1.0 - ratio
    w_in[0] = ratio
    s = s[1:]
    denominator = 1.0 - q ** (2 * s)
    w_out[1:] = (x0 ** s - (q * q / x0) ** s) / denominator
    w_in[1:] = ((q / x0) ** s - (q * x0) ** s) / denominator
    return w_out, w_in


class BoundaryService:
    """Сервис для работы с функциями на границе круга и кольца."""

    def samples_to_coeffs(
        self,
        values: np.ndarray,
        domain: DomainSpec,
        degree: Optional[int] = None
    ) -> BoundaryFunction:
        """
        Переводит значения в узлах сетки в усеченные коэффициенты Фурье.

        Args:
            values: Массив формы (компоненты, N) или (N,) для круга
            domain: Область
            degree: Степень усечения (по умолчанию M области)

        Returns:
            Граничная функция
        """
        values = np.asarray(values, dtype=complex)
        if values.ndim == 1:
            values = values[np.newaxis, :]
        expected = (domain.n_components, domain.n_nodes)
        if values.shape != expected:
            raise ShapeError(f"Ожидался массив значений формы {expected}, получено {values.shape}")
        degree = domain.truncation if degree is None else degree
        if 2 * degree + 1 > domain.n_nodes:
            raise ShapeError(f"Степень {degree} не разрешается сеткой из {domain.n_nodes} узлов")
        spectrum = fft.fft(values, axis=1) / domain.n_nodes
        modes = np.arange(-degree, degree + 1) % domain.n_nodes
        return BoundaryFunction(spectrum[:, modes])

    def coeffs_to_samples(self, f: BoundaryFunction, domain: DomainSpec) -> np.ndarray:
        """Значения граничной функции в узлах сетки области."""
        self._check_components(f, domain)
        return f.samples(domain.n_nodes)

    def representing_density(self, domain: DomainSpec) -> np.ndarray:
        """
        Веса узлов гармонической меры точки x0.

        Returns:
            Массив формы (компоненты, N) с неотрицательными весами, сумма равна 1
        """
        return _density(domain.kind.value, domain.q, domain.x0, domain.n_nodes).copy()

    def pair_with_m(self, f: BoundaryFunction, domain: DomainSpec) -> complex:
        """Вычисляет ∫f dm для гармонической меры базовой точки."""
        self._check_components(f, domain)
        if domain.is_disk:
            return f.coefficient(0)
        w_out, w_in = _annulus_mode_weights(domain.q, domain.x0, f.degree)
        weights = np.concatenate([w_out[:0:-1], w_out]), np.concatenate([w_in[:0:-1], w_in])
        return complex(np.dot(weights[0], f.coefficients[0]) + np.dot(weights[1], f.coefficients[1]))

    def pair_samples(self, values: np.ndarray, domain: DomainSpec) -> complex:
        """Квадратура ∫f dm по значениям в узлах."""
        values = np.asarray(values).reshape(domain.n_components, domain.n_nodes)
        return complex(np.sum(self.representing_density(domain) * values))

    def nu_basis(self, domain: DomainSpec) -> List[np.ndarray]:
        """
        Меры ν_i в виде весов узлов.

        Для кольца ν₁ = (m_out − m_in)/log(1/q), так что ∫log|z| dν₁ = 1.
        """
        if domain.is_disk:
            return []
        weight = 1.0 / (domain.n_nodes * np.log(1.0 / domain.q))
        nodes = np.ones(domain.n_nodes) * weight
        return [np.array([nodes, -nodes])]

    def n_basis_samples(self, domain: DomainSpec) -> List[np.ndarray]:
        """Плотности λ_i = dμ_i/dm в узлах, где μ₁ = m_out − m_in."""
        if domain.is_disk:
            return []
        density = self.representing_density(domain)
        uniform = 1.0 / domain.n_nodes
        return [np.array([uniform / density[0], -uniform / density[1]])]

    def resolve_weight(
        self,
        weight: Union[WeightSpec, BoundaryFunction],
        domain: DomainSpec
    ) -> np.ndarray:
        """
        Плотность веса в узлах сетки.

        Args:
            weight: Спецификация веса или произвольная положительная граничная функция
            domain: Область

        Returns:
            Массив формы (компоненты, N)
        """
        if isinstance(weight, BoundaryFunction):
            self._check_components(weight, domain)
            if not weight.real_valued:
                raise InvalidWeightError("Плотность веса должна быть вещественной")
            density = weight.samples(domain.n_nodes).real
        else:
            density = self._spec_density(weight, domain)
        if not np.all(np.isfinite(density)) or np.min(density) <= 0:
            raise InvalidWeightError(
                f"Плотность веса неположительна: минимум {np.min(density):.3e}"
            )
        return density

    def weighted_inner_product(
        self,
        f: BoundaryFunction,
        g: BoundaryFunction,
        weight: Union[WeightSpec, BoundaryFunction],
        domain: DomainSpec
    ) -> complex:
        """Вычисляет ∫ f ḡ ·w dm по квадратурной сетке."""
        self._check_components(f, domain)
        self._check_components(g, domain)
        measure = self.representing_density(domain) * self.resolve_weight(weight, domain)
        values = f.samples(domain.n_nodes) * np.conj(g.samples(domain.n_nodes))
        return complex(np.sum(values * measure))

    def boundary_log(self, f: BoundaryFunction, domain: DomainSpec) -> BoundaryFunction:
        """Поточечный логарифм положительной функции с повторным усечением до M."""
        self._check_components(f, domain)
        samples = f.samples(domain.n_nodes)
        scale = max(1.0, float(np.max(np.abs(samples))))
        if np.max(np.abs(samples.imag)) > REAL_TOLERANCE * scale or np.min(samples.real) <= 0:
            raise DomainError(
                f"Логарифм определен только для положительной функции: минимум {np.min(samples.real):.3e}"
            )
        return self.samples_to_coeffs(np.log(samples.real), domain)

    def boundary_exp(self, f: BoundaryFunction, domain: DomainSpec) -> BoundaryFunction:
        """Поточечная экспонента с повторным усечением до M."""
        self._check_components(f, domain)
        return self.samples_to_coeffs(np.exp(f.samples(domain.n_nodes)), domain)

    def derivative_row(self, exponents: np.ndarray, z: complex, order: int = 0) -> np.ndarray:
        """
        Строка функционала f ↦ f^{(order)}(z) для мономов z^k.

        Args:
            exponents: Показатели мономов
            z: Точка вычисления
            order: Порядок производной

        Returns:
            Вектор d^order/dz^order z^k в точке z
        """
        if order < 0:
            raise DomainError(f"Порядок производной должен быть ≥ 0, получено {order}")
        exponents = np.asarray(exponents)
        falling = np.ones(exponents.shape)
        for j in range(order):
            falling = falling * (exponents - j)
        powers = exponents - order
        active = falling != 0
        row = np.zeros(exponents.shape, dtype=complex)
        z = complex(z)
        if z == 0:
            if np.any(active & (powers < 0)):
                raise EvaluationError("Отрицательные степени не определены в точке 0")
            hit = active & (powers == 0)
            row[hit] = falling[hit]
            return row
        row[active] = falling[active] * np.power(z, powers[active])
        return row

    def evaluate_analytic(
        self,
        f: LaurentSeries,
        z: complex,
        order: int = 0,
        domain: Optional[DomainSpec] = None
    ) -> complex:
        """
        Вычисляет почленно продифференцированный ряд в точке z.

        Args:
            f: Ряд Лорана
            z: Внутренняя точка
            order: Порядок производной
            domain: Область, определяющая внутренний радиус сходимости

        Returns:
            f^{(order)}(z)
        """
        modulus = abs(z)
        if modulus >= 1:
            raise EvaluationError(f"Точка {z} лежит вне единичного круга")
        inner = domain.inner_radius if domain is not None else 0.0
        if f.has_negative_powers and modulus <= inner:
            raise EvaluationError(f"Точка {z} лежит вне кольца сходимости ряда Лорана")
        # нулевые коэффициенты отрицательных степеней не мешают вычислению в 0
        active = f.coefficients != 0
        if not np.any(active):
            return 0j
        row = self.derivative_row(f.exponents[active], z, order)
        return complex(np.dot(row, f.coefficients[active]))

    def laurent_boundary(self, f: LaurentSeries, domain: DomainSpec) -> BoundaryFunction:
        """Граничные значения ряда Лорана на каждой окружности."""
        k = f.exponents
        if domain.is_disk and f.has_negative_powers:
            raise DomainError("Ряд с отрицательными степенями не аналитичен в круге")
        return BoundaryFunction(np.array([f.coefficients * radius ** k for radius in domain.radii]))

    def reciprocal_series(self, psi: LaurentSeries, domain: DomainSpec, degree: int) -> LaurentSeries:
        """Ряд для 1/ψ степени degree с проверкой массы хвоста."""
        return self._series_from_circle(psi, np.reciprocal, domain, degree)

    def _series_from_circle(self, f: LaurentSeries, transform, domain: DomainSpec, degree: int) -> LaurentSeries:
        """Коэффициенты Лорана функции transform(f) по значениям на средней окружности."""
        radius = 1.0 if domain.is_disk else float(np.sqrt(domain.q))
        n_nodes = 8 * degree + 1
        k = f.exponents
        on_circle = BoundaryFunction(f.coefficients * radius ** k).samples(n_nodes)[0]
        if transform is np.reciprocal and np.min(np.abs(on_circle)) < 1e-14:
            raise EvaluationError("Функция обращается в нуль на окружности, обратный ряд не определен")
        values = transform(on_circle)
        spectrum = fft.fft(values) / n_nodes
        modes = np.arange(-2 * degree, 2 * degree + 1)
        scaled = spectrum[modes % n_nodes]
        head = scaled[degree:3 * degree + 1]
        tail = np.concatenate([scaled[:degree], scaled[3 * degree + 1:]])
        if domain.is_disk:
            negative = np.linalg.norm(scaled[:2 * degree])
            if negative > TAIL_TOLERANCE * np.linalg.norm(head):
                raise DomainError("Результат не аналитичен в круге (функция обращается в нуль внутри)")
            head = head.copy()
            head[:degree] = 0
            tail = scaled[3 * degree + 1:]
        self._check_tail(head, tail, "ряда Лорана")
        coefficients = head / radius ** np.arange(-degree, degree + 1)
        return LaurentSeries(coefficients)

    def _check_tail(self, head: np.ndarray, tail: np.ndarray, label: str) -> None:
        head_norm = np.linalg.norm(head)
        tail_norm = np.linalg.norm(tail)
        if tail_norm > TAIL_TOLERANCE * max(head_norm, np.finfo(float).tiny):
            raise TruncationError(
                f"Хвост {label} слишком велик: {tail_norm:.3e} при норме головы {head_norm:.3e}; увеличьте степень"
            )

    def _spec_density(self, weight: WeightSpec, domain: DomainSpec) -> np.ndarray:
        values = np.asarray(weight.values, dtype=float)
        if values.size not in (0, domain.sigma):
            raise DomainError(
                f"Вес задан {values.size} параметрами, а σ области равно {domain.sigma}"
            )
        density = np.ones((domain.n_components, domain.n_nodes))
        if values.size == 0 or domain.is_disk:
            return density
        if weight.kind == WeightKind.Z_POWER:
            density[1] = domain.q ** values[0]
            return density
        exponent = sum(value * basis for value, basis in zip(values, self.n_basis_samples(domain)))
        return np.exp(exponent)

    def _check_components(self, f: BoundaryFunction, domain: DomainSpec) -> None:
        if f.n_components != domain.n_components:
            raise ShapeError(
                f"Функция имеет {f.n_components} компонент(ы), а область - {domain.n_components}"
            )


@lru_cache(maxsize=64)
def _density(kind: str, q: float, x0: float, n_nodes: int) -> np.ndarray:
    if kind == "disk":
        return np.full((1, n_nodes), 1.0 / n_nodes)
    kmax = (n_nodes - 1) // 2
    w_out, w_in = _annulus_mode_weights(q, x0, kmax)
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    cosines = np.cos(np.outer(np.arange(1, kmax + 1), theta))
    density = np.array([
        (w[0] + 2 * w[1:] @ cosines) / n_nodes
        for w in (w_out, w_in)
    ])
    if np.min(density) < 0:
        raise TruncationError(
            f"Плотность гармонической меры отрицательна ({np.min(density):.3e}); увеличьте M"
        )
    return density
