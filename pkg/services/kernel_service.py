"""Сервис воспроизводящих ядер и усеченных пространств с ограничениями."""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from models.chain import DeltaPoint, GamelinChain, TwoPointConstraint
from models.domain import DomainSpec, WeightSpec
from models.errors import (
    DegenerateConstraintError,
    IllConditionedError,
    ShapeError,
    UnsupportedDomainError,
)
from models.functions import LaurentSeries
from models.space import ConstrainedSpace, Functional, KernelRep, Representer
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService

logger = logging.getLogger(__name__)

# Порог обусловленности матрицы Грама
DEFAULT_CONDITION_LIMIT = 1e12

# Минимальная норма представителя ограничения
REPRESENTER_TOLERANCE = 1e-10

# Порог ведущего элемента при построении ядра ограничений
PIVOT_TOLERANCE = 1e-10


def nested_null_space(rows: np.ndarray, tolerance: float = PIVOT_TOLERANCE) -> np.ndarray:
    """
    Базис ядра матрицы ограничений, согласованный по степеням.

    Исключение Гаусса-Жордана с ведущими элементами в столбцах наименьшей степени;
    базисный вектор свободного столбца j содержит только этот столбец и ведущие
    столбцы левее, поэтому базис для усечения M является префиксом базиса для 2M.

    Args:
        rows: Матрица d × n
        tolerance: Относительный порог ведущего элемента

    Returns:
        Матрица n × (n − d)
    """
    d, n = rows.shape
    if d == 0:
        return np.eye(n, dtype=complex)
    reduced = np.array(rows, dtype=complex)
    reduced /= np.max(np.abs(reduced), axis=1, keepdims=True)
    pivots = []
    rank = 0
    for column in range(n):
        if rank == d:
            break
        candidate = rank + int(np.argmax(np.abs(reduced[rank:, column])))
        if abs(reduced[candidate, column]) <= tolerance:
            continue
        reduced[[rank, candidate]] = reduced[[candidate, rank]]
        reduced[rank] /= reduced[rank, column]
        for other in range(d):
            if other != rank:
                reduced[other] -= reduced[other, column] * reduced[rank]
        pivots.append(column)
        rank += 1
    if rank < d:
        raise DegenerateConstraintError(
            f"Ограничения линейно зависимы на усеченном пространстве: ранг {rank} из {d}"
        )
    free = [column for column in range(n) if column not in pivots]
    basis = np.zeros((n, len(free)), dtype=complex)
    for j, column in enumerate(free):
        basis[column, j] = 1.0
        for row, pivot in enumerate(pivots):
            basis[pivot, j] = -reduced[row, column]
    return basis


class KernelService:
    """Сервис для построения ядер Сегё, понижения ранга и ортонормированных базисов."""

    def __init__(
        self,
        boundary_service: BoundaryService,
        constraint_service: ConstraintService,
        condition_limit: float = DEFAULT_CONDITION_LIMIT
    ):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
            constraint_service: Сервис цепочек ограничений
            condition_limit: Допустимое число обусловленности матрицы Грама
        """
        self.boundary_service = boundary_service
        self.constraint_service = constraint_service
        self.condition_limit = condition_limit

    def boundary_matrix(self, domain: DomainSpec, exponents: np.ndarray, scales: np.ndarray) -> np.ndarray:
        """Значения мономов z^k/s_k во всех узлах границы, форма (компоненты·N, n)."""
        points = domain.boundary_points().ravel()
        return np.power(points[:, np.newaxis], exponents[np.newaxis, :]) / scales

    def boundary_measure(self, domain: DomainSpec, weight: WeightSpec) -> np.ndarray:
        """Веса узлов меры w·dm в том же порядке, что строки boundary_matrix."""
        density = self.boundary_service.representing_density(domain)
        return (density * self.boundary_service.resolve_weight(weight, domain)).ravel()

    def monomial_gram(self, domain: DomainSpec, weight: WeightSpec) -> Tuple[np.ndarray, np.ndarray]:
        """
        Матрица Грама нормированных мономов.

        Returns:
            (G, s): G с единичной диагональю и масштабы s_k = ‖z^k‖
        """
        exponents = domain.exponents
        if domain.is_disk and weight.is_trivial:
            size = len(exponents)
            return np.eye(size, dtype=complex), np.ones(size)
        prescale = np.where(exponents < 0, domain.q ** exponents.astype(float), 1.0) \
            if not domain.is_disk else np.ones(len(exponents))
        values = self.boundary_matrix(domain, exponents, prescale)
        measure = self.boundary_measure(domain, weight)
        gram = (values.conj().T * measure) @ values
        norms = np.sqrt(np.real(np.diag(gram)))
        gram = gram / np.outer(norms, norms)
        gram = (gram + gram.conj().T) / 2
        return gram, prescale * norms

    def szego_kernel(self, domain: DomainSpec, weight: WeightSpec) -> KernelRep:
        """
        Ядро пространства H² с весом без ограничений.

        Args:
            domain: Область
            weight: Вес

        Returns:
            Представление ядра K(z,w) = v(z)ᵀ G⁻¹ conj(v(w))
        """
        gram, scales = self.monomial_gram(domain, weight)
        condition = np.linalg.cond(gram)
        if condition > self.condition_limit:
            raise IllConditionedError(
                f"Число обусловленности матрицы Грама {condition:.3e} превышает {self.condition_limit:.1e}; "
                f"уменьшите усечение M={domain.truncation}"
            )
        lower = cholesky(gram, lower=True)
        factor = solve_triangular(lower, np.eye(len(scales), dtype=complex), lower=True).conj().T
        logger.debug(f"Ядро Сегё построено: {domain.kind.value}, M={domain.truncation}, cond={condition:.2e}")
        return KernelRep(domain, weight, domain.exponents, scales, gram, factor)

    def evaluation_matrix(self, kernel: KernelRep, points, order: int = 0) -> np.ndarray:
        """Строки v(z) для набора точек."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        return np.array([
            self.boundary_service.derivative_row(kernel.exponents, z, order) / kernel.scales
            for z in points
        ])

    def kernel_matrix(self, kernel: KernelRep, z_points, w_points) -> np.ndarray:
        """Матрица значений K(z_i, w_j)."""
        left = self.evaluation_matrix(kernel, z_points) @ kernel.factor
        right = self.evaluation_matrix(kernel, w_points) @ kernel.factor
        return left @ right.conj().T

    def kernel_value(self, kernel: KernelRep, z: complex, w: complex) -> complex:
        return complex(self.kernel_matrix(kernel, [z], [w])[0, 0])

    def functional_representer(self, kernel: KernelRep, functional: Functional) -> Representer:
        """
        Представитель функционала: ⟨f, r⟩ = ℓ(f) для всех f пространства.

        Args:
            kernel: Текущее ядро
            functional: Функционал

        Returns:
            Представитель с коэффициентами P·Lᴴ и квадратом нормы L·P·Lᴴ
        """
        row = self.constraint_service.functional_row(functional, kernel.exponents, kernel.scales)
        projected = kernel.factor.conj().T @ row.conj()
        coefficients = kernel.factor @ projected
        norm_squared = float(np.real(np.vdot(projected, projected)))
        return Representer(coefficients, functional, norm_squared)

    def downdate(self, kernel: KernelRep, representer: Representer) -> KernelRep:
        """
        Ядро ортогонального дополнения к представителю.

        Множитель обновляется как F ← F − (F u)uᴴ/‖u‖², где u = Fᴴ Lᴴ.
        """
        row = self.constraint_service.functional_row(representer.functional, kernel.exponents, kernel.scales)
        projected = kernel.factor.conj().T @ row.conj()
        norm = float(np.linalg.norm(projected))
        if norm <= REPRESENTER_TOLERANCE * max(1.0, float(np.linalg.norm(row))):
            raise DegenerateConstraintError(
                f"Норма представителя ограничения {norm:.3e} слишком мала: ограничение вырождено"
            )
        factor = kernel.factor - np.outer(kernel.factor @ projected, projected.conj()) / norm ** 2
        return KernelRep(
            kernel.domain,
            kernel.weight,
            kernel.exponents,
            kernel.scales,
            kernel.gram,
            factor,
            kernel.representers + (representer,)
        )

    def build_constrained_space(
        self,
        domain: DomainSpec,
        weight: WeightSpec,
        chain: GamelinChain,
        point: DeltaPoint
    ) -> ConstrainedSpace:
        """
        Строит усечение H²_{weight,D}.

        Ядро получается последовательным понижением ранга в порядке цепочки,
        ортонормированный базис - из ядра матрицы ограничений с ортогонализацией
        Грама-Шмидта через разложение Холецкого.

        Args:
            domain: Область
            weight: Вес
            chain: Цепочка ограничений
            point: Точка Δ

        Returns:
            Пространство с ограничениями
        """
        if len(point) != len(chain):
            raise ShapeError(f"Точка Δ имеет {len(point)} координат, а цепочка - {len(chain)} ограничений")
        kernel = self.szego_kernel(domain, weight)
        for constraint, coordinate in zip(chain, point.coordinates):
            functional = self.constraint_service.stage_functional(constraint, coordinate)
            kernel = self.downdate(kernel, self.functional_representer(kernel, functional))

        rows = self.constraint_service.constraint_rows(chain, point, kernel.exponents, kernel.scales)
        null = nested_null_space(rows)
        reduced_gram = null.conj().T @ kernel.gram @ null
        try:
            lower = cholesky((reduced_gram + reduced_gram.conj().T) / 2, lower=True)
        except LinAlgError as e:
            raise DegenerateConstraintError(f"Не удалось ортонормировать базис пространства: {e}")
        basis = solve_triangular(lower, null.conj().T, lower=True).conj().T
        logger.debug(
            f"Пространство построено: {domain.kind.value}, M={domain.truncation}, "
            f"d={len(chain)}, размерность {basis.shape[1]}"
        )
        return ConstrainedSpace(
            domain, weight, chain, point, kernel.exponents, kernel.scales, kernel.gram, basis, kernel
        )

    def kernel_norm_at_basepoint(self, space: ConstrainedSpace) -> float:
        """K(x0, x0) = ‖k_{x0}‖²."""
        x0 = space.domain.basepoint
        return float(np.real(self.kernel_value(space.kernel, x0, x0)))

    def basis_kernel_matrix(self, space: ConstrainedSpace, z_points, w_points) -> np.ndarray:
        """Ядро через ортонормированный базис: Σ e_j(z) conj(e_j(w))."""
        left = self.evaluation_matrix(space.kernel, z_points) @ space.basis
        right = self.evaluation_matrix(space.kernel, w_points) @ space.basis
        return left @ right.conj().T

    def coords_to_series(self, coords: np.ndarray, exponents: np.ndarray, scales: np.ndarray, degree: int) -> LaurentSeries:
        return LaurentSeries.from_exponents(exponents, coords / scales, degree)

    def basis_series(self, space: ConstrainedSpace, index: int) -> LaurentSeries:
        """Базисная функция с номером index как ряд Лорана."""
        return self.coords_to_series(space.basis[:, index], space.exponents, space.scales, space.domain.truncation)

    def blaschke_with_gamma_zeros(self, chain: GamelinChain, domain: DomainSpec) -> LaurentSeries:
        """
        Конечное произведение Бляшке с нулями во всех точках цепочки.

        Порядок нуля n+1 в точке производной порядка n, простые нули в точках
        двухточечных ограничений.
        """
        if not domain.is_disk:
            raise UnsupportedDomainError("Произведение Бляшке строится только для круга")
        orders: Dict[complex, int] = {}
        for constraint in chain:
            if isinstance(constraint, TwoPointConstraint):
                for point in constraint.points:
                    orders[point] = max(orders.get(point, 0), 1)
            else:
                orders[constraint.c] = max(orders.get(constraint.c, 0), constraint.order + 1)

        degree = domain.truncation
        product = LaurentSeries.from_taylor([1.0])
        for point, order in orders.items():
            factor = self._blaschke_factor(point, degree)
            for _ in range(order):
                product = (product * factor).truncate(degree)
        return product

    def _blaschke_factor(self, a: complex, degree: int) -> LaurentSeries:
        """Ряд Тейлора элементарного множителя (z − a)/(1 − āz)."""
        if a == 0:
            return LaurentSeries.from_modes({1: 1.0})
        k = np.arange(1, degree + 1)
        taylor = np.empty(degree + 1, dtype=complex)
        taylor[0] = -a
        taylor[1:] = np.conj(a) ** (k - 1) * (1 - abs(a) ** 2)
        return LaurentSeries.from_taylor(taylor)
