"""Сервис операторов Тёплица и расстояния от символа до алгебры."""

import logging
from typing import Optional

import numpy as np
from scipy.linalg import lstsq, null_space, svdvals

from models.chain import GamelinChain
from models.domain import DomainSpec
from models.errors import PreconditionError, ShapeError
from models.functions import BoundaryFunction
from models.reports import DistanceEstimate, ToeplitzMatrix
from models.space import ConstrainedSpace
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService
from services.kernel_service import KernelService

logger = logging.getLogger(__name__)

# Ошибка приближения, которая считается нулевой
EXACT_TOLERANCE = 1e-14


class ToeplitzService:
    """Сервис для построения усеченных операторов Тёплица T^{α,D}_φ."""

    def __init__(
        self,
        boundary_service: BoundaryService,
        constraint_service: ConstraintService,
        kernel_service: KernelService,
        padding_factor: int = 2,
        lawson_max_iter: int = 500,
        lawson_tol: float = 1e-6
    ):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
            constraint_service: Сервис цепочек ограничений
            kernel_service: Сервис ядер
            padding_factor: Во сколько раз расширенное усечение больше исходного
            lawson_max_iter: Максимальное число итераций Лоусона
            lawson_tol: Относительная точность итераций Лоусона
        """
        self.boundary_service = boundary_service
        self.constraint_service = constraint_service
        self.kernel_service = kernel_service
        self.padding_factor = padding_factor
        self.lawson_max_iter = lawson_max_iter
        self.lawson_tol = lawson_tol

    def padded_space(self, space: ConstrainedSpace) -> ConstrainedSpace:
        """То же пространство с усечением padding_factor·M."""
        domain = space.domain.with_truncation(self.padding_factor * space.domain.truncation)
        return self.kernel_service.build_constrained_space(domain, space.weight, space.chain, space.delta)

    def toeplitz_matrix(
        self,
        phi: BoundaryFunction,
        space: ConstrainedSpace,
        padded: Optional[ConstrainedSpace] = None
    ) -> ToeplitzMatrix:
        """
        Матрица ⟨φ·e_j, e_i⟩ в ортонормированном базисе расширенного пространства.

        Args:
            phi: Ограниченный символ
            space: Пространство усечения M
            padded: Готовое расширенное пространство (строится, если не задано)

        Returns:
            Матрица оператора Тёплица
        """
        if phi.n_components != space.domain.n_components:
            raise ShapeError(
                f"Символ имеет {phi.n_components} компонент(ы), а область - {space.domain.n_components}"
            )
        padded = padded if padded is not None else self.padded_space(space)
        domain = padded.domain
        symbol = phi.samples(domain.n_nodes).ravel()
        if not np.all(np.isfinite(symbol)):
            raise PreconditionError("Символ должен быть ограничен во всех узлах сетки")
        values = self.kernel_service.boundary_matrix(domain, padded.exponents, padded.scales) @ padded.basis
        measure = self.kernel_service.boundary_measure(domain, padded.weight)
        full = (values.conj().T * (measure * symbol)) @ values
        return ToeplitzMatrix(full, space.dimension, phi, padded)

    def min_singular_value(self, matrix: ToeplitzMatrix) -> float:
        """
        Наименьшее сингулярное число высокого сечения full[:, :M].

        Сечение содержит образы базиса усечения M в расширенном пространстве,
        поэтому это мера левой обратимости. Для квадратного блока M×M
        служит block_min_singular_value.
        """
        return float(np.min(svdvals(matrix.section)))

    def operator_norm(self, matrix: ToeplitzMatrix) -> float:
        """Наибольшее сингулярное число того же сечения full[:, :M]."""
        return float(np.max(svdvals(matrix.section)))

    def block_min_singular_value(self, matrix: ToeplitzMatrix) -> float:
        """Наименьшее сингулярное число квадратного блока: мера двусторонней обратимости."""
        return float(np.min(svdvals(matrix.block)))

    def product_block(self, left: ToeplitzMatrix, right: ToeplitzMatrix) -> np.ndarray:
        """Ведущий блок произведения, вычисленного в расширенном пространстве."""
        if left.full.shape != right.full.shape:
            raise ShapeError("Матрицы построены в разных расширенных пространствах")
        n = right.inner_dim
        return (left.full @ right.full[:, :n])[:n]

    def distance_to_algebra(
        self,
        phi: BoundaryFunction,
        chain: GamelinChain,
        domain: DomainSpec,
        degree: int
    ) -> DistanceEstimate:
        """
        Дискретная оценка min_ψ max |φ − ψ| по ψ из усечения алгебры.

        Итерации Лоусона: взвешенный МНК и пересчет весов w ← w|e|/Σw|e|.
        Взвешенная L²-ошибка дает нижнюю оценку, максимум ошибки - верхнюю;
        итерации останавливаются при относительном разрыве lawson_tol.

        Args:
            phi: Символ
            chain: Проверенная цепочка ограничений
            domain: Область
            degree: Степень усечения алгебры

        Returns:
            Лучшая достигнутая sup-норма с флагом остановки без сходимости
        """
        truncated = domain.with_truncation(degree)
        exponents = truncated.exponents
        prescale = np.ones(len(exponents)) if truncated.is_disk else \
            np.where(exponents < 0, truncated.q ** exponents.astype(float), 1.0)
        rows = self.constraint_service.constraint_rows(
            chain, self.constraint_service.delta_gamma(chain), exponents, prescale
        )
        basis = null_space(rows) if len(chain) else np.eye(len(exponents))
        design = self.kernel_service.boundary_matrix(truncated, exponents, prescale) @ basis
        target = phi.samples(truncated.n_nodes).ravel()

        weights = np.full(len(target), 1.0 / len(target))
        best = np.inf
        lower = 0.0
        converged = False
        iterations = 0
        for iterations in range(1, self.lawson_max_iter + 1):
            root = np.sqrt(weights)
            coefficients = lstsq(design * root[:, np.newaxis], target * root)[0]
            errors = np.abs(target - design @ coefficients)
            worst = float(np.max(errors))
            best = min(best, worst)
            lower = max(lower, float(np.sqrt(np.sum(weights * errors ** 2))))
            if best <= EXACT_TOLERANCE or best - lower <= self.lawson_tol * best:
                converged = True
                break
            weights = weights * errors
            weights /= np.sum(weights)

        if not converged:
            logger.warning(
                f"Итерации Лоусона не сошлись за {self.lawson_max_iter} шагов: "
                f"верхняя оценка {best:.6f}, нижняя {lower:.6f}"
            )
        return DistanceEstimate(best, iterations, not converged, lower)
