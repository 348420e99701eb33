"""Сервис цепочек ограничений и арифметики пространства параметров Δ."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from models.chain import (
    AdmissibilityReport,
    DeltaPoint,
    DerivationConstraint,
    GamelinChain,
    GammaVector,
    StageCheck,
    TwoPointConstraint,
)
from models.domain import DomainSpec
from models.errors import ChainAdmissibilityError, DeltaArithmeticError, DomainError, ShapeError
from models.functions import LaurentSeries
from models.space import Functional
from services.boundary_service import BoundaryService

logger = logging.getLogger(__name__)

# Допуск правила Лейбница
LEIBNIZ_TOLERANCE = 1e-9

# Степень полиномиального базиса и число случайных пар для проверки
ADMISSIBILITY_DEGREE = 8
ADMISSIBILITY_PAIRS = 4


class ConstraintService:
    """Сервис для работы с цепочками Гамелина и точками Δ."""

    def __init__(self, boundary_service: BoundaryService):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
        """
        self.boundary_service = boundary_service

    def delta_product(self, first: DeltaPoint, second: DeltaPoint, chain: GamelinChain) -> DeltaPoint:
        """
        Покоординатное произведение точек Δ.

        Для двухточечных ограничений (u,v)·(u',v') = (uu', vv'),
        для производных (u,v)·(u',v') = (uu', uv' + vu').
        """
        self._check_length(first, chain)
        self._check_length(second, chain)
        coordinates = []
        for index, (constraint, (u, v), (u2, v2)) in enumerate(
            zip(chain, first.coordinates, second.coordinates)
        ):
            if isinstance(constraint, TwoPointConstraint):
                result = (u * u2, v * v2)
            else:
                result = (u * u2, u * v2 + v * u2)
            if result == (0, 0):
                raise DeltaArithmeticError(f"Произведение 0·∞ в координате {index} не определено")
            coordinates.append(result)
        return DeltaPoint(tuple(coordinates))

    def delta_inverse(self, point: DeltaPoint, chain: GamelinChain) -> DeltaPoint:
        """Покоординатное обращение: 1/t для двухточечных, −t для производных."""
        self._check_length(point, chain)
        coordinates = []
        for constraint, (u, v) in zip(chain, point.coordinates):
            if isinstance(constraint, TwoPointConstraint):
                coordinates.append((v, u))
            else:
                coordinates.append((-u, v))
        return DeltaPoint(tuple(coordinates))

    def delta_gamma(self, chain: GamelinChain) -> DeltaPoint:
        """Единица D_Γ: 1 для двухточечных ограничений, ∞ для производных."""
        return DeltaPoint(tuple(
            (1, 1) if isinstance(constraint, TwoPointConstraint) else (1, 0)
            for constraint in chain
        ))

    def gamma_eval(self, f: LaurentSeries, chain: GamelinChain, domain: Optional[DomainSpec] = None) -> GammaVector:
        """Вектор f(Γ) в порядке цепочки."""
        entries = []
        for constraint in chain:
            entries.extend(self._stage_values(f, constraint, domain))
        return GammaVector(np.array(entries, dtype=complex))

    def constraint_residual(
        self,
        f: LaurentSeries,
        chain: GamelinChain,
        point: DeltaPoint,
        domain: Optional[DomainSpec] = None
    ) -> float:
        """
        Однородная невязка max_i |v_i·lhs_i − u_i·rhs_i| / (|u_i| + |v_i|).

        Returns:
            0 для пустой цепочки
        """
        self._check_length(point, chain)
        residual = 0.0
        for constraint, (u, v) in zip(chain, point.coordinates):
            lhs, rhs = self._stage_values(f, constraint, domain)
            residual = max(residual, abs(v * lhs - u * rhs) / (abs(u) + abs(v)))
        return residual

    def stage_functional(self, constraint, coordinate: Tuple[complex, complex]) -> Functional:
        """
        Функционал этапа: f ↦ lhs(f) − t·rhs(f), при t = ∞ только rhs(f).

        Args:
            constraint: Ограничение
            coordinate: Однородная пара (u, v)

        Returns:
            Функционал
        """
        u, v = coordinate
        if isinstance(constraint, TwoPointConstraint):
            lhs, rhs = Functional.point(constraint.a), Functional.point(constraint.b)
        else:
            lhs, rhs = Functional.point(constraint.c), Functional.derivative(constraint.c, constraint.order)
        if v == 0:
            return rhs
        return Functional.combination(lhs, rhs, u / v)

    def functional_row(self, functional: Functional, exponents: np.ndarray, scales: Optional[np.ndarray] = None) -> np.ndarray:
        """Строка функционала в координатах мономов z^k/s_k."""
        row = np.zeros(len(exponents), dtype=complex)
        for coef, z, order in functional.terms:
            row += coef * self.boundary_service.derivative_row(exponents, z, order)
        if scales is not None:
            row = row / scales
        return row

    def constraint_rows(
        self,
        chain: GamelinChain,
        point: DeltaPoint,
        exponents: np.ndarray,
        scales: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """Матрица d × n однородных функционалов v·lhs − u·rhs на мономах."""
        self._check_length(point, chain)
        rows = np.zeros((len(chain), len(exponents)), dtype=complex)
        for index, (constraint, (u, v)) in enumerate(zip(chain, point.coordinates)):
            if isinstance(constraint, TwoPointConstraint):
                lhs = self.boundary_service.derivative_row(exponents, constraint.a)
                rhs = self.boundary_service.derivative_row(exponents, constraint.b)
            else:
                lhs = self.boundary_service.derivative_row(exponents, constraint.c)
                rhs = self.boundary_service.derivative_row(exponents, constraint.c, constraint.order)
            rows[index] = v * lhs - u * rhs
        if scales is not None:
            rows = rows / scales
        return rows

    def validate_chain(self, chain: GamelinChain, domain: DomainSpec, seed: int = 0) -> AdmissibilityReport:
        """
        Проверяет, что каждый этап-производная является точечным дифференцированием на A_{i−1}.

        Для этапа i берутся случайные пары f, g из полиномиального базиса ядра
        предыдущих ограничений в точке D_Γ и проверяется правило Лейбница.

        Args:
            chain: Цепочка ограничений
            domain: Область
            seed: Зерно генератора случайных чисел

        Returns:
            Отчет по этапам
        """
        for point in chain.points():
            if not domain.contains(point):
                raise DomainError(f"Точка ограничения {point} не лежит строго внутри области")
        rng = np.random.default_rng(seed)
        identity = self.delta_gamma(chain)
        stages: List[StageCheck] = []
        for index, constraint in enumerate(chain):
            if isinstance(constraint, TwoPointConstraint):
                stages.append(StageCheck(index, constraint.kind, True, 0.0))
                continue
            defect = self._leibniz_defect(chain.prefix(index), identity, constraint, domain, rng)
            passed = defect <= LEIBNIZ_TOLERANCE
            if not passed:
                logger.info(f"Этап {index} цепочки не является точечным дифференцированием: дефект {defect:.3e}")
            stages.append(StageCheck(index, constraint.kind, passed, defect))
        return AdmissibilityReport(tuple(stages))

    def require_admissible(self, chain: GamelinChain, domain: DomainSpec, seed: int = 0) -> AdmissibilityReport:
        """Как validate_chain, но отклоняет недопустимую цепочку исключением."""
        report = self.validate_chain(chain, domain, seed)
        if not report.passed:
            stage = report.failed_stage
            raise ChainAdmissibilityError(
                f"Этап {stage} цепочки не является точечным дифференцированием на предыдущей алгебре",
                stage=stage
            )
        return report

    def _leibniz_defect(
        self,
        prefix: GamelinChain,
        identity: DeltaPoint,
        constraint: DerivationConstraint,
        domain: DomainSpec,
        rng: np.random.Generator
    ) -> float:
        degree = max(ADMISSIBILITY_DEGREE, 2 * constraint.order + 2)
        exponents = domain.with_truncation(degree).exponents
        prefix_point = DeltaPoint(identity.coordinates[:len(prefix)])
        rows = self.constraint_rows(prefix, prefix_point, exponents)
        basis = null_space(rows) if len(prefix) else np.eye(len(exponents))
        c, n = constraint.c, constraint.order
        worst = 0.0
        for _ in range(ADMISSIBILITY_PAIRS):
            f = self._random_member(basis, exponents, degree, rng)
            g = self._random_member(basis, exponents, degree, rng)
            evaluate = self.boundary_service.evaluate_analytic
            terms = (
                evaluate(f * g, c, n, domain),
                evaluate(f, c, 0, domain) * evaluate(g, c, n, domain),
                evaluate(g, c, 0, domain) * evaluate(f, c, n, domain),
            )
            scale = max(1.0, *(abs(term) for term in terms))
            worst = max(worst, abs(terms[0] - terms[1] - terms[2]) / scale)
        return worst

    def _random_member(self, basis: np.ndarray, exponents: np.ndarray, degree: int, rng: np.random.Generator) -> LaurentSeries:
        weights = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
        return LaurentSeries.from_exponents(exponents, basis @ weights, degree)

    def _stage_values(self, f: LaurentSeries, constraint, domain: Optional[DomainSpec]) -> Tuple[complex, complex]:
        evaluate = self.boundary_service.evaluate_analytic
        if isinstance(constraint, TwoPointConstraint):
            return evaluate(f, constraint.a, 0, domain), evaluate(f, constraint.b, 0, domain)
        return evaluate(f, constraint.c, 0, domain), evaluate(f, constraint.c, constraint.order, domain)

    def _check_length(self, point: DeltaPoint, chain: GamelinChain) -> None:
        if len(point) != len(chain):
            raise ShapeError(f"Точка Δ имеет {len(point)} координат, а цепочка - {len(chain)} ограничений")
