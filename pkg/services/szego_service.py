"""Сервис теоремы Сегё: разложение log ρ, параметры (n, ω) и обе стороны равенства."""

import logging
import math
from dataclasses import replace
from typing import List, Sequence

import numpy as np
from scipy.linalg import LinAlgError, null_space, solve

from models.chain import DeltaPoint, GamelinChain, TwoPointConstraint
from models.domain import DomainSpec, WeightSpec
from models.errors import DomainError, TruncationError, UnsupportedDomainError
from models.functions import BoundaryFunction, LaurentSeries
from models.reports import ConvergencePoint, LogRhoDecomposition, NeilConstants, SzegoReport
from services.boundary_service import REAL_TOLERANCE, BoundaryService
from services.constraint_service import ConstraintService
from services.kernel_service import KernelService

logger = logging.getLogger(__name__)

# Допустимая невязка сборки γ ⊕ ζ ⊕ n
DECOMPOSITION_TOLERANCE = 1e-6

# Регуляризация вырожденных нормальных уравнений
RIDGE = 1e-12


def complete_bell(values: Sequence[complex], order: int) -> complex:
    """
    Полный полином Белла B_order(x_1, ..., x_order).

    Рекуррентность B_{m+1} = Σ_k C(m,k) B_{m−k} x_{k+1}; значение равно
    (e^γ)^{(order)}/e^γ при x_j = γ^{(j)}.
    """
    bell = [1.0 + 0j]
    for m in range(order):
        bell.append(sum(math.comb(m, k) * bell[m - k] * values[k] for k in range(m + 1)))
    return bell[order]


class SzegoService:
    """Сервис для вычисления обеих сторон теоремы Сегё для алгебр с ограничениями."""

    def __init__(
        self,
        boundary_service: BoundaryService,
        constraint_service: ConstraintService,
        kernel_service: KernelService
    ):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
            constraint_service: Сервис цепочек ограничений
            kernel_service: Сервис ядер
        """
        self.boundary_service = boundary_service
        self.constraint_service = constraint_service
        self.kernel_service = kernel_service

    def decompose_log_rho(self, rho: BoundaryFunction, domain: DomainSpec) -> LogRhoDecomposition:
        """
        Разложение log ρ = γ ⊕ ζ ⊕ n на аналитическую, коаналитическую части и N-компоненту.

        Круг: γ - неотрицательные моды, ζ - отрицательные, n = 0.
        Кольцо: проекция на N по нулевой моде, затем для каждой моды k ≠ 0
        система 2×2 для коэффициентов z^k и conj(z^{−k}).

        Args:
            rho: Положительная граничная функция
            domain: Область

        Returns:
            Разложение со степенью 2M
        """
        samples = self.boundary_service.coeffs_to_samples(rho, domain)
        scale = max(1.0, float(np.max(np.abs(samples))))
        if np.max(np.abs(samples.imag)) > REAL_TOLERANCE * scale or np.min(samples.real) <= 0:
            raise DomainError(f"ρ должна быть положительной во всех узлах: минимум {np.min(samples.real):.3e}")
        log_values = np.log(samples.real)
        full_degree = (domain.n_nodes - 1) // 2
        logs = self.boundary_service.samples_to_coeffs(log_values, domain, degree=full_degree).coefficients
        c_rho = float(np.real(self.boundary_service.pair_samples(log_values, domain)))

        if domain.is_disk:
            gamma = LaurentSeries.from_taylor(logs[0, full_degree:])
            zeta = logs.copy()
            zeta[:, full_degree:] = 0
            zeta_function = BoundaryFunction(zeta)
            n: tuple = ()
            n_function = BoundaryFunction.constant(0.0, 1, full_degree)
        else:
            gamma, zeta_function, n, n_function = self._decompose_annulus(logs, log_values, domain)

        assembled = (
            self.boundary_service.laurent_boundary(gamma, domain).samples(domain.n_nodes)
            + zeta_function.samples(domain.n_nodes)
            + n_function.samples(domain.n_nodes)
        )
        residual = float(np.max(np.abs(assembled - log_values)))
        upper = np.abs(np.arange(-full_degree, full_degree + 1)) > (3 * full_degree) // 4
        resolution = float(np.max(np.abs(logs[:, upper])))
        residual = max(residual, resolution)
        if residual > DECOMPOSITION_TOLERANCE:
            raise TruncationError(
                f"Невязка разложения log ρ {residual:.3e} превышает {DECOMPOSITION_TOLERANCE:.0e}; увеличьте M"
            )
        logger.debug(f"log ρ разложен: C_ρ={c_rho:.6f}, n={n}, невязка {residual:.2e}")
        return LogRhoDecomposition(gamma, zeta_function, n, n_function, c_rho, residual)

    def _decompose_annulus(self, logs: np.ndarray, log_values: np.ndarray, domain: DomainSpec):
        q, x0 = domain.q, domain.x0
        full_degree = (domain.n_nodes - 1) // 2
        lam_samples = self.boundary_service.n_basis_samples(domain)[0]
        lam = self.boundary_service.samples_to_coeffs(lam_samples, domain, degree=full_degree).coefficients
        center = full_degree
        s = float(np.real((logs[0, center] - logs[1, center]) / (lam[0, center] - lam[1, center])))
        rest = logs - s * lam

        k = np.arange(-full_degree, full_degree + 1)
        m = np.abs(k).astype(float)
        qm = q ** m
        denominator = 1.0 - q ** (2 * m)
        denominator[center] = 1.0
        outer, inner = rest[0], rest[1]
        a = np.where(
            k > 0,
            (outer - inner * qm) / denominator,
            (inner * qm - outer * qm * qm) / denominator
        )
        beta = np.where(
            k > 0,
            (inner * qm - outer * qm * qm) / denominator,
            (outer - inner * qm) / denominator
        )
        a[center] = 0
        beta[center] = 0
        zeta_constant = -np.sum(beta * x0 ** (-k.astype(float)))
        a[center] = (outer[center] + inner[center]) / 2 - zeta_constant
        gamma = LaurentSeries(a)

        zeta = np.array([beta, beta * q ** (-k.astype(float))])
        zeta[:, center] = zeta_constant
        n_function = self.boundary_service.samples_to_coeffs(s * lam_samples, domain, degree=full_degree)
        return gamma, BoundaryFunction(zeta), (s,), n_function

    def omega_from_gamma(self, gamma: LaurentSeries, chain: GamelinChain, domain: DomainSpec) -> DeltaPoint:
        """
        Единственная точка ω, для которой e^γ ∈ H²_{n,ω}.

        Двухточечное ограничение: t = e^{γ(a)−γ(b)}.
        Производная порядка n: t = e^{γ(c)}/(e^γ)^{(n)}(c) = 1/B_n(γ′(c), ..., γ^{(n)}(c)).
        """
        evaluate = self.boundary_service.evaluate_analytic
        coordinates = []
        for constraint in chain:
            if isinstance(constraint, TwoPointConstraint):
                difference = evaluate(gamma, constraint.a, 0, domain) - evaluate(gamma, constraint.b, 0, domain)
                coordinates.append((np.exp(difference), 1.0))
            else:
                derivatives = [evaluate(gamma, constraint.c, j, domain) for j in range(1, constraint.order + 1)]
                coordinates.append((1.0, complete_bell(derivatives, constraint.order)))
        return DeltaPoint(tuple(coordinates))

    def szego_rhs(self, rho: BoundaryFunction, chain: GamelinChain, domain: DomainSpec) -> SzegoReport:
        """
        Правая часть exp(C_ρ)/K^{n,ω}(x0, x0).

        Args:
            rho: Положительная граничная функция
            chain: Проверенная цепочка ограничений
            domain: Область

        Returns:
            Фрагмент отчета без левой части
        """
        decomposition = self.decompose_log_rho(rho, domain)
        omega = self.omega_from_gamma(decomposition.gamma, chain, domain)
        weight = WeightSpec.exp_n(decomposition.n)
        space = self.kernel_service.build_constrained_space(domain, weight, chain, omega)
        kernel_norm = self.kernel_service.kernel_norm_at_basepoint(space)
        rhs = float(np.exp(decomposition.c_rho) / kernel_norm)
        logger.info(f"Правая часть Сегё: {rhs:.10f} (C_ρ={decomposition.c_rho:.6f}, K={kernel_norm:.10f})")
        return SzegoReport(
            c_rho=decomposition.c_rho,
            omega=omega,
            n=decomposition.n,
            rhs=rhs,
            degree=domain.truncation,
            kernel_norm=kernel_norm
        )

    def szego_lhs_bruteforce(self, rho: BoundaryFunction, chain: GamelinChain, domain: DomainSpec, degree: int) -> float:
        """
        Левая часть inf ∫|1−p|²ρ dm по p из усечения A₀ степени degree.

        A₀ - ядро ограничений цепочки в D_Γ и вычисления в x0; минимум находится
        из взвешенных нормальных уравнений.
        """
        truncated = domain.with_truncation(degree)
        exponents = truncated.exponents
        prescale = np.ones(len(exponents)) if truncated.is_disk else \
            np.where(exponents < 0, truncated.q ** exponents.astype(float), 1.0)
        values = self.kernel_service.boundary_matrix(truncated, exponents, prescale)
        rows = self.constraint_service.constraint_rows(
            chain, self.constraint_service.delta_gamma(chain), exponents, prescale
        )
        evaluation = self.boundary_service.derivative_row(exponents, truncated.basepoint) / prescale
        basis = null_space(np.vstack([rows, evaluation]))

        rho_samples = self.boundary_service.coeffs_to_samples(rho, truncated)
        measure = (self.boundary_service.representing_density(truncated) * rho_samples.real).ravel()
        design = values @ basis
        normal = (design.conj().T * measure) @ design
        target = design.conj().T @ measure
        try:
            weights = solve(normal, target, assume_a="pos")
        except LinAlgError:
            logger.warning(f"Нормальные уравнения вырождены при M={degree}, добавляется регуляризация {RIDGE:.0e}")
            ridge = RIDGE * max(1.0, float(np.real(np.trace(normal))) / max(len(target), 1))
            weights = solve(normal + ridge * np.eye(len(target)), target, assume_a="pos")
        residual = 1.0 - design @ weights
        return float(np.sum(measure * np.abs(residual) ** 2))

    def neil_constants(self, rho: BoundaryFunction, domain: DomainSpec) -> NeilConstants:
        """
        Константы C_ρ, λ = e^{C_ρ}·ρ̂(1) и σ = (1, λ)/√(1+|λ|²) для алгебры Нейла.
        """
        if not domain.is_disk:
            raise UnsupportedDomainError("Константы алгебры Нейла определены только для круга")
        samples = self.boundary_service.coeffs_to_samples(rho, domain)
        if np.min(samples.real) <= 0:
            raise DomainError("ρ должна быть положительной во всех узлах")
        c_rho = float(np.real(self.boundary_service.pair_samples(np.log(samples.real), domain)))
        first_mode = self.boundary_service.samples_to_coeffs(samples, domain, degree=1).coefficient(1)
        lam = complex(np.exp(c_rho) * first_mode)
        norm = math.sqrt(1 + abs(lam) ** 2)
        return NeilConstants(c_rho, lam, (1 / norm, lam / norm))

    def theorem_lambda_rhs(self, rho: BoundaryFunction, domain: DomainSpec) -> float:
        """Правая часть через константу λ: e^{C_ρ}(1 + |λ|²) = e^{C_ρ}/|σ₁|²."""
        constants = self.neil_constants(rho, domain)
        return float(np.exp(constants.c_rho) * (1 + abs(constants.lam) ** 2))

    def verify(
        self,
        rho: BoundaryFunction,
        chain: GamelinChain,
        domain: DomainSpec,
        schedule: Sequence[int],
        seed: int = 0
    ) -> SzegoReport:
        """
        Сравнивает обе стороны по возрастающим усечениям.

        Правая часть считается при наибольшем M, левая - при каждом M расписания.
        """
        self.constraint_service.require_admissible(chain, domain, seed)
        schedule = sorted(schedule)
        report = self.szego_rhs(rho, chain, domain.with_truncation(schedule[-1]))
        trace: List[ConvergencePoint] = []
        for truncation in schedule:
            lhs = self.szego_lhs_bruteforce(rho, chain, domain, truncation)
            trace.append(ConvergencePoint(truncation, lhs, abs(lhs - report.rhs)))
            logger.info(f"Левая часть Сегё при M={truncation}: {lhs:.10f}, разрыв {abs(lhs - report.rhs):.3e}")
        return replace(report, lhs=trace[-1].lhs, degree=schedule[-1], trace=tuple(trace))
