"""Сервис сканирования операторов Тёплица по сетке Σ×Δ и критерия Видома."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from models.chain import DeltaPoint, GamelinChain
from models.domain import DomainSpec, WeightSpec
from models.errors import PreconditionError
from models.functions import BoundaryFunction, LaurentSeries
from models.reports import GridCell, InvertibilityReport, ScanGrid, Verdict, WidomScan
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService
from services.kernel_service import KernelService
from services.toeplitz_service import ToeplitzService

logger = logging.getLogger(__name__)

# Допуск унимодулярности символа
UNIMODULAR_TOLERANCE = 1e-8

# Символ из алгебры должен удовлетворять ограничениям в D_Γ с этой точностью
ALGEBRA_TOLERANCE = 1e-8

# Порог отделенности |ψ| от нуля
NONVANISHING_TOLERANCE = 1e-8

# Допуск на ‖T_{1/ψ}T_ψ − I‖
INVERSE_TOLERANCE = 1e-6

# Уровень, ниже которого σ_min считается вырождающимся
DEGENERATE_SIGMA = 0.05

# Сетка для оценки min |ψ| по замкнутой области
MODULUS_RADII = 24
MODULUS_ANGLES = 256

Cell = Tuple[Tuple[float, ...], DeltaPoint]


def sphere_net(rings: int = 2, per_ring: int = 5) -> List[complex]:
    """
    Сеть на сфере Римана: полюса 0 и ∞ и кольца по широте.

    Кольцо r лежит на кошироте πr/(rings+1), точки t = tan(θ/2)e^{iφ};
    соседние кольца сдвинуты на половину шага по долготе.
    """
    points: List[complex] = [0j, complex(np.inf)]
    step = 2 * np.pi / per_ring
    for ring in range(1, rings + 1):
        colatitude = np.pi * ring / (rings + 1)
        radius = np.tan(colatitude / 2)
        offset = (ring - 1) * step / 2
        for j in range(per_ring):
            points.append(complex(radius * np.exp(1j * (offset + j * step))))
    return points


def delta_net(chain: GamelinChain, rings: int = 2, per_ring: int = 5) -> List[DeltaPoint]:
    """Декартово произведение сетей по всем координатам Δ; для пустой цепочки одна точка."""
    net = sphere_net(rings, per_ring)
    return [DeltaPoint.from_values(values) for values in itertools.product(net, repeat=len(chain))]


def sigma_grid(domain: DomainSpec, points: int = 16) -> List[Tuple[float, ...]]:
    """Сетка по Σ = (ℝ/ℤ)^g: равномерная для кольца, одна точка для круга."""
    if domain.is_disk:
        return [()]
    return [(j / points,) for j in range(points)]


def chordal_distance(first: complex, second: complex) -> float:
    """Хордовое расстояние на сфере Римана."""
    first_inf = np.isinf(first.real) or np.isinf(first.imag)
    second_inf = np.isinf(second.real) or np.isinf(second.imag)
    if first_inf and second_inf:
        return 0.0
    if first_inf:
        return float(2 / np.sqrt(1 + abs(second) ** 2))
    if second_inf:
        return float(2 / np.sqrt(1 + abs(first) ** 2))
    return float(2 * abs(first - second) / np.sqrt((1 + abs(first) ** 2) * (1 + abs(second) ** 2)))


class WidomService:
    """Сервис для проверки критерия обратимости Видома на сетке параметров."""

    def __init__(
        self,
        boundary_service: BoundaryService,
        constraint_service: ConstraintService,
        kernel_service: KernelService,
        toeplitz_service: ToeplitzService,
        workers: int = 1
    ):
        """
        Инициализация сервиса.

        Args:
            boundary_service: Сервис граничных функций
            constraint_service: Сервис цепочек ограничений
            kernel_service: Сервис ядер
            toeplitz_service: Сервис операторов Тёплица
            workers: Число потоков по умолчанию для сканирования
        """
        self.boundary_service = boundary_service
        self.constraint_service = constraint_service
        self.kernel_service = kernel_service
        self.toeplitz_service = toeplitz_service
        self.workers = workers

    def grid_cells(self, chain: GamelinChain, domain: DomainSpec, grid: ScanGrid) -> List[Cell]:
        return [
            (alpha, point)
            for alpha in sigma_grid(domain, grid.sigma_points)
            for point in delta_net(chain, grid.rings, grid.per_ring)
        ]

    def scan_cells(
        self,
        phi: BoundaryFunction,
        chain: GamelinChain,
        domain: DomainSpec,
        cells: Sequence[Cell],
        workers: int | None = None
    ) -> List[GridCell]:
        """
        σ_min и норма T^{α,D}_φ в каждой ячейке.

        Ячейки независимы и считаются в пуле потоков; порядок результатов
        совпадает с порядком ячеек.
        """
        workers = workers or self.workers

        def compute(cell: Cell) -> GridCell:
            alpha, point = cell
            space = self.kernel_service.build_constrained_space(domain, WeightSpec.z_power(alpha), chain, point)
            matrix = self.toeplitz_service.toeplitz_matrix(phi, space)
            return GridCell(
                alpha,
                point,
                self.toeplitz_service.min_singular_value(matrix),
                self.toeplitz_service.operator_norm(matrix)
            )

        if workers <= 1:
            return [compute(cell) for cell in cells]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(compute, cells))

    def widom_scan(
        self,
        phi: BoundaryFunction,
        chain: GamelinChain,
        domain: DomainSpec,
        grid: ScanGrid | None = None
    ) -> WidomScan:
        """
        Сканирование унимодулярного символа по сетке Σ×Δ.

        Вердикт согласован, только если обе стороны критерия отделены от порога δ:
        min σ > δ и dist(φ, A) < 1 − δ, либо min σ < δ и dist(φ, A) ≥ 1 − δ.

        Args:
            phi: Унимодулярный символ
            chain: Проверенная цепочка ограничений
            domain: Область
            grid: Параметры сетки

        Returns:
            Результат сканирования с вердиктом и запасом
        """
        grid = grid or ScanGrid(workers=self.workers)
        deviation = float(np.max(np.abs(np.abs(phi.samples(domain.n_nodes)) - 1)))
        if deviation >= UNIMODULAR_TOLERANCE:
            raise PreconditionError(f"Символ не унимодулярен: sup||φ| − 1| = {deviation:.3e}")

        cells = self.grid_cells(chain, domain, grid)
        logger.info(f"Сканирование {len(cells)} ячеек сетки Σ×Δ в {grid.workers} поток(ах)")
        results = self.scan_cells(phi, chain, domain, cells, grid.workers)
        distance = self.toeplitz_service.distance_to_algebra(phi, chain, domain, domain.truncation)

        min_sigma = min(cell.sigma_min for cell in results)
        threshold = grid.delta
        if min_sigma > threshold and distance.value < 1 - threshold:
            verdict = Verdict.CONSISTENT_INVERTIBLE
        elif min_sigma < threshold and distance.value >= 1 - threshold:
            verdict = Verdict.CONSISTENT_NONINVERTIBLE
        else:
            verdict = Verdict.INDETERMINATE
        margin = min(abs(min_sigma - threshold), abs((1 - threshold) - distance.value))
        logger.info(
            f"Вердикт {verdict.value}: min σ = {min_sigma:.6f}, dist = {distance.value:.6f}, запас {margin:.6f}"
        )
        return WidomScan(tuple(results), distance, verdict, margin, threshold)

    def symbol_invertibility_check(
        self,
        psi: LaurentSeries,
        chain: GamelinChain,
        domain: DomainSpec,
        seed: int = 0,
        samples: int = 4
    ) -> InvertibilityReport:
        """
        Проверяет обратимость T_ψ для ψ из алгебры.

        Если |ψ| отделен от нуля на замкнутой области, строится 1/ψ и проверяется
        T_{1/ψ}T_ψ = I на нескольких случайных ячейках сетки. Иначе отслеживается
        σ_min квадратного блока при росте усечения.

        Args:
            psi: Символ из алгебры
            chain: Цепочка ограничений
            domain: Область
            seed: Зерно выбора ячеек
            samples: Число проверяемых ячеек

        Returns:
            Отчет об обратимости
        """
        identity = self.constraint_service.delta_gamma(chain)
        residual = self.constraint_service.constraint_residual(psi, chain, identity, domain)
        if residual >= ALGEBRA_TOLERANCE:
            raise PreconditionError(f"Символ не лежит в алгебре: невязка в D_Γ {residual:.3e}")

        min_modulus = self._min_modulus(psi, domain)
        cells = self._sample_cells(chain, domain, seed, samples)
        symbol = self.boundary_service.laurent_boundary(psi, domain)

        if min_modulus > NONVANISHING_TOLERANCE:
            inverse = self.boundary_service.reciprocal_series(psi, domain, 4 * domain.truncation)
            inverse_symbol = self.boundary_service.laurent_boundary(inverse, domain)
            worst = 0.0
            for alpha, point in cells:
                space = self.kernel_service.build_constrained_space(domain, WeightSpec.z_power(alpha), chain, point)
                padded = self.toeplitz_service.padded_space(space)
                forward = self.toeplitz_service.toeplitz_matrix(symbol, space, padded)
                backward = self.toeplitz_service.toeplitz_matrix(inverse_symbol, space, padded)
                product = self.toeplitz_service.product_block(backward, forward)
                worst = max(worst, float(np.max(np.abs(product - np.eye(space.dimension)))))
            return InvertibilityReport(min_modulus, worst < INVERSE_TOLERANCE, worst, (), None)

        truncations = sorted({max(domain.truncation // 2, 1), domain.truncation, 2 * domain.truncation})
        worst_trace: Tuple[Tuple[int, float], ...] = ()
        for alpha, point in cells:
            trace = []
            for truncation in truncations:
                space = self.kernel_service.build_constrained_space(
                    domain.with_truncation(truncation), WeightSpec.z_power(alpha), chain, point
                )
                matrix = self.toeplitz_service.toeplitz_matrix(symbol, space)
                trace.append((truncation, self.toeplitz_service.block_min_singular_value(matrix)))
            if not worst_trace or trace[-1][1] < worst_trace[-1][1]:
                worst_trace = tuple(trace)
        first, last = worst_trace[0][1], worst_trace[-1][1]
        degrades = last <= first + 1e-12 and last < DEGENERATE_SIGMA
        return InvertibilityReport(min_modulus, False, None, worst_trace, degrades)

    def _min_modulus(self, psi: LaurentSeries, domain: DomainSpec) -> float:
        """min |ψ| по сетке радиусов и углов в замкнутой области."""
        active = psi.coefficients != 0
        k = psi.exponents[active]
        angles = max(MODULUS_ANGLES, 2 * psi.degree + 1)
        radii = np.linspace(domain.inner_radius, 1.0, MODULUS_RADII)
        if psi.has_negative_powers:
            radii = radii[radii > 0]
        values = []
        for radius in radii:
            # только ненулевые коэффициенты: 0^k при k < 0 не определено
            scaled = np.zeros_like(psi.coefficients)
            scaled[active] = psi.coefficients[active] * radius ** k
            values.append(np.min(np.abs(BoundaryFunction(scaled).samples(angles))))
        return float(min(values))

    def _sample_cells(self, chain: GamelinChain, domain: DomainSpec, seed: int, count: int) -> List[Cell]:
        rng = np.random.default_rng(seed)
        cells = self.grid_cells(chain, domain, ScanGrid(sigma_points=4))
        chosen = rng.choice(len(cells), size=min(count, len(cells)), replace=False)
        return [cells[index] for index in sorted(chosen)]
