"""Результаты вычислений: разложения, отчеты Сегё, матрицы Тёплица и сканирования."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from models.chain import DeltaPoint
from models.functions import BoundaryFunction, LaurentSeries
from models.space import ConstrainedSpace


@dataclass(frozen=True, eq=False)
class LogRhoDecomposition:
    """Разложение log ρ = γ ⊕ ζ ⊕ n."""
    gamma: LaurentSeries
    zeta: BoundaryFunction
    n: Tuple[float, ...]
    n_function: BoundaryFunction
    c_rho: float
    residual: float


@dataclass(frozen=True)
class ConvergencePoint:
    """Точка трассы сходимости."""
    truncation: int
    lhs: float
    gap: float


@dataclass(frozen=True)
class SzegoReport:
    """Обе стороны равенства Сегё и трасса сходимости левой части."""
    c_rho: float
    omega: DeltaPoint
    n: Tuple[float, ...]
    rhs: float
    lhs: Optional[float] = None
    degree: Optional[int] = None
    kernel_norm: Optional[float] = None
    trace: Tuple[ConvergencePoint, ...] = field(default_factory=tuple)

    @property
    def gap(self) -> Optional[float]:
        if self.lhs is None:
            return None
        return abs(self.lhs - self.rhs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_rho": self.c_rho,
            "omega": self.omega.to_json(),
            "n": list(self.n),
            "rhs": self.rhs,
            "lhs": self.lhs,
            "degree": self.degree,
            "gap": self.gap,
            "kernel_norm": self.kernel_norm,
            "trace": [
                {"M": point.truncation, "lhs": point.lhs, "gap": point.gap}
                for point in self.trace
            ],
        }


@dataclass(frozen=True)
class NeilConstants:
    """Константы C_ρ, λ и σ для алгебры Нейла."""
    c_rho: float
    lam: complex
    sigma: Tuple[complex, complex]


@dataclass(frozen=True, eq=False)
class ToeplitzMatrix:
    """
    Матрица оператора Тёплица в ортонормированном базисе расширенного пространства.

    Первые inner_dim базисных векторов расширенного пространства образуют базис
    исходного усечения M.
    """
    full: np.ndarray
    inner_dim: int
    symbol: BoundaryFunction
    space: ConstrainedSpace

    @property
    def block(self) -> np.ndarray:
        """Квадратный блок inner_dim × inner_dim."""
        return self.full[:self.inner_dim, :self.inner_dim]

    @property
    def section(self) -> np.ndarray:
        """Сечение: образы базиса усечения M в расширенном пространстве."""
        return self.full[:, :self.inner_dim]


@dataclass(frozen=True)
class DistanceEstimate:
    """Оценка расстояния от символа до алгебры."""
    value: float
    iterations: int
    stalled: bool
    lower_bound: float


@dataclass(frozen=True)
class ScanGrid:
    """Параметры сетки Σ×Δ и порог вердикта."""
    sigma_points: int = 16
    rings: int = 2
    per_ring: int = 5
    delta: float = 0.05
    workers: int = 1


class Verdict(str, Enum):
    """Вердикт критерия Видома."""
    CONSISTENT_INVERTIBLE = "consistent-invertible"
    CONSISTENT_NONINVERTIBLE = "consistent-noninvertible"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GridCell:
    """Ячейка сетки Σ×Δ."""
    alpha: Tuple[float, ...]
    delta: DeltaPoint
    sigma_min: float
    norm: float


@dataclass(frozen=True)
class WidomScan:
    """Результат сканирования операторов Тёплица по сетке Σ×Δ."""
    cells: Tuple[GridCell, ...]
    distance: DistanceEstimate
    verdict: Verdict
    margin: float
    delta: float

    @property
    def min_sigma(self) -> float:
        return min(cell.sigma_min for cell in self.cells)

    @property
    def max_norm(self) -> float:
        return max(cell.norm for cell in self.cells)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "margin": self.margin,
            "delta": self.delta,
            "min_sigma": self.min_sigma,
            "max_norm": self.max_norm,
            "distance": {
                "value": self.distance.value,
                "lower_bound": self.distance.lower_bound,
                "iterations": self.distance.iterations,
                "stalled": self.distance.stalled,
            },
            "cells": [
                {
                    "alpha": list(cell.alpha),
                    "delta": cell.delta.to_json(),
                    "sigma_min": cell.sigma_min,
                    "norm": cell.norm,
                }
                for cell in self.cells
            ],
        }


@dataclass(frozen=True)
class InvertibilityReport:
    """Проверка обратимости символа из алгебры."""
    min_modulus: float
    invertible: bool
    inverse_residual: Optional[float]
    sigma_trace: Tuple[Tuple[int, float], ...]
    degrades: Optional[bool]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "min_modulus": self.min_modulus,
            "invertible": self.invertible,
            "inverse_residual": self.inverse_residual,
            "sigma_trace": [{"M": m, "sigma_min": sigma} for m, sigma in self.sigma_trace],
            "degrades": self.degrades,
        }


@dataclass
class Report:
    """Отчет эксперимента."""
    schema: str
    experiment: Dict[str, Any]
    results: Dict[str, Any]
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        payload = {"schema": self.schema, "experiment": self.experiment, "results": self.results}
        if include_timings:
            payload["timings"] = self.timings
        return payload
