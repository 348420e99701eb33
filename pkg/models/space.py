"""Типы ядер и усеченных пространств с ограничениями."""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from models.chain import DeltaPoint, GamelinChain
from models.domain import DomainSpec, WeightSpec


@dataclass(frozen=True)
class Functional:
    """
    Линейный функционал f ↦ Σ coef·f^{(order)}(point).

    terms хранит тройки (coef, point, order).
    """
    terms: Tuple[Tuple[complex, complex, int], ...]

    @classmethod
    def point(cls, z: complex) -> "Functional":
        return cls(((1.0, complex(z), 0),))

    @classmethod
    def derivative(cls, z: complex, order: int) -> "Functional":
        return cls(((1.0, complex(z), order),))

    @classmethod
    def combination(cls, first: "Functional", second: "Functional", t: complex) -> "Functional":
        """Функционал f ↦ first(f) − t·second(f)."""
        scaled = tuple((-t * coef, z, order) for coef, z, order in second.terms)
        return cls(first.terms + scaled)


@dataclass(frozen=True, eq=False)
class Representer:
    """Представитель функционала в нормированных мономиальных координатах."""
    coefficients: np.ndarray
    functional: Functional
    norm_squared: float


@dataclass(frozen=True, eq=False)
class KernelRep:
    """
    Воспроизводящее ядро усеченного пространства.

    Матрица ядра P = F Fᴴ в координатах нормированных мономов z^k/s_k,
    K(z, w) = v(z)ᵀ P conj(v(w)).
    """
    domain: DomainSpec
    weight: WeightSpec
    exponents: np.ndarray
    scales: np.ndarray
    gram: np.ndarray
    factor: np.ndarray
    representers: Tuple[Representer, ...] = field(default_factory=tuple)

    @property
    def matrix(self) -> np.ndarray:
        return self.factor @ self.factor.conj().T

    @property
    def rank(self) -> int:
        return len(self.exponents) - len(self.representers)


@dataclass(frozen=True, eq=False)
class ConstrainedSpace:
    """
    Усечение H²_{weight,D}: ортонормированный базис и ядро.

    Столбцы basis - координаты базисных функций в нормированных мономах.
    """
    domain: DomainSpec
    weight: WeightSpec
    chain: GamelinChain
    delta: DeltaPoint
    exponents: np.ndarray
    scales: np.ndarray
    gram: np.ndarray
    basis: np.ndarray
    kernel: KernelRep

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]
