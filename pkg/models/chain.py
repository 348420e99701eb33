"""Цепочки ограничений Гамелина и точки пространства параметров Δ."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from models.errors import ConfigError, DomainError
from utils import complex_to_json, parse_complex


# Проективное равенство координат Δ
PROJECTIVE_TOLERANCE = 1e-12


class ConstraintKind(str, Enum):
    """Тип ограничения."""
    TWO_POINT = "two_point"
    DERIVATION = "derivation"


@dataclass(frozen=True)
class TwoPointConstraint:
    """Ограничение f(a) = t·f(b)."""
    a: complex
    b: complex

    def __post_init__(self):
        if self.a == self.b:
            raise DomainError(f"Двухточечное ограничение требует a ≠ b, получено a = b = {self.a}")

    @property
    def kind(self) -> ConstraintKind:
        return ConstraintKind.TWO_POINT

    @property
    def points(self) -> Tuple[complex, ...]:
        return (self.a, self.b)

    def to_record(self) -> Dict[str, Any]:
        return {"type": self.kind.value, "points": [complex_to_json(self.a), complex_to_json(self.b)]}


@dataclass(frozen=True)
class DerivationConstraint:
    """Ограничение f(c) = t·f^{(n)}(c); при t = ∞ это f^{(n)}(c) = 0."""
    c: complex
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise DomainError(f"Порядок производной должен быть ≥ 1, получено {self.order}")

    @property
    def kind(self) -> ConstraintKind:
        return ConstraintKind.DERIVATION

    @property
    def points(self) -> Tuple[complex, ...]:
        return (self.c,)

    def to_record(self) -> Dict[str, Any]:
        return {"type": self.kind.value, "point": complex_to_json(self.c), "order": self.order}


Constraint = Union[TwoPointConstraint, DerivationConstraint]


@dataclass(frozen=True)
class GamelinChain:
    """Упорядоченный список ограничений A = A_d ⊆ ... ⊆ A_0."""
    constraints: Tuple[Constraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, index):
        return self.constraints[index]

    @property
    def gamma_count(self) -> int:
        """Число значений в векторе f(Γ): по два на каждое ограничение."""
        return 2 * len(self.constraints)

    def points(self) -> List[complex]:
        return [point for constraint in self.constraints for point in constraint.points]

    def prefix(self, length: int) -> "GamelinChain":
        return GamelinChain(self.constraints[:length])

    def to_records(self) -> List[Dict[str, Any]]:
        return [constraint.to_record() for constraint in self.constraints]

    @classmethod
    def from_records(cls, records: Sequence[Dict[str, Any]]) -> "GamelinChain":
        """
        Собирает цепочку из списка записей.

        Args:
            records: Записи вида {"type": "two_point", "points": [a, b]}
                или {"type": "derivation", "point": c, "order": n}

        Returns:
            Цепочка ограничений
        """
        constraints: List[Constraint] = []
        for index, record in enumerate(records):
            kind = record.get("type")
            if kind == ConstraintKind.TWO_POINT.value:
                points = record.get("points")
                if not isinstance(points, (list, tuple)) or len(points) != 2:
                    raise ConfigError(f"Ограничение {index}: 'points' должен содержать две точки", path=f"chain.{index}.points")
                constraints.append(TwoPointConstraint(parse_complex(points[0]), parse_complex(points[1])))
            elif kind == ConstraintKind.DERIVATION.value:
                if "point" not in record or "order" not in record:
                    raise ConfigError(f"Ограничение {index}: нужны поля 'point' и 'order'", path=f"chain.{index}")
                constraints.append(DerivationConstraint(parse_complex(record["point"]), int(record["order"])))
            else:
                raise ConfigError(f"Ограничение {index}: неизвестный тип {kind!r}", path=f"chain.{index}.type")
        return cls(tuple(constraints))


@dataclass(frozen=True)
class DeltaPoint:
    """
    Точка Δ = ∏(ℂ ∪ {∞}), каждая координата хранится однородной парой (u, v), t = u/v.

    v = 0 соответствует t = ∞; пара (0, 0) недопустима.
    """
    coordinates: Tuple[Tuple[complex, complex], ...] = field(default_factory=tuple)

    def __post_init__(self):
        normalized = tuple((complex(u), complex(v)) for u, v in self.coordinates)
        for index, (u, v) in enumerate(normalized):
            if u == 0 and v == 0:
                raise DomainError(f"Координата {index} точки Δ равна (0, 0)")
        object.__setattr__(self, "coordinates", normalized)

    @classmethod
    def from_values(cls, values: Sequence[Union[complex, float, str, None]]) -> "DeltaPoint":
        """Точка по значениям t; бесконечность задается как inf, "inf" или None."""
        coordinates = []
        for value in values:
            if value is None:
                coordinates.append((1, 0))
                continue
            t = parse_complex(value)
            if np.isinf(t.real) or np.isinf(t.imag):
                coordinates.append((1, 0))
            else:
                coordinates.append((t, 1))
        return cls(tuple(coordinates))

    def __len__(self) -> int:
        return len(self.coordinates)

    def values(self) -> Tuple[complex, ...]:
        """Значения t; бесконечность возвращается как complex(inf)."""
        return tuple(complex(np.inf) if v == 0 else u / v for u, v in self.coordinates)

    def is_infinite(self, index: int) -> bool:
        return self.coordinates[index][1] == 0

    def projectively_equal(self, other: "DeltaPoint", tolerance: float = PROJECTIVE_TOLERANCE) -> bool:
        if len(self) != len(other):
            return False
        for (u, v), (u2, v2) in zip(self.coordinates, other.coordinates):
            scale = (abs(u) + abs(v)) * (abs(u2) + abs(v2))
            if abs(u * v2 - v * u2) > tolerance * scale:
                return False
        return True

    def to_json(self) -> List[Any]:
        return ["inf" if v == 0 else complex_to_json(u / v) for u, v in self.coordinates]


@dataclass(frozen=True, eq=False)
class GammaVector:
    """Вектор f(Γ): пары (f(a), f(b)) или (f(c), f^{(n)}(c)) в порядке цепочки."""
    entries: np.ndarray

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class StageCheck:
    """Результат проверки правила Лейбница на одном этапе цепочки."""
    index: int
    kind: ConstraintKind
    passed: bool
    defect: float


@dataclass(frozen=True)
class AdmissibilityReport:
    """Отчет о допустимости цепочки по этапам."""
    stages: Tuple[StageCheck, ...]

    @property
    def passed(self) -> bool:
        return all(stage.passed for stage in self.stages)

    @property
    def failed_stage(self) -> int | None:
        for stage in self.stages:
            if not stage.passed:
                return stage.index
        return None
