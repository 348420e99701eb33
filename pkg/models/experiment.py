"""Схемы конфигурации экспериментов (pydantic)."""

import math
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.chain import GamelinChain
from utils import parse_complex

# Число: вещественное, пара [re, im] или строка "1+2j" / "inf"
ComplexValue = Union[float, List[float], str]

SCHEMA_VERSION = "constrained-hardy/report-v1"


def _check_complex(values: List[Any]) -> List[Any]:
    for value in values:
        parse_complex(value)
    return values


class DomainBlock(BaseModel):
    """Область и расписание усечений."""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["disk", "annulus"] = "disk"
    q: Optional[float] = None
    x0: Optional[float] = None
    schedule: List[int] = Field(default_factory=lambda: [16, 32, 64])

    @model_validator(mode="after")
    def check_domain(self) -> "DomainBlock":
        if self.kind == "annulus":
            if self.q is None:
                raise ValueError("для кольца нужно задать q")
            if not 0 < self.q < 1:
                raise ValueError("q outside (0,1)")
            if self.x0 is None:
                self.x0 = math.sqrt(self.q)
        elif self.q is not None or self.x0 is not None:
            raise ValueError("для круга q и x0 не задаются")
        if not self.schedule:
            raise ValueError("расписание усечений не может быть пустым")
        if self.schedule[0] < 1:
            raise ValueError("усечения должны быть положительными")
        if any(later <= earlier for earlier, later in zip(self.schedule, self.schedule[1:])):
            raise ValueError("расписание усечений должно строго возрастать")
        return self


class FunctionBlock(BaseModel):
    """
    Функция на границе, заданная данными.

    coefficients: по строке на компоненту, моды −K..K;
    samples: по строке на компоненту, значения в равномерных узлах.
    При exponentiate=true данные описывают логарифм функции.
    """
    model_config = ConfigDict(extra="forbid")

    coefficients: Optional[List[List[ComplexValue]]] = None
    samples: Optional[List[List[ComplexValue]]] = None
    exponentiate: bool = False

    @model_validator(mode="after")
    def check_exclusive(self) -> "FunctionBlock":
        rows = self.coefficients if self.coefficients is not None else self.samples
        if (self.coefficients is None) == (self.samples is None):
            raise ValueError("нужно задать ровно одно из полей coefficients и samples")
        if not rows or any(not row for row in rows):
            raise ValueError("данные функции не могут быть пустыми")
        if len({len(row) for row in rows}) != 1:
            raise ValueError("строки всех компонент должны иметь одинаковую длину")
        if self.coefficients is not None and len(rows[0]) % 2 == 0:
            raise ValueError("число коэффициентов должно быть нечетным (моды −K..K)")
        for row in rows:
            _check_complex(row)
        return self


class ScanBlock(BaseModel):
    """Сетка Σ×Δ и порог вердикта."""
    model_config = ConfigDict(extra="forbid")

    sigma_points: int = Field(16, ge=1)
    rings: int = Field(2, ge=0)
    per_ring: int = Field(5, ge=1)
    delta: float = Field(0.05, gt=0, lt=0.5)
    workers: Optional[int] = Field(None, ge=1)


class OutputBlock(BaseModel):
    """Куда и в каком виде писать отчеты."""
    model_config = ConfigDict(extra="forbid")

    directory: Optional[str] = None
    prefix: str = "report"
    formats: List[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])
    include_timings: bool = False


class ExperimentConfig(BaseModel):
    """Полное описание одного эксперимента."""
    model_config = ConfigDict(extra="forbid")

    experiment: Literal["szego", "widom", "kernel"]
    seed: int = 0
    domain: DomainBlock = Field(default_factory=DomainBlock)
    rho: Optional[FunctionBlock] = None
    phi: Optional[FunctionBlock] = None
    chain: List[Dict[str, Any]] = Field(default_factory=list)
    delta_point: Optional[List[ComplexValue]] = None
    points: Optional[List[ComplexValue]] = None
    scan: ScanBlock = Field(default_factory=ScanBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    @field_validator("delta_point", "points")
    @classmethod
    def check_values(cls, values: Optional[List[Any]]) -> Optional[List[Any]]:
        return None if values is None else _check_complex(values)

    @model_validator(mode="after")
    def check_blocks(self) -> "ExperimentConfig":
        if self.rho is not None and self.phi is not None:
            raise ValueError("exclusivity: задается ровно одно из rho и phi")
        if self.experiment == "szego" and self.rho is None:
            raise ValueError("эксперимент szego требует блок rho")
        if self.experiment == "widom" and self.phi is None:
            raise ValueError("эксперимент widom требует блок phi")
        if self.experiment == "kernel":
            if self.rho is not None or self.phi is not None:
                raise ValueError("эксперимент kernel не использует rho и phi")
            if not self.points:
                raise ValueError("эксперимент kernel требует непустой список points")
        chain = self.gamelin_chain()
        if self.delta_point is not None and len(self.delta_point) != len(chain):
            raise ValueError(
                f"delta_point имеет {len(self.delta_point)} координат, а цепочка - {len(chain)} ограничений"
            )
        return self

    def gamelin_chain(self) -> GamelinChain:
        return GamelinChain.from_records(self.chain)

    @property
    def truncation(self) -> int:
        """Наибольшее усечение расписания."""
        return self.domain.schedule[-1]
