from typing import Any, Dict, FrozenSet, List, Literal, Optional, Tuple
from datetime import datetime
from pathlib import Path
import math
import re

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config


def sanitize_filename(text: str, max_length: int = 100) -> str:
    """
    Унифицированная санитизация имен файлов и директорий запусков

    Args:
        text: Исходный текст
        max_length: Максимальная длина результата

    Returns:
        Безопасное имя файла
    """
    if not text:
        return "unnamed"

    safe_name = re.sub(r'[^\w\s.-]', '', text)
    safe_name = re.sub(r'[-\s]+', '_', safe_name)
    safe_name = safe_name[:max_length]
    safe_name = safe_name.strip('_')

    return safe_name if safe_name else "unnamed"


Site = Tuple[int, int]


class Parameters(BaseModel):
    """Параметры модели: β, h, N и запас δ для κ"""
    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., gt=0, description="Inverse temperature")
    h: float = Field(default=0.0, ge=0, description="Pinning reward")
    N: int = Field(..., ge=1, description="Lattice side")
    delta: float = Field(default=1.0, gt=0, description="Slack used in kappa")

    @field_validator("beta", "h", "delta")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("parameters must be finite")
        return value

    def with_h(self, h: float) -> "Parameters":
        return self.model_copy(update={"h": float(h)})

    def with_N(self, N: int) -> "Parameters":
        return self.model_copy(update={"N": int(N)})


class HeightField(BaseModel):
    """Неотрицательная функция высоты на квадрате N×N с нулевой внешней границей"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    heights: np.ndarray

    @field_validator("heights", mode="before")
    @classmethod
    def _as_square_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.int64)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise ValueError(f"heights must be a non-empty square 2D array, got shape {array.shape}")
        array.setflags(write=False)
        return array

    @field_validator("heights")
    @classmethod
    def _nonnegative(cls, value: np.ndarray) -> np.ndarray:
        if (value < 0).any():
            raise ValueError("heights of a HeightField must be nonnegative")
        return value

    @property
    def N(self) -> int:
        return int(self.heights.shape[0])

    @classmethod
    def constant(cls, N: int, value: int = 0) -> "HeightField":
        return cls(heights=np.full((N, N), value, dtype=np.int64))

    def at(self, row: int, col: int) -> int:
        """Height at a 1-based site; sites outside the box read as 0"""
        if 1 <= row <= self.N and 1 <= col <= self.N:
            return int(self.heights[row - 1, col - 1])
        return 0


class SignedField(BaseModel):
    """Элемент Ω*_N: отрицательные высоты только в изолированных узлах"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    heights: np.ndarray

    @field_validator("heights", mode="before")
    @classmethod
    def _as_square_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.int64)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise ValueError(f"heights must be a non-empty square 2D array, got shape {array.shape}")
        array.setflags(write=False)
        return array

    @field_validator("heights")
    @classmethod
    def _negative_sites_isolated(cls, value: np.ndarray) -> np.ndarray:
        negative = value <= -1
        if not negative.any():
            return value
        padded = np.pad(value, 1, constant_values=1)
        # in-box neighbours only: the pad value 1 never violates the constraint
        for shifted in (padded[:-2, 1:-1], padded[2:, 1:-1], padded[1:-1, :-2], padded[1:-1, 2:]):
            if (negative & (shifted < 1)).any():
                raise ValueError("a negative site has an in-box neighbour below 1")
        return value

    @property
    def N(self) -> int:
        return int(self.heights.shape[0])

    def positive_part(self) -> HeightField:
        return HeightField(heights=np.maximum(self.heights, 0))


class LevelCensus(BaseModel):
    """Число узлов на каждом уровне высоты"""
    model_config = ConfigDict(frozen=True)

    counts: Dict[int, int]
    total: int

    @model_validator(mode="after")
    def _partition(self) -> "LevelCensus":
        if sum(self.counts.values()) != self.total:
            raise ValueError("level counts must sum to N^2")
        return self

    def count_between(self, low: Optional[int] = None, high: Optional[int] = None) -> int:
        """|φ⁻¹([low, high])|; an open end is unbounded"""
        return sum(
            count for level, count in self.counts.items()
            if (low is None or level >= low) and (high is None or level <= high)
        )


class ZeroClassification(BaseModel):
    """Изолированные (q₁) и неизолированные (q₂₊) нули, узлы в 1-индексации"""
    model_config = ConfigDict(frozen=True)

    isolated: FrozenSet[Site] = Field(default_factory=frozenset)
    non_isolated: FrozenSet[Site] = Field(default_factory=frozenset)

    @model_validator(mode="after")
    def _disjoint(self) -> "ZeroClassification":
        if self.isolated & self.non_isolated:
            raise ValueError("isolated and non-isolated zeros must be disjoint")
        return self


class CappedSpace(BaseModel):
    """Усечённое пространство состояний для точного перебора"""
    model_config = ConfigDict(frozen=True)

    N: int = Field(..., ge=1)
    cap: int = Field(default=3, ge=0, description="Heights restricted to [0, cap]")
    depth: int = Field(default=0, ge=0, description="Negative depth D for the signed space")
    budget: int = Field(default_factory=lambda: config.ORACLE_BUDGET, ge=1)

    @property
    def site_count(self) -> int:
        return self.N * self.N

    @property
    def levels(self) -> int:
        return self.cap + self.depth + 1

    @property
    def size(self) -> int:
        """Number of raw configurations (an upper bound on the signed space)"""
        return self.levels ** self.site_count


class SignedDistribution(BaseModel):
    """Перечисленное Ω*_N с ненормированными логарифмическими весами"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    space: CappedSpace
    states: np.ndarray
    log_weights: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        weights = np.exp(self.log_weights - self.log_weights.max())
        return weights / math.fsum(weights)

    def fields(self):
        for heights in self.states:
            yield SignedField(heights=heights)


class LiftingReport(BaseModel):
    """Итог случайной проверки неравенств для отображений подъёма"""
    pairs_checked: int = 0
    violations: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class PatternGraph(BaseModel):
    """Один из четырёх шаблонов покрытия связных множеств"""
    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=1, le=4)
    name: str
    vertices: List[Site]
    internal_edges: List[Tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.vertices)


class ChainState(BaseModel):
    """Состояние цепи Маркова: поле, параметры, поток случайных чисел и счётчики"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    heights: np.ndarray
    params: Parameters
    cap: int = Field(..., ge=1)
    seed: int
    rng: np.random.Generator
    sweep_count: int = 0
    update_count: int = 0
    cap_hit_count: int = 0
    initial: str = "zero"

    @property
    def field(self) -> HeightField:
        return HeightField(heights=self.heights.copy())

    @property
    def cap_hit_fraction(self) -> float:
        return self.cap_hit_count / self.update_count if self.update_count else 0.0


class CoupledPair(BaseModel):
    """Две цепи с общим потоком равномерных величин (h₁ ≤ h₂)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lower_h_chain: ChainState
    higher_h_chain: ChainState
    seed: int
    rng: np.random.Generator
    sweep_count: int = 0


class SampleStream(BaseModel):
    """Результат run_chain: прореженные значения наблюдаемых и метаданные"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    records: List[Dict[str, float]] = Field(default_factory=list)
    fields: List[np.ndarray] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)


class BatchMeansSummary(BaseModel):
    mean: float
    stderr: float
    batches: int


class ObservableSeries(BaseModel):
    """Ряд значений наблюдаемой с оценкой ошибки методом batch means"""
    name: str
    values: List[float] = Field(default_factory=list)
    summary: Optional[BatchMeansSummary] = None


class VerificationRecord(BaseModel):
    """Одна проверка тождества или неравенства (строка verify.json)"""
    model_config = ConfigDict(populate_by_name=True)

    check_name: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    discrepancy: Optional[float] = None
    passed: bool = Field(..., alias="pass")
    hard: bool = True
    exploratory: bool = False

    def to_json_dict(self) -> Dict[str, Any]:
        data = self.model_dump(by_alias=True)
        for key in ("lhs", "rhs", "discrepancy"):
            value = data[key]
            if value is not None and not math.isfinite(value):
                data[key] = str(value)
        return data


ExperimentName = Literal[
    "oracle-verify",
    "sampler-validate",
    "domination",
    "subcritical-height",
    "critical-zeros",
    "critical-height-explore",
]


class ExperimentConfig(BaseModel):
    """Полностью разрешённая конфигурация эксперимента"""
    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    beta: float = Field(default=1.0, gt=0)
    h_mode: Literal["absolute", "fraction_of_hw"] = "fraction_of_hw"
    h: List[float] = Field(default_factory=lambda: [0.0])
    N: List[int] = Field(default_factory=lambda: [16])
    cap: Optional[int] = Field(default=None, ge=1)
    sweeps: int = Field(default=10_000, ge=0)
    burn_in: int = Field(default=1_000, ge=0)
    thinning: int = Field(default=10, ge=1)
    seed: int = Field(default=12345, ge=0)
    m: List[int] = Field(default_factory=lambda: [1, 2, 3])
    C: List[float] = Field(default_factory=lambda: [1.0])
    delta: float = Field(default=1.0, gt=0)
    initial: Literal["zero", "typical"] = "zero"
    workers: int = Field(default_factory=lambda: config.WORKERS, ge=1)
    threads: int = Field(default_factory=lambda: config.NUMBA_THREADS, ge=0)
    out: Path = Field(default_factory=lambda: config.OUTPUT_DIR)
    resolved_h: List[float] = Field(default_factory=list)

    @field_validator("N")
    @classmethod
    def _positive_sides(cls, value: List[int]) -> List[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("N must be a non-empty list of positive integers")
        return value

    @field_validator("m")
    @classmethod
    def _positive_m(cls, value: List[int]) -> List[int]:
        if any(m < 1 for m in value):
            raise ValueError("m values must be positive integers")
        return value

    @model_validator(mode="after")
    def _check_h(self) -> "ExperimentConfig":
        if not self.h:
            raise ValueError("at least one h value is required")
        if any(v < 0 for v in self.h):
            raise ValueError("h values must be nonnegative")
        if self.h_mode == "fraction_of_hw" and any(v > 1 for v in self.h):
            raise ValueError("fraction_of_hw values must lie in [0, 1]")
        if self.sweeps < self.burn_in:
            raise ValueError("sweeps must be >= burn_in")
        return self


class ExperimentOutcome(BaseModel):
    """Результат одного эксперимента до записи на диск"""
    series_rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    checks: List[VerificationRecord] = Field(default_factory=list)

    @property
    def hard_failures(self) -> List[VerificationRecord]:
        return [c for c in self.checks if c.hard and not c.passed]


class RunInfo(BaseModel):
    """Метаданные запуска, попадающие в config.json и summary.json"""
    run_dir: Path
    started_at: datetime = Field(default_factory=datetime.now)
    code_version: str = config.CODE_VERSION
