"""Pydantic models for all Bridgegenus data types.

Words hold the half-parameters a_i of the knot K(2a_1, ..., 2a_2m).
Every model is frozen: operations return new values, so instances can be
shared freely between worker processes and replayed traces.
"""

from __future__ import annotations

from collections import Counter
from enum import StrEnum
from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# --- Knots ---


class TwistWord(BaseModel):
    """A sequence (a_1, ..., a_2m) of nonzero integers."""

    model_config = ConfigDict(frozen=True)

    entries: tuple[int, ...]

    @field_validator("entries")
    @classmethod
    def _check_entries(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if len(v) < 2 or len(v) % 2:
            raise ValueError(f"word length must be even and >= 2, got {len(v)}")
        for i, a in enumerate(v, start=1):
            if a == 0:
                raise ValueError(f"entry {i} is zero")
        return v

    @classmethod
    def of(cls, *entries: int) -> TwistWord:
        return cls(entries=tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.entries)


def _negate_reverse(entries: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-a for a in reversed(entries))


class KnotClass(BaseModel):
    """Canonical representative of a word under K(a) = K(-a reversed)."""

    model_config = ConfigDict(frozen=True)

    canonical_word: TwistWord

    @model_validator(mode="after")
    def _check_canonical(self) -> KnotClass:
        entries = self.canonical_word.entries
        if entries > _negate_reverse(entries):
            raise ValueError(f"{self.canonical_word} is not the canonical representative")
        return self

    @property
    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return len(self.canonical_word), self.canonical_word.entries

    def __str__(self) -> str:
        return str(self.canonical_word)


class ConnectedSum(BaseModel):
    """Multiset of knot classes; the empty sum is the unknot.

    Summands are stored sorted so that equality is multiset equality.
    """

    model_config = ConfigDict(frozen=True)

    summands: tuple[KnotClass, ...] = ()

    @field_validator("summands")
    @classmethod
    def _sort(cls, v: tuple[KnotClass, ...]) -> tuple[KnotClass, ...]:
        return tuple(sorted(v, key=lambda c: c.sort_key))

    def counts(self) -> Counter[KnotClass]:
        return Counter(self.summands)

    def is_unknot(self) -> bool:
        return not self.summands

    def __len__(self) -> int:
        return len(self.summands)

    def __str__(self) -> str:
        return ";".join(str(c) for c in self.summands)


# --- Exact statistics ---


class CompositionCensus(BaseModel):
    """Number of words of complexity n with 2m parts, per m."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    signed: bool
    per_m_counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.per_m_counts.values())


class ExactStat(BaseModel):
    """An exact rational statistic at a given n."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Fraction
    n: int = Field(ge=2)
    mode: Literal["words", "knots"] = "words"
    signed: bool = True

    @field_validator("value")
    @classmethod
    def _non_negative(cls, v: Fraction) -> Fraction:
        if v < 0:
            raise ValueError("statistic must be non-negative")
        return v


class LemmaRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    avg_genus: Fraction
    ratio: Fraction
    tail_fraction: Fraction


class LemmaReport(BaseModel):
    """Result of checking <g>_n / n >= 1/4 for every n up to n_max."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ok: bool
    n_max: int
    min_ratio: Fraction
    argmin_n: int
    violations: tuple[int, ...] = ()
    rows: tuple[LemmaRow, ...] = ()


# --- Cobordism pipeline ---


class BoundParams(BaseModel):
    """Twist-size cutoff k and chunk half-length s."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    s: int = Field(ge=1)

    def in_asymptotic_regime(self, n: int) -> bool:
        """Whether k >= 32, s >= 2 and both are below n, as the asymptotic estimate needs."""
        return self.k >= 32 and self.s >= 2 and self.k < n and self.s < n

    @property
    def sort_key(self) -> tuple[int, int]:
        return self.k, self.s

    def __str__(self) -> str:
        return f"k={self.k},s={self.s}"


class StepKind(StrEnum):
    REMOVE_LARGE_PAIR = "remove_large_pair"
    SPLIT = "split"
    CANCEL_MIRROR_PAIR = "cancel_mirror_pair"
    REMOVE_RESIDUAL = "remove_residual"


STEP_COSTS: dict[StepKind, int | None] = {
    StepKind.REMOVE_LARGE_PAIR: 2,
    StepKind.SPLIT: 1,
    StepKind.CANCEL_MIRROR_PAIR: 0,
    StepKind.REMOVE_RESIDUAL: None,  # genus of the removed summand
}


class TraceStep(BaseModel):
    """One cobordism move.

    ``pair_index`` is 1-based: into the original word for large-pair
    removals, into the word after removal for splits. ``classes`` holds
    the affected class representatives for cancellation (class, mirror)
    and residual removal (class).
    """

    model_config = ConfigDict(frozen=True)

    kind: StepKind
    genus_cost: int = Field(ge=0)
    pair_index: int | None = None
    classes: tuple[KnotClass, ...] = ()


class CobordismTrace(BaseModel):
    """Ordered cobordism moves from a knot to a ribbon knot (or the unknot)."""

    model_config = ConfigDict(frozen=True)

    initial_word: TwistWord
    params: BoundParams
    steps: tuple[TraceStep, ...] = ()
    final: ConnectedSum = ConnectedSum()

    @property
    def total_cost(self) -> int:
        return sum(step.genus_cost for step in self.steps)

    @property
    def n(self) -> int:
        return sum(abs(a) for a in self.initial_word.entries)

    @property
    def m(self) -> int:
        return len(self.initial_word) // 2

    @property
    def bound(self) -> int:
        return min(self.m, self.total_cost)

    @property
    def summand_count(self) -> int:
        """Summands left after the splits; 0 when every pair was removed."""
        if self.m == self.count(StepKind.REMOVE_LARGE_PAIR):
            return 0
        return self.count(StepKind.SPLIT) + 1

    def count(self, kind: StepKind) -> int:
        return sum(1 for step in self.steps if step.kind == kind)


class TypeCensus(BaseModel):
    """Number of summands of each class in a connected sum."""

    model_config = ConfigDict(frozen=True)

    s: int = Field(ge=1)
    counts: dict[KnotClass, int]

    @model_validator(mode="after")
    def _check_lengths(self) -> TypeCensus:
        for cls_, count in self.counts.items():
            if count < 0:
                raise ValueError(f"negative count for {cls_}")
            if len(cls_.canonical_word) > 2 * (self.s + 1):
                raise ValueError(f"{cls_} has more than {2 * (self.s + 1)} twist regions")
        return self

    @property
    def summand_count(self) -> int:
        return sum(self.counts.values())


class ReplayReport(BaseModel):
    """Result of re-executing a trace."""

    model_config = ConfigDict(frozen=True)

    ok: bool
    reason: str = ""
    failed_step: int | None = None
    """0-based index of the first offending step; None for whole-trace failures."""

    total_cost: int = 0
    bound: int = 0


class FastBound(BaseModel):
    """Cost components from the vectorised kernel, without a trace."""

    model_config = ConfigDict(frozen=True)

    removed_pairs: int
    split_count: int
    residual_cost: int
    genus: int

    @property
    def total_cost(self) -> int:
        return 2 * self.removed_pairs + self.split_count + self.residual_cost

    @property
    def bound(self) -> int:
        return min(self.genus, self.total_cost)


# --- Monte-Carlo ---


class SamplerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    sample_count: int = Field(ge=1)
    master_seed: int = Field(ge=0, lt=2**64)
    worker_count: int = Field(default=1, ge=1)
    task_size: int = Field(default=64, ge=1)
    time_budget_seconds: float | None = Field(default=None, gt=0)


class Estimate(BaseModel):
    """Sample mean with standard error (None when fewer than two samples)."""

    model_config = ConfigDict(frozen=True)

    mean: float
    std_error: float | None
    sample_size: int = Field(ge=0)


class StatsReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    avg_genus: Estimate
    avg_bound: Estimate
    avg_ratio: Estimate
    tail_fraction: Estimate
    params_used: tuple[BoundParams, ...]
    best_params: BoundParams | None = None
    """Grid point that most often attained the minimum bound."""

    master_seed: int
    worker_count: int = Field(exclude=True)
    """Recorded for logs; left out of dumps, which match across worker counts."""

    task_size: int
    incomplete: bool = False


class WalkExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    s: int = Field(ge=1)
    t: int = Field(ge=0)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)


class WalkReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: WalkExperimentConfig
    word_count: int
    """(2k)^(2s), the number of summand types as words."""

    distinct_pairs: int
    self_mirror_classes: int
    expected_scale: float
    """sqrt(t / (2k)^(2s))."""

    mean_discrepancy: Estimate
    normalized_ratio: Estimate
    self_mirror_excess: Estimate
    """Mean leftover count (count mod 2) over self-mirror classes."""


class Theorem1Row(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    avg_ratio: float
    se_ratio: float | None
    avg_bound_over_n: float
    eight_avg_bound_over_n: float
    avg_genus_over_n: float
    tail_fraction: float
    best_params: BoundParams | None
    sample_count: int
    incomplete: bool = False


class Theorem1Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: tuple[Theorem1Row, ...]
    grid: tuple[BoundParams, ...]
    master_seed: int

    @property
    def ratio_weakly_decreasing(self) -> bool:
        ratios = [r.avg_ratio for r in self.rows]
        return all(b <= a for a, b in zip(ratios, ratios[1:]))

    @property
    def incomplete(self) -> bool:
        return any(r.incomplete for r in self.rows)


# --- CLI ---


class RunConfig(BaseModel):
    """Full flag set of one CLI invocation, echoed into structured output."""

    model_config = ConfigDict(frozen=True)

    command: Literal["exact", "bound", "sweep", "walk", "enumerate"]
    n: int | None = None
    n_grid: tuple[int, ...] = ()
    signed: bool = True
    mode: Literal["words", "knots"] = "words"
    grid: tuple[BoundParams, ...] = ()
    sample_count: int | None = None
    seed: int | None = None
    worker_count: int | None = None
    workers_from_env: bool = False
    output_format: Literal["csv", "json", "table"] = "csv"
    output_path: str | None = None


class AlphabetCensus(BaseModel):
    """Class structure of the (2k)^(2s) words of length 2s over {-k..-1, 1..k}."""

    model_config = ConfigDict(frozen=True)

    k: int
    s: int
    words: int
    classes: int
    self_mirror_classes: int
    distinct_pairs: int
