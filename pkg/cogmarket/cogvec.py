"""
Cognitive dimension registry, state vectors and persona-stratified day states.

Every type here is immutable after construction and safe to share between
threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import (
    DEFAULT_LABELS,
    NEGATIVE_DIMS,
    POSITIVE_DIMS,
    SCORE_MAX,
    SCORE_MIN,
    TAG_METACOGNITION,
)
from .errors import InputError


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DimensionRegistry:
    """Ordered, unique dimension labels.  ``index(label)`` never changes."""

    labels: Tuple[str, ...]
    extensible: bool = False

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if not labels:
            raise InputError("dimension registry needs at least one label")
        seen = set()
        for label in labels:
            if not isinstance(label, str) or not label.strip():
                raise InputError("dimension labels must be non-empty strings")
            if label in seen:
                raise InputError(f"duplicate dimension label {label!r}")
            seen.add(label)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", MappingProxyType({lab: i for i, lab in enumerate(labels)}))

    @classmethod
    def default(cls, extensible: bool = False) -> "DimensionRegistry":
        return cls(DEFAULT_LABELS, extensible)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def index(self, label: str) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise InputError(f"unknown dimension {label!r}") from None

    def extended(self, labels: Iterable[str]) -> "DimensionRegistry":
        """Registry with *labels* appended (existing labels keep their index)."""
        new = []
        for label in labels:
            if label not in self and label not in new:
                new.append(label)
        if not new:
            return self
        return DimensionRegistry(self.labels + tuple(new), self.extensible)


def make_registry(labels: Sequence[str], extensible: bool = False) -> DimensionRegistry:
    return DimensionRegistry(tuple(labels), extensible)


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CognitiveVector:
    """Dense scores in [-1, 1], one per registry dimension (absent = 0)."""

    registry: DimensionRegistry
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.registry),):
            raise InputError(
                f"vector has {values.size} scores for a {len(self.registry)}-dimension registry"
            )
        for label, value in zip(self.registry.labels, values):
            if not math.isfinite(value) or value < SCORE_MIN or value > SCORE_MAX:
                raise InputError(f"score {label}={value!r} outside [{SCORE_MIN}, {SCORE_MAX}]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_scores(
        cls,
        registry: DimensionRegistry,
        scores: Mapping[str, float],
        *,
        clamp: bool = False,
    ) -> "CognitiveVector":
        values = np.zeros(len(registry))
        for dim, raw in scores.items():
            idx = registry.index(dim)
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise InputError(f"score for {dim!r} is not a number: {raw!r}") from None
            if clamp and math.isfinite(value):
                value = min(max(value, SCORE_MIN), SCORE_MAX)
            values[idx] = value
        return cls(registry, values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CognitiveVector):
            return NotImplemented
        return self.registry == other.registry and bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.registry, self.values.tobytes()))

    def get(self, dim: str) -> float:
        """Score for *dim*; dimensions outside the registry read as 0."""
        if dim not in self.registry:
            return 0.0
        return float(self.values[self.registry.index(dim)])

    @property
    def scores(self) -> Dict[str, float]:
        return {label: float(v) for label, v in zip(self.registry.labels, self.values)}

    def as_array(self) -> np.ndarray:
        return self.values.copy()

    def with_scores(self, updates: Mapping[str, float], *, clamp: bool = False) -> "CognitiveVector":
        merged = self.scores
        merged.update(updates)
        return CognitiveVector.from_scores(self.registry, merged, clamp=clamp)

    def replace(self, *, clamp: bool = False, **updates: float) -> "CognitiveVector":
        return self.with_scores(updates, clamp=clamp)

    def mood(self) -> float:
        """Mean positive affect minus mean negative affect."""
        pos = [self.get(d) for d in POSITIVE_DIMS]
        neg = [self.get(d) for d in NEGATIVE_DIMS]
        return math.fsum(pos) / len(pos) - math.fsum(neg) / len(neg)

    def to_dict(self) -> Dict[str, float]:
        return self.scores


def zeros(registry: DimensionRegistry) -> CognitiveVector:
    return CognitiveVector(registry, np.zeros(len(registry)))


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------

class Persona(str, Enum):
    NOVICE = "novice"
    VETERAN = "veteran"

    @classmethod
    def parse(cls, raw: Union[str, "Persona"]) -> "Persona":
        if isinstance(raw, Persona):
            return raw
        text = str(raw).strip().lower()
        if text.startswith("persona_"):
            text = text[len("persona_"):]
        try:
            return cls(text)
        except ValueError:
            raise InputError(f"unknown persona {raw!r}") from None


class Bias(str, Enum):
    LOSS_AVERSION = "BIAS_LOSS_AVERSION"
    RECENCY = "BIAS_RECENCY"
    OVERCONFIDENCE = "BIAS_OVERCONFIDENCE"
    HERDING = "BIAS_HERDING"
    ANCHORING = "BIAS_ANCHORING"
    CONFIRMATION = "BIAS_CONFIRMATION"
    DISPOSITION_EFFECT = "BIAS_DISPOSITION_EFFECT"
    GAMBLERS_FALLACY = "BIAS_GAMBLERS_FALLACY"

    @classmethod
    def parse(cls, raw: str) -> "Bias":
        text = str(raw).strip().upper()
        if not text.startswith("BIAS_"):
            text = "BIAS_" + text
        try:
            return cls(text)
        except ValueError:
            raise InputError(f"unknown bias enum {raw!r}") from None


# ---------------------------------------------------------------------------
# Day states and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PersonaDayState:
    date: date
    novice: CognitiveVector
    veteran: CognitiveVector
    metacognition_score: float = 0.0
    missing: FrozenSet[Persona] = frozenset()

    def __post_init__(self) -> None:
        if self.novice.registry != self.veteran.registry:
            raise InputError(f"{self.date}: novice and veteran vectors use different registries")
        if not 0.0 <= self.metacognition_score <= 1.0:
            raise InputError(
                f"{self.date}: metacognition_score {self.metacognition_score!r} outside [0, 1]"
            )

    @property
    def registry(self) -> DimensionRegistry:
        return self.novice.registry

    def persona(self, which: Persona) -> CognitiveVector:
        return self.novice if which is Persona.NOVICE else self.veteran

    def mean_score(self, dim: str) -> float:
        """Cross-persona mean of one dimension."""
        return (self.novice.get(dim) + self.veteran.get(dim)) / 2.0


@dataclass(frozen=True)
class DailySentimentReport:
    date: date
    overall_sentiment_index: float
    persona_day: PersonaDayState
    dominant_emotions: Tuple[Tuple[str, float], ...] = ()
    diagnosed_biases: Tuple[Bias, ...] = ()
    narrative_topics: Tuple[str, ...] = ()
    model_version: str = ""

    def __post_init__(self) -> None:
        if not -1.0 <= self.overall_sentiment_index <= 1.0:
            raise InputError(
                f"{self.date}: overall_sentiment_index {self.overall_sentiment_index!r} outside [-1, 1]"
            )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommentVector:
    """One decoded comment: persona tag, vector and optional tags."""

    persona: Persona
    vector: CognitiveVector
    tags: Tuple[str, ...] = field(default_factory=tuple)


def _as_comment(item: Union[CommentVector, Tuple]) -> CommentVector:
    if isinstance(item, CommentVector):
        return item
    if len(item) == 2:
        return CommentVector(Persona.parse(item[0]), item[1])
    return CommentVector(Persona.parse(item[0]), item[1], tuple(item[2]))


def aggregate_daily(
    comment_vectors: Iterable[Union[CommentVector, Tuple]],
    day: date,
    registry: Optional[DimensionRegistry] = None,
) -> PersonaDayState:
    """
    Per-persona arithmetic mean of comment vectors.

    Sums use ``math.fsum`` so the result does not depend on input order.
    A persona with no inputs becomes the zero vector and is listed in
    ``missing``.
    """
    comments = [_as_comment(c) for c in comment_vectors]
    if registry is None:
        if not comments:
            raise InputError(f"{day}: no comment vectors and no registry given")
        registry = comments[0].vector.registry
    for c in comments:
        if c.vector.registry != registry:
            raise InputError(f"{day}: comment vectors use mixed registries")

    means: Dict[Persona, CognitiveVector] = {}
    missing = set()
    for persona in Persona:
        rows = [c.vector.values for c in comments if c.persona is persona]
        if not rows:
            means[persona] = zeros(registry)
            missing.add(persona)
            continue
        stacked = np.vstack(rows)
        mean = np.array([math.fsum(stacked[:, j]) / len(rows) for j in range(len(registry))])
        # division can overshoot by an ulp
        mean = np.clip(mean, stacked.min(axis=0), stacked.max(axis=0))
        means[persona] = CognitiveVector(registry, mean)

    tagged = sum(1 for c in comments if TAG_METACOGNITION in c.tags)
    meta = tagged / len(comments) if comments else 0.0

    return PersonaDayState(
        date=day,
        novice=means[Persona.NOVICE],
        veteran=means[Persona.VETERAN],
        metacognition_score=meta,
        missing=frozenset(missing),
    )
