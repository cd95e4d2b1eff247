"""
Macro state of the market: dispersion (MDI), consensus frenzy (MCFI),
metacognition, their day-over-day dynamics, and soft membership in the six
market quadrants.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from .cogvec import CognitiveVector, PersonaDayState
from .constants import DYNAMICS_LAG, INTENSITY_HIGH, INTENSITY_LOW, MCFI_ALPHA
from .errors import ConfigError, InputError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Quadrants
# ---------------------------------------------------------------------------

class Quadrant(str, Enum):
    A = "A_FullBubble"
    B = "B_StructuralTearing"
    C = "C_DeadFreeze"
    D = "D_InertialRecession"
    E = "E_RecessiveTearing"
    F = "F_StructuralRise"

    @property
    def letter(self) -> str:
        return self.value[0]

    @property
    def display(self) -> str:
        return _DISPLAY[self]

    @property
    def report_enum(self) -> str:
        return _REPORT_ENUM[self]

    @classmethod
    def parse(cls, raw: Union[str, "Quadrant"]) -> "Quadrant":
        """Accept ``"B"``, ``"B_StructuralTearing"``, ``"B_Structural Tearing"`` or the report enum."""
        if isinstance(raw, Quadrant):
            return raw
        text = str(raw).strip()
        for q in cls:
            if text in (q.letter, q.value, f"{q.letter}_{q.display}", q.report_enum):
                return q
        raise InputError(f"unknown quadrant {raw!r}")


_DISPLAY = {
    Quadrant.A: "Full Bubble",
    Quadrant.B: "Structural Tearing",
    Quadrant.C: "Dead Freeze",
    Quadrant.D: "Inertial Recession",
    Quadrant.E: "Recessive Tearing",
    Quadrant.F: "Structural Rise",
}

_REPORT_ENUM = {
    Quadrant.A: "MACRO_QUADRANT_FULL_BUBBLE",
    Quadrant.B: "MACRO_QUADRANT_STRUCTURAL_TEAR",
    Quadrant.C: "MACRO_QUADRANT_DEAD_FREEZE",
    Quadrant.D: "MACRO_QUADRANT_INERTIAL_RECESSION",
    Quadrant.E: "MACRO_QUADRANT_RECESSIVE_TEAR",
    Quadrant.F: "MACRO_QUADRANT_STRUCTURAL_RISE",
}

QUADRANT_ORDER = tuple(Quadrant)
FEATURE_NAMES = ("mdi", "mcfi", "v_mdi", "v_mcfi", "meta")


# ---------------------------------------------------------------------------
# Dataclasses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MacroState:
    date: date
    mdi: float
    mcfi: float
    meta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mdi) or self.mdi < 0:
            raise InputError(f"{self.date}: mdi must be finite and >= 0, got {self.mdi!r}")

    def to_dict(self) -> dict:
        return {"date": self.date.isoformat(), "mdi": self.mdi, "mcfi": self.mcfi, "meta": self.meta}


@dataclass(frozen=True)
class MacroDynamics:
    """Velocities and accelerations; ``None`` where the window is too short."""

    date: date
    v_mdi: Optional[float] = None
    v_mcfi: Optional[float] = None
    a_mdi: Optional[float] = None
    a_mcfi: Optional[float] = None

    def to_dict(self) -> dict:
        return {"v_mdi": self.v_mdi, "v_mcfi": self.v_mcfi, "a_mdi": self.a_mdi, "a_mcfi": self.a_mcfi}


@dataclass(frozen=True)
class QuadrantPrototypes:
    """Feature centroids (mdi, mcfi, v_mdi, v_mcfi, meta) per quadrant."""

    centroids: Mapping[Quadrant, np.ndarray]
    bandwidth: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ConfigError(f"quadrant bandwidth must be > 0, got {self.bandwidth!r}")
        clean = {}
        for q in QUADRANT_ORDER:
            if q not in self.centroids:
                raise ConfigError(f"missing prototype for quadrant {q.value}")
            vec = np.asarray(self.centroids[q], dtype=float)
            if vec.shape != (len(FEATURE_NAMES),) or not np.all(np.isfinite(vec)):
                raise ConfigError(f"prototype {q.value} must be {len(FEATURE_NAMES)} finite numbers")
            clean[q] = vec
        object.__setattr__(self, "centroids", clean)

    @classmethod
    def from_dict(cls, section: Mapping) -> "QuadrantPrototypes":
        raw = section.get("prototypes", {})
        try:
            centroids = {Quadrant.parse(k): v for k, v in raw.items()}
        except InputError as exc:
            raise ConfigError(f"[quadrants] {exc}") from None
        return cls(centroids=centroids, bandwidth=float(section.get("bandwidth", 0.0)))

    def matrix(self) -> np.ndarray:
        return np.vstack([self.centroids[q] for q in QUADRANT_ORDER])


@dataclass(frozen=True)
class QuadrantMembership:
    probabilities: Dict[Quadrant, float]
    dominant: Quadrant

    def to_dict(self) -> dict:
        return {
            "quadrant_membership_probability": {q.value: p for q, p in self.probabilities.items()},
            "dominant_macro_quadrant_enum": self.dominant.report_enum,
            "dominant_macro_quadrant_display": self.dominant.display,
        }


# ---------------------------------------------------------------------------
# Indices
# ---------------------------------------------------------------------------

def mdi_between(a: CognitiveVector, b: CognitiveVector) -> float:
    if a.registry != b.registry:
        raise InputError("mdi needs vectors over one registry")
    diff = a.values - b.values
    return float(np.sqrt(np.dot(diff, diff)))


def mdi(state: PersonaDayState) -> float:
    """Euclidean distance between the novice and veteran vectors."""
    return mdi_between(state.novice, state.veteran)


def mcfi(avg_joy: float, avg_anticipation: float, alpha: float = MCFI_ALPHA) -> float:
    """Convex blend ``alpha * joy + (1 - alpha) * anticipation``."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"mcfi alpha must be in [0, 1], got {alpha!r}")
    if not (math.isfinite(avg_joy) and math.isfinite(avg_anticipation)):
        raise InputError("mcfi inputs must be finite")
    return alpha * avg_joy + (1.0 - alpha) * avg_anticipation


def macro_state(day: PersonaDayState, alpha: float = MCFI_ALPHA) -> MacroState:
    """MacroState for one day; MCFI uses cross-persona means."""
    return MacroState(
        date=day.date,
        mdi=mdi(day),
        mcfi=mcfi(day.mean_score("joy"), day.mean_score("anticipation"), alpha),
        meta=day.metacognition_score,
    )


def intensity_band(value: float) -> str:
    magnitude = abs(value)
    if magnitude < INTENSITY_LOW:
        return "low"
    if magnitude > INTENSITY_HIGH:
        return "high"
    return "medium"


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------

def _check_sorted(dates: Sequence[date]) -> None:
    for prev, cur in zip(dates, dates[1:]):
        if cur <= prev:
            raise InputError(f"series not strictly date-sorted at {cur} (after {prev})")


def dynamics(series: Sequence[MacroState], k: int = DYNAMICS_LAG) -> List[MacroDynamics]:
    """Lag-*k* velocity and acceleration of MDI and MCFI for every date."""
    if k < 1:
        raise InputError(f"lag must be >= 1, got {k}")
    n = len(series)
    if k >= n:
        raise InputError(f"lag {k} needs more than {k} macro states, got {n}")
    _check_sorted([s.date for s in series])

    def _diff(values: Sequence[Optional[float]]) -> List[Optional[float]]:
        out: List[Optional[float]] = [None] * n
        for t in range(k, n):
            if values[t] is not None and values[t - k] is not None:
                out[t] = (values[t] - values[t - k]) / k
        return out

    v_mdi = _diff([s.mdi for s in series])
    v_mcfi = _diff([s.mcfi for s in series])
    a_mdi = _diff(v_mdi)
    a_mcfi = _diff(v_mcfi)
    return [
        MacroDynamics(series[t].date, v_mdi[t], v_mcfi[t], a_mdi[t], a_mcfi[t])
        for t in range(n)
    ]


# ---------------------------------------------------------------------------
# Quadrant membership
# ---------------------------------------------------------------------------

def _feature_vector(features: Union[Mapping[str, Optional[float]], Sequence[float]]) -> np.ndarray:
    if isinstance(features, Mapping):
        values = [features.get(name) or 0.0 for name in FEATURE_NAMES]
    else:
        values = list(features)
    x = np.asarray(values, dtype=float)
    if x.shape != (len(FEATURE_NAMES),):
        raise InputError(f"expected features {FEATURE_NAMES}, got {len(values)} values")
    if not np.all(np.isfinite(x)):
        raise InputError("quadrant features must be finite")
    return x


def quadrant_membership(
    features: Union[Mapping[str, Optional[float]], Sequence[float]],
    prototypes: QuadrantPrototypes,
) -> QuadrantMembership:
    """
    Gaussian-kernel similarity to each prototype, normalized to sum to 1.

    Missing (``None``) features count as 0.  Ties in the dominant quadrant
    resolve to the earliest quadrant in A..F order.
    """
    x = _feature_vector(features)
    d2 = np.sum((prototypes.matrix() - x) ** 2, axis=1)
    logits = -d2 / (2.0 * prototypes.bandwidth ** 2)
    weights = np.exp(logits - logits.max())
    probs = weights / weights.sum()
    dominant = QUADRANT_ORDER[int(np.argmax(probs))]
    return QuadrantMembership(
        probabilities={q: float(p) for q, p in zip(QUADRANT_ORDER, probs)},
        dominant=dominant,
    )


# ---------------------------------------------------------------------------
# Daily table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MacroRow:
    state: MacroState
    dynamics: MacroDynamics
    membership: QuadrantMembership

    @property
    def date(self) -> date:
        return self.state.date

    def features(self) -> Dict[str, Optional[float]]:
        return {
            "mdi": self.state.mdi,
            "mcfi": self.state.mcfi,
            "v_mdi": self.dynamics.v_mdi,
            "v_mcfi": self.dynamics.v_mcfi,
            "meta": self.state.meta,
        }

    def to_row(self) -> dict:
        row = self.state.to_dict()
        row.update(self.dynamics.to_dict())
        for q, p in self.membership.probabilities.items():
            row[f"p_{q.letter}"] = p
        row["dominant"] = self.membership.dominant.value
        return row


def macro_table(
    days: Sequence[PersonaDayState],
    prototypes: QuadrantPrototypes,
    mcfi_alpha: float = MCFI_ALPHA,
    lag: int = DYNAMICS_LAG,
) -> List[MacroRow]:
    """MacroState, dynamics and quadrant membership for every day."""
    if not days:
        raise InputError("no day states to assess")
    states = [macro_state(d, mcfi_alpha) for d in days]
    if len(states) > lag:
        dyn = dynamics(states, lag)
    else:
        _check_sorted([s.date for s in states])
        dyn = [MacroDynamics(s.date) for s in states]

    rows = []
    previous: Optional[Quadrant] = None
    for state, d in zip(states, dyn):
        feats = {"mdi": state.mdi, "mcfi": state.mcfi, "v_mdi": d.v_mdi, "v_mcfi": d.v_mcfi, "meta": state.meta}
        membership = quadrant_membership(feats, prototypes)
        if previous is not None and membership.dominant is not previous:
            logger.info("%s: quadrant switch %s -> %s", state.date, previous.value, membership.dominant.value)
        previous = membership.dominant
        rows.append(MacroRow(state, d, membership))
    return rows
