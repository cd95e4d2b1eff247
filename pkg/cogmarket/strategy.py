"""
Trading signals from cognitive state.

``decide`` applies priority-ordered rules (fear stop, MDI spike, consensus,
veteran accumulation) to one day; ``run_strategy`` folds the signals into a
target-exposure path.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from . import constants as C
from .errors import ConfigError, InputError

logger = logging.getLogger(__name__)

MODES = ("dynamic", "baseline", "static-garch")


class Signal(str, Enum):
    BUY = "BUY"
    WARNING = "WARNING"
    SELL = "SELL"
    WAIT = "WAIT"
    PREPARE = "PREPARE"


@dataclass(frozen=True)
class StrategyConfig:
    mode: str = "dynamic"
    fear_stop_base: float = C.FEAR_STOP_BASE
    fear_stop_floor: float = C.FEAR_STOP_FLOOR
    h_ref: float = C.H_REF
    h_scale: float = C.H_SCALE
    mdi_max: float = C.BUY_MDI_MAX
    mcfi_min: float = C.BUY_MCFI_MIN
    spike_multiple: float = C.SPIKE_MULTIPLE
    spike_window: int = C.SPIKE_WINDOW
    spike_floor: float = C.SPIKE_FLOOR
    prepare_mdi_min: float = C.PREPARE_MDI_MIN
    prepare_dims: Tuple[str, ...] = C.PREPARE_DIMS
    positions: Mapping[str, float] = field(default_factory=lambda: dict(C.POSITION_MAP))

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown strategy mode {self.mode!r}; choose from {MODES}")
        if self.fear_stop_floor > self.fear_stop_base:
            raise ConfigError(
                f"[strategy] fear_stop_floor {self.fear_stop_floor} exceeds fear_stop_base {self.fear_stop_base}"
            )
        if not self.h_scale > 0:
            raise ConfigError(f"[strategy] h_scale must be > 0, got {self.h_scale!r}")
        if self.spike_window < 1:
            raise ConfigError(f"[strategy] spike_window must be >= 1, got {self.spike_window}")
        numbers = (
            self.fear_stop_base, self.fear_stop_floor, self.h_ref, self.mdi_max,
            self.mcfi_min, self.spike_multiple, self.spike_floor, self.prepare_mdi_min,
        )
        if not all(math.isfinite(v) for v in numbers):
            raise ConfigError("[strategy] thresholds must be finite")
        positions = {}
        for name, value in self.positions.items():
            try:
                signal = Signal(str(name).upper())
            except ValueError:
                raise ConfigError(f"[strategy.positions] unknown signal {name!r}") from None
            if not 0.0 <= float(value) <= 1.0:
                raise ConfigError(f"[strategy.positions] {name} must be in [0, 1], got {value!r}")
            positions[signal.value] = float(value)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "prepare_dims", tuple(self.prepare_dims))

    @classmethod
    def from_dict(cls, section: Mapping, mode: Optional[str] = None) -> "StrategyConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "mode"}
        kwargs = {k: v for k, v in section.items() if k in known}
        return cls(mode=mode or section.get("mode", "dynamic"), **kwargs)

    def with_mode(self, mode: str) -> "StrategyConfig":
        return replace(self, mode=mode)

    @property
    def volatility_mode(self) -> str:
        """GARCH parameter mode feeding ``h_fear``."""
        return "static" if self.mode == "static-garch" else "dynamic"


@dataclass(frozen=True)
class DayInput:
    date: date
    novice_fear: float
    mdi: float
    mcfi: float
    v_mdi: Optional[float]
    h_fear: float
    veteran_momentum: float = 0.0
    novice_mood: float = 0.0
    v_mdi_history: Tuple[float, ...] = ()
    is_first: bool = False


@dataclass(frozen=True)
class Decision:
    signal: Signal
    rationale: str
    threshold: Optional[float] = None


@dataclass(frozen=True)
class StrategyStep:
    date: date
    signal: Signal
    exposure: float
    rationale: str

    def to_row(self) -> dict:
        return {
            "date": self.date.isoformat(),
            "signal": self.signal.value,
            "exposure": self.exposure,
            "rationale": self.rationale,
        }


def dynamic_threshold(
    base: float,
    floor: float,
    h_fear: float,
    h_ref: float = C.H_REF,
    h_scale: float = C.H_SCALE,
) -> float:
    """Fear stop that slides linearly from *base* to *floor* as ``h_fear`` rises."""
    if not h_scale > 0:
        raise InputError(f"h_scale must be > 0, got {h_scale!r}")
    weight = min(max((h_fear - h_ref) / h_scale, 0.0), 1.0)
    return base - (base - floor) * weight


def _is_spike(day: DayInput, cfg: StrategyConfig) -> bool:
    if day.v_mdi is None or not day.v_mdi_history:
        return False
    recent = day.v_mdi_history[-cfg.spike_window:]
    reference = math.fsum(abs(v) for v in recent) / len(recent)
    return day.v_mdi >= max(cfg.spike_multiple * reference, cfg.spike_floor)


def decide(day: DayInput, cfg: StrategyConfig) -> Decision:
    if cfg.mode == "baseline":
        if day.is_first:
            return Decision(Signal.BUY, "baseline_entry")
        return Decision(Signal.WAIT, "baseline_hold")

    threshold = dynamic_threshold(cfg.fear_stop_base, cfg.fear_stop_floor, day.h_fear, cfg.h_ref, cfg.h_scale)
    if day.novice_fear > threshold:
        return Decision(Signal.SELL, "fear_stop", threshold)
    if _is_spike(day, cfg):
        return Decision(Signal.WARNING, "mdi_spike", threshold)
    if day.mdi <= cfg.mdi_max and day.mcfi >= cfg.mcfi_min:
        return Decision(Signal.BUY, "consensus", threshold)
    if day.mdi >= cfg.prepare_mdi_min and day.veteran_momentum > 0 and day.novice_mood < 0:
        return Decision(Signal.PREPARE, "veteran_accumulation", threshold)
    return Decision(Signal.WAIT, "no_trigger", threshold)


def run_strategy(stream: Sequence[DayInput], cfg: StrategyConfig) -> List[StrategyStep]:
    """Signals and target exposure; WAIT and PREPARE hold the previous exposure."""
    if not stream:
        raise InputError("strategy stream is empty")
    for prev, cur in zip(stream, stream[1:]):
        if cur.date <= prev.date:
            raise InputError(f"strategy stream not date-sorted at {cur.date} (after {prev.date})")

    steps: List[StrategyStep] = []
    exposure = 0.0
    for day in stream:
        decision = decide(day, cfg)
        exposure = cfg.positions.get(decision.signal.value, exposure)
        if decision.signal not in (Signal.WAIT, Signal.PREPARE):
            logger.debug("%s: %s (%s) -> exposure %.2f", day.date, decision.signal.value,
                         decision.rationale, exposure)
        steps.append(StrategyStep(day.date, decision.signal, exposure, decision.rationale))
    return steps


def strategy_frame(steps: Sequence[StrategyStep]) -> pd.DataFrame:
    return pd.DataFrame([s.to_row() for s in steps], columns=["date", "signal", "exposure", "rationale"])
