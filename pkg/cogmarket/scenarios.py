"""Synthetic market scenarios for drills and tests."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import List, Optional, Tuple

from .backtest import MarketEvent, PriceSeries
from .cogvec import CognitiveVector, DimensionRegistry, PersonaDayState
from .errors import InputError

START = date(2015, 6, 8)


@dataclass(frozen=True)
class Scenario:
    name: str
    prices: PriceSeries
    days: Tuple[PersonaDayState, ...]
    events: Tuple[MarketEvent, ...]


def _calm(registry: DimensionRegistry, fear: float) -> CognitiveVector:
    return CognitiveVector.from_scores(registry, {
        "joy": 0.5,
        "anticipation": 0.5,
        "trust": 0.3,
        "fear": fear,
        "sadness": 0.1,
    })


def crash_drill(
    n_days: int = 12,
    crash_day: int = 5,
    crash_return: float = -0.08,
    fear_spike: float = 0.35,
    registry: Optional[DimensionRegistry] = None,
) -> Scenario:
    """
    Calm consensus market with one crash.

    Both personas agree (MDI 0) except on the day before the crash, when
    novice fear jumps to *fear_spike* and the index starts to slip.  The
    crash event is dated on that first sell-off day.
    """
    if not 1 <= crash_day < n_days:
        raise InputError(f"crash day {crash_day} outside 1..{n_days - 1}")
    registry = registry or DimensionRegistry.default()
    dates = [START + timedelta(days=i) for i in range(n_days)]

    closes: List[float] = [100.0]
    for t in range(1, n_days):
        if t == crash_day:
            r = crash_return
        elif t == crash_day - 1:
            r = -0.01
        else:
            r = 0.002
        closes.append(closes[-1] * (1.0 + r))

    calm = _calm(registry, 0.1)
    days = []
    for t, d in enumerate(dates):
        novice = _calm(registry, fear_spike) if t == crash_day - 1 else calm
        days.append(PersonaDayState(d, novice, calm))

    return Scenario(
        name="crash-drill",
        prices=PriceSeries(tuple(dates), closes),
        days=tuple(days),
        events=(MarketEvent(dates[crash_day - 1], "crash"),),
    )


SCENARIOS = {"crash-drill": crash_drill}
