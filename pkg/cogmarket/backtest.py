"""
Friction-aware daily backtester and performance metrics.

Exposures are fractions of equity in [0, 1].  Every exposure change costs
``|delta| * cost_rate`` of equity on the day it happens; the exposure held
at the close of day t earns the market return of day t+1.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import constants as C
from .errors import ConfigError, InputError, NumericError
from .stats import entropy, pearson, welch_t_one_tailed
from .strategy import Signal, StrategyStep

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriceSeries:
    dates: Tuple[date, ...]
    closes: np.ndarray

    def __post_init__(self) -> None:
        dates = tuple(self.dates)
        closes = np.array(self.closes, dtype=float)
        if closes.shape != (len(dates),):
            raise InputError(f"{len(dates)} dates for {closes.size} prices")
        if not dates:
            raise InputError("price series is empty")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise InputError("prices must be finite and > 0")
        for prev, cur in zip(dates, dates[1:]):
            if cur <= prev:
                raise InputError(f"price dates not strictly ascending at {cur}")
        closes.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    def __len__(self) -> int:
        return len(self.dates)

    def returns(self) -> np.ndarray:
        """Simple returns; the first day has none and reads 0."""
        r = np.zeros(len(self.closes))
        r[1:] = self.closes[1:] / self.closes[:-1] - 1.0
        return r


@dataclass(frozen=True)
class BacktestConfig:
    cost_rate: float = C.COST_RATE
    risk_free_annual: float = C.RISK_FREE_ANNUAL
    risk_free_daily: float = C.RISK_FREE_DAILY
    annualize: bool = False
    periods_per_year: int = C.TRADING_DAYS
    signal_window_days: int = C.SIGNAL_WINDOW_DAYS

    def __post_init__(self) -> None:
        for name in ("cost_rate", "risk_free_annual", "risk_free_daily"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"[backtest] {name} must be >= 0, got {value!r}")
        if self.periods_per_year < 1 or self.signal_window_days < 0:
            raise ConfigError("[backtest] periods_per_year must be >= 1 and signal_window_days >= 0")

    @classmethod
    def from_dict(cls, section: Mapping, annualize: Optional[bool] = None) -> "BacktestConfig":
        known = set(cls.__dataclass_fields__)
        kwargs = {k: v for k, v in section.items() if k in known}
        if annualize is not None:
            kwargs["annualize"] = annualize
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trade:
    date: date
    delta: float
    cost: float

    def to_dict(self) -> dict:
        return {"date": self.date.isoformat(), "delta": self.delta, "cost": self.cost}


@dataclass
class BacktestResult:
    dates: Tuple[date, ...]
    exposures: np.ndarray
    equity: np.ndarray
    returns: np.ndarray
    trades: List[Trade] = field(default_factory=list)

    @property
    def net_return(self) -> float:
        return float(self.equity[-1]) - 1.0

    @property
    def trade_count(self) -> int:
        return len(self.trades)

    @property
    def max_drawdown(self) -> float:
        return max_drawdown(self.equity)

    def drawdown(self) -> np.ndarray:
        peak = np.maximum.accumulate(self.equity)
        return (peak - self.equity) / peak

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "date": [d.isoformat() for d in self.dates],
            "exposure": self.exposures,
            "equity": self.equity,
            "return": self.returns,
            "drawdown": self.drawdown(),
        })


def simulate_portfolio(
    prices: PriceSeries,
    exposures: Sequence[float],
    cfg: BacktestConfig,
) -> BacktestResult:
    """
    ``equity_t = equity_{t-1} * (1 + e_{t-1} * r_t) * (1 - |e_t - e_{t-1}| * cost)``

    Starting capital is 1 and the position before the first day is flat.
    """
    e = np.asarray(exposures, dtype=float)
    n = len(prices)
    if e.shape != (n,):
        raise InputError(f"{e.size} exposures for {n} price dates")
    if not np.all(np.isfinite(e)) or np.any(e < 0) or np.any(e > 1):
        raise InputError("exposures must lie in [0, 1]")

    r = prices.returns()
    held = np.concatenate([[0.0], e[:-1]])
    delta = e - held
    growth = 1.0 + held * r
    friction = 1.0 - np.abs(delta) * cfg.cost_rate
    equity = np.cumprod(growth * friction)
    if np.any(equity <= 0):
        raise NumericError("equity reached zero")

    previous = np.concatenate([[1.0], equity[:-1]])
    trades = []
    for t in np.flatnonzero(delta):
        cost = float(previous[t] * growth[t] * abs(delta[t]) * cfg.cost_rate)
        trades.append(Trade(prices.dates[t], float(delta[t]), cost))
    logger.debug("simulated %d days, %d trades, final equity %.6f", n, len(trades), equity[-1])

    return BacktestResult(
        dates=prices.dates,
        exposures=e,
        equity=equity,
        returns=equity / previous - 1.0,
        trades=trades,
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def max_drawdown(equity: Sequence[float]) -> float:
    """Largest peak-to-trough loss as a fraction of the peak."""
    eq = np.asarray(equity, dtype=float)
    if eq.size == 0:
        raise InputError("equity curve is empty")
    if np.any(eq <= 0) or not np.all(np.isfinite(eq)):
        raise InputError("equity must be finite and > 0")
    peak = np.maximum.accumulate(eq)
    return float(np.max((peak - eq) / peak))


def sharpe_ratio(
    returns: Sequence[float],
    rf_daily: float = C.RISK_FREE_DAILY,
    annualize: bool = False,
    periods_per_year: int = C.TRADING_DAYS,
) -> Optional[float]:
    """Mean excess return over population sd; ``None`` when returns are constant."""
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        raise InputError(f"sharpe needs at least 2 returns, got {r.size}")
    sd = float(r.std())
    if sd == 0.0:
        return None
    ratio = float(np.mean(r - rf_daily)) / sd
    return ratio * math.sqrt(periods_per_year) if annualize else ratio


@dataclass(frozen=True)
class PerformanceMetrics:
    net_return: float
    max_drawdown: float
    sharpe: Optional[float]
    trade_count: int
    total_cost: float

    def to_dict(self) -> dict:
        return {
            "net_return": self.net_return,
            "max_drawdown": self.max_drawdown,
            "sharpe": self.sharpe,
            "sharpe_defined": self.sharpe is not None,
            "trade_count": self.trade_count,
            "total_cost": self.total_cost,
        }


def metrics(result: BacktestResult, cfg: BacktestConfig) -> PerformanceMetrics:
    if len(result.equity) < 2:
        raise InputError("metrics need an equity curve of at least 2 days")
    return PerformanceMetrics(
        net_return=result.net_return,
        max_drawdown=result.max_drawdown,
        sharpe=sharpe_ratio(result.returns, cfg.risk_free_daily, cfg.annualize, cfg.periods_per_year),
        trade_count=result.trade_count,
        total_cost=math.fsum(t.cost for t in result.trades),
    )


def safety_buffer(da: float, cost_rate: float = C.COST_RATE) -> float:
    """Defensive alpha expressed in multiples of the per-trade cost."""
    if not cost_rate > 0:
        raise NumericError("safety buffer undefined for a zero cost rate")
    return da / cost_rate


@dataclass(frozen=True)
class DefensiveAlpha:
    da: float
    safety_buffer: float

    def to_dict(self) -> dict:
        return {"defensive_alpha": self.da, "safety_buffer": self.safety_buffer}


def defensive_alpha(
    strategy: BacktestResult,
    baseline: BacktestResult,
    cfg: BacktestConfig,
) -> DefensiveAlpha:
    """Terminal-equity ratio minus one, over an identical window."""
    if strategy.dates != baseline.dates:
        raise InputError("strategy and baseline cover different windows")
    da = float(strategy.equity[-1] / baseline.equity[-1]) - 1.0
    return DefensiveAlpha(da=da, safety_buffer=safety_buffer(da, cfg.cost_rate))


def return_difference_test(strategy: BacktestResult, baseline: BacktestResult) -> Tuple[float, float]:
    """Welch one-tailed test of H1: mean daily strategy return > baseline."""
    return welch_t_one_tailed(strategy.returns, baseline.returns)


# ---------------------------------------------------------------------------
# Signal quality
# ---------------------------------------------------------------------------

EVENT_KINDS = {
    "crash": (Signal.SELL, Signal.WARNING),
    "rally": (Signal.BUY, Signal.PREPARE),
}


@dataclass(frozen=True)
class MarketEvent:
    date: date
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise InputError(f"unknown event kind {self.kind!r}; choose from {sorted(EVENT_KINDS)}")


@dataclass(frozen=True)
class SignalQuality:
    mean_latency_days: Optional[float]
    entropy: float
    latencies: Tuple[int, ...]
    unmatched: Tuple[date, ...]
    counts: Mapping[str, int]

    def to_dict(self) -> dict:
        return {
            "mean_latency_days": self.mean_latency_days,
            "entropy": self.entropy,
            "latencies": list(self.latencies),
            "unmatched_events": [d.isoformat() for d in self.unmatched],
            "signal_counts": dict(sorted(self.counts.items())),
        }


def _as_signal_pair(item: Union[StrategyStep, Tuple[date, Signal]]) -> Tuple[date, Signal]:
    if isinstance(item, StrategyStep):
        return item.date, item.signal
    d, s = item
    return d, Signal(s)


def signal_quality(
    signals: Sequence[Union[StrategyStep, Tuple[date, Signal]]],
    events: Sequence[MarketEvent],
    window: int = C.SIGNAL_WINDOW_DAYS,
) -> SignalQuality:
    """
    Latency: days from each event to the first qualifying signal within
    *window* days (missed events count as *window* and are listed).
    Entropy: natural-log entropy of the signal category frequencies.
    """
    pairs = sorted(_as_signal_pair(s) for s in signals)
    if not pairs:
        raise InputError("no signals to assess")

    latencies: List[int] = []
    unmatched: List[date] = []
    for event in events:
        wanted = EVENT_KINDS[event.kind]
        hit = next(
            (
                (d - event.date).days
                for d, s in pairs
                if s in wanted and 0 <= (d - event.date).days <= window
            ),
            None,
        )
        if hit is None:
            unmatched.append(event.date)
            logger.info("%s %s: no qualifying signal within %d days", event.date, event.kind, window)
            hit = window
        latencies.append(hit)

    counts = Counter(s.value for _, s in pairs)
    return SignalQuality(
        mean_latency_days=math.fsum(latencies) / len(latencies) if latencies else None,
        entropy=entropy([counts[k] for k in sorted(counts)]),
        latencies=tuple(latencies),
        unmatched=tuple(unmatched),
        counts=dict(counts),
    )


# ---------------------------------------------------------------------------
# Information coefficient (A/B/C test)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ICRow:
    model: str
    r: float
    p: float
    n: int

    def to_dict(self) -> dict:
        return {"model": self.model, "r": self.r, "p": self.p, "n": self.n}


def information_coefficients(models: Mapping[str, Sequence[float]], index: Sequence[float]) -> List[ICRow]:
    """Pearson correlation of each sentiment sequence with the index change, in model order."""
    if not models:
        raise InputError("no sentiment sequences given")
    n = len(index)
    rows = []
    for name, values in models.items():
        if len(values) != n:
            raise InputError(f"model {name}: {len(values)} values for {n} index changes")
        r, p = pearson(values, index)
        rows.append(ICRow(name, r, p, n))
    return rows


def ordering_holds(rows: Sequence[ICRow]) -> bool:
    """True when r is strictly decreasing in the listed model order."""
    return all(a.r > b.r for a, b in zip(rows, rows[1:]))
