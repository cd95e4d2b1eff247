"""
End-to-end backtest: day states -> macro table -> fear volatility ->
signals -> friction-aware portfolio.

The signal computed from the close of day t sets the exposure that earns
the market return of day t+1; nothing here reads a later day.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .backtest import (
    BacktestResult,
    DefensiveAlpha,
    MarketEvent,
    PerformanceMetrics,
    PriceSeries,
    defensive_alpha,
    metrics,
    return_difference_test,
    signal_quality,
    simulate_portfolio,
)
from .cogvec import PersonaDayState
from .errors import InputError, NumericError
from .garch import ParamDriftLog, run_volatility
from .macrostate import MacroRow, macro_table
from .strategy import DayInput, StrategyConfig, StrategyStep, run_strategy, strategy_frame

if TYPE_CHECKING:
    from .ingest import ModelConfig

logger = logging.getLogger(__name__)


@dataclass
class BacktestRun:
    mode: str
    rows: List[MacroRow]
    h_fear: np.ndarray
    drift: ParamDriftLog
    steps: List[StrategyStep]
    result: BacktestResult
    performance: PerformanceMetrics

    def signals_frame(self) -> pd.DataFrame:
        frame = strategy_frame(self.steps)
        frame.insert(1, "h_fear", self.h_fear)
        return frame


def _check_aligned(prices: PriceSeries, days: Sequence[PersonaDayState]) -> None:
    if len(days) != len(prices):
        raise InputError(f"{len(days)} day states for {len(prices)} price dates")
    for d, p in zip(days, prices.dates):
        if d.date != p:
            raise InputError(f"day state {d.date} does not match price date {p}")


def _momentum(prev: Optional[PersonaDayState], cur: PersonaDayState, dims: Sequence[str]) -> float:
    if prev is None:
        return 0.0
    return sum(cur.veteran.get(d) - prev.veteran.get(d) for d in dims if d in cur.registry)


def strategy_inputs(
    days: Sequence[PersonaDayState],
    rows: Sequence[MacroRow],
    h_fear: Sequence[float],
    strategy: StrategyConfig,
) -> List[DayInput]:
    stream = []
    history: List[float] = []
    prev = None
    for t, (day, row) in enumerate(zip(days, rows)):
        v_mdi = row.dynamics.v_mdi
        stream.append(DayInput(
            date=day.date,
            novice_fear=day.novice.get("fear"),
            mdi=row.state.mdi,
            mcfi=row.state.mcfi,
            v_mdi=v_mdi,
            h_fear=float(h_fear[t]),
            veteran_momentum=_momentum(prev, day, strategy.prepare_dims),
            novice_mood=day.novice.mood(),
            v_mdi_history=tuple(history),
            is_first=t == 0,
        ))
        if v_mdi is not None:
            history.append(v_mdi)
        prev = day
    return stream


def run_backtest(
    prices: PriceSeries,
    days: Sequence[PersonaDayState],
    cfg: "ModelConfig",
    mode: Optional[str] = None,
) -> BacktestRun:
    """One strategy run in *mode* (defaults to the configured strategy mode)."""
    _check_aligned(prices, days)
    strategy = cfg.strategy.with_mode(mode) if mode else cfg.strategy

    rows = macro_table(days, cfg.prototypes, cfg.mcfi_alpha, cfg.lag)
    h_fear, drift = run_volatility(
        [d.novice.get("fear") for d in days],
        [r.membership.dominant for r in rows],
        cfg.arsenal,
        strategy.volatility_mode,
        cfg.garch.h0,
        dim="fear",
        dates=[d.date for d in days],
        innovation=cfg.garch.innovation,
        a_mdi=[r.dynamics.a_mdi for r in rows],
        feedback=cfg.garch.feedback if strategy.volatility_mode == "dynamic" else None,
    )
    steps = run_strategy(strategy_inputs(days, rows, h_fear, strategy), strategy)
    result = simulate_portfolio(prices, [s.exposure for s in steps], cfg.backtest)
    performance = metrics(result, cfg.backtest)
    logger.info("%s: net return %.4f, max drawdown %.4f, %d trades",
                strategy.mode, performance.net_return, performance.max_drawdown, performance.trade_count)
    return BacktestRun(strategy.mode, rows, h_fear, drift, steps, result, performance)


@dataclass(frozen=True)
class Comparison:
    strategy: BacktestRun
    baseline: BacktestRun
    alpha: DefensiveAlpha
    welch_t: Optional[float]
    welch_p: Optional[float]

    def to_dict(self) -> dict:
        out = self.alpha.to_dict()
        out.update({"welch_t": self.welch_t, "welch_p_one_tailed": self.welch_p})
        return out


def compare(strategy: BacktestRun, baseline: BacktestRun, cfg: "ModelConfig") -> Comparison:
    da = defensive_alpha(strategy.result, baseline.result, cfg.backtest)
    try:
        t, p = return_difference_test(strategy.result, baseline.result)
    except NumericError as exc:
        logger.info("return difference test skipped: %s", exc)
        t = p = None
    return Comparison(strategy, baseline, da, t, p)


def run_report(
    run: BacktestRun,
    cfg: "ModelConfig",
    events: Sequence[MarketEvent] = (),
    comparison: Optional[Comparison] = None,
) -> Dict[str, object]:
    """JSON-ready summary of one run."""
    report: Dict[str, object] = {
        "mode": run.mode,
        "days": len(run.steps),
        "first_date": run.steps[0].date.isoformat(),
        "last_date": run.steps[-1].date.isoformat(),
        "metrics": run.performance.to_dict(),
        "trades": [t.to_dict() for t in run.result.trades],
        "signal_quality": signal_quality(run.steps, events, cfg.backtest.signal_window_days).to_dict(),
        "cost_rate": cfg.backtest.cost_rate,
        "annualized_sharpe": cfg.backtest.annualize,
    }
    if comparison is not None:
        report["versus_baseline"] = comparison.to_dict()
    return report
