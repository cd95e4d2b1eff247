"""Cognitive market library -- state ingestion, volatility, strategy, backtesting and text statistics."""

__version__ = "1.0.0"

from .backtest import BacktestConfig, BacktestResult, PriceSeries, simulate_portfolio
from .cogvec import CognitiveVector, DimensionRegistry, Persona, PersonaDayState, aggregate_daily
from .errors import CoglabError, ConfigError, InputError, NumericError
from .garch import GarchParams, ParamArsenal, gjr_step, pir_simulate, run_volatility
from .ingest import ModelConfig, load_model_config, load_reports, parse_csd_report
from .macrostate import MacroState, Quadrant, macro_table
from .pipeline import run_backtest
from .strategy import Signal, StrategyConfig, run_strategy

__all__ = [
    "BacktestConfig",
    "BacktestResult",
    "CognitiveVector",
    "CoglabError",
    "ConfigError",
    "DimensionRegistry",
    "GarchParams",
    "InputError",
    "MacroState",
    "ModelConfig",
    "NumericError",
    "ParamArsenal",
    "Persona",
    "PersonaDayState",
    "PriceSeries",
    "Quadrant",
    "Signal",
    "StrategyConfig",
    "aggregate_daily",
    "gjr_step",
    "load_model_config",
    "load_reports",
    "macro_table",
    "parse_csd_report",
    "pir_simulate",
    "run_backtest",
    "run_strategy",
    "simulate_portfolio",
]
