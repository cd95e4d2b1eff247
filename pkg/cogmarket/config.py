"""
Model configuration file support.

A config file is TOML (``.toml``) or JSON (``.json``) with one section per
module::

    strict_ranges = false

    [registry]
    labels = ["joy", "sadness", ...]   # default: the 17 canonical dimensions
    extensible = false                 # accept unknown dimensions in reports
    clamp_on_ingest = false            # clamp out-of-range scores instead of failing

    [arsenal.B]
    beta = [0.80, 0.90]                # a (lo, hi) range ...
    alpha_neg = 0.18                   # ... or a fixed selection override

    [decay.alpha]
    fear = 0.32

    [shock]
    mdi_threshold = 1.2
    loss_aversion = 1.5

The path comes from ``--config``, else ``$COGLAB_CONFIG``; with neither, the
built-in defaults apply.  User values are deep-merged over ``DEFAULTS``.
"""
from __future__ import annotations

import copy
import json
import logging
import os
import tomllib
from typing import Any, Dict, Optional

from . import constants as C
from .errors import ConfigError

logger = logging.getLogger(__name__)

ENV_VAR = "COGLAB_CONFIG"


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------

def _arsenal_defaults() -> Dict[str, Any]:
    return {
        q: {
            "core": row["core"],
            "omega": list(row["omega"]),
            "alpha": list(row["alpha"]),
            "alpha_neg": list(row["alpha_neg"]),
            "beta": list(row["beta"]),
        }
        for q, row in C.ARSENAL_RANGES.items()
    }


DEFAULTS: Dict[str, Any] = {
    "strict_ranges": False,
    "registry": {
        "labels": list(C.DEFAULT_LABELS),
        "extensible": False,
        "clamp_on_ingest": False,
    },
    "macro": {
        "mcfi_alpha": C.MCFI_ALPHA,
        "lag": C.DYNAMICS_LAG,
    },
    "quadrants": {
        "bandwidth": C.QUADRANT_BANDWIDTH,
        # (mdi, mcfi, v_mdi, v_mcfi, meta)
        "prototypes": {
            "A": [0.20, 0.70, 0.00, 0.10, 0.10],
            "B": [1.00, 0.20, 0.30, -0.10, 0.20],
            "C": [0.20, 0.00, -0.10, -0.10, 0.10],
            "D": [0.40, 0.10, 0.00, -0.05, 0.20],
            "E": [0.80, 0.05, 0.10, -0.10, 0.30],
            "F": [0.50, 0.40, 0.00, 0.05, 0.30],
        },
    },
    "arsenal": _arsenal_defaults(),
    "garch": {
        "h0": C.GARCH_H0,
        "innovation": "difference",
        "strict_stationarity": False,
        "dims": [],                     # empty: every registry dimension
        "feedback": {
            "enabled": True,
            "z": C.FEEDBACK_Z,
            "gain": C.FEEDBACK_GAIN,
        },
    },
    "decay": {
        "beta0": C.DECAY_BETA0,
        "beta2": C.DECAY_BETA2,
        "alpha": dict(C.DECAY_ALPHA),
        "threshold": dict(C.DECAY_THRESHOLD),
    },
    "holiday": {
        "multipliers": dict(C.HOLIDAY_MULTIPLIERS),
        "significance": C.HOLIDAY_SIGNIFICANCE,
    },
    "shock": {
        "mdi_threshold": C.MDI_FRAGILITY_THRESHOLD,
        "loss_aversion": C.LOSS_AVERSION,
        "vectors": copy.deepcopy(C.SHOCK_VECTORS),
    },
    "satellite": {
        # named base set; [satellite] fomo = [...] etc. replace it per model
        "coefficient_set": "2015",
        "regimes": {
            "A": {"fomo": {"c1": C.BULL_FOMO_JOY}},
            "F": {"fomo": {"c1": C.BULL_FOMO_JOY}},
        },
    },
    "simulation": {
        "noise_sd": 0.0,
    },
    "strategy": {
        "fear_stop_base": C.FEAR_STOP_BASE,
        "fear_stop_floor": C.FEAR_STOP_FLOOR,
        "h_ref": C.H_REF,
        "h_scale": C.H_SCALE,
        "mdi_max": C.BUY_MDI_MAX,
        "mcfi_min": C.BUY_MCFI_MIN,
        "spike_multiple": C.SPIKE_MULTIPLE,
        "spike_window": C.SPIKE_WINDOW,
        "spike_floor": C.SPIKE_FLOOR,
        "prepare_mdi_min": C.PREPARE_MDI_MIN,
        "prepare_dims": list(C.PREPARE_DIMS),
        "positions": dict(C.POSITION_MAP),
    },
    "backtest": {
        "cost_rate": C.COST_RATE,
        "risk_free_annual": C.RISK_FREE_ANNUAL,
        "risk_free_daily": C.RISK_FREE_DAILY,
        "annualize": False,
        "periods_per_year": C.TRADING_DAYS,
        "signal_window_days": C.SIGNAL_WINDOW_DAYS,
    },
    "textlab": {
        "slang_p": C.SLANG_P,
        "leap_threshold": C.SEMANTIC_LEAP_THRESHOLD,
        "bins": C.HISTOGRAM_BINS,
        "base_length": C.OSC_BASE_LENGTH,
        "amplitude": C.OSC_AMPLITUDE,
        "omega": C.OSC_OMEGA,
        "noise": C.OSC_NOISE,
        "fragment_rate": C.FRAGMENT_RATE,
        "run_on_rate": C.RUN_ON_RATE,
    },
}


# ---------------------------------------------------------------------------
# Read
# ---------------------------------------------------------------------------

def config_path(cli_path: Optional[str] = None) -> Optional[str]:
    """``--config`` wins, then ``$COGLAB_CONFIG``, else ``None``."""
    if cli_path:
        return cli_path
    env = os.environ.get(ENV_VAR, "").strip()
    return env or None


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive merge; *override* wins.  Neither argument is mutated."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse one TOML or JSON config file."""
    suffix = os.path.splitext(path)[1].lower()
    try:
        if suffix == ".toml":
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        elif suffix == ".json":
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            raise ConfigError(f"{path}: config must be .toml or .json")
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc

    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    return data


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """Defaults merged with the resolved config file (if any)."""
    resolved = config_path(path)
    if resolved is None:
        logger.debug("no config file; using built-in defaults")
        return copy.deepcopy(DEFAULTS)
    logger.info("loading config from %s", resolved)
    return deep_merge(DEFAULTS, read_config_file(resolved))
