"""
Affect dynamics: power-law emotional decay, post-holiday multipliers, shock
response with loss-aversion asymmetry, and the satellite interaction models
(FOMO, greed, uncertainty, regret) together with their calibration fits.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import constants as C
from .cogvec import CognitiveVector
from .errors import ConfigError, InputError, NumericError
from .macrostate import Quadrant
from .stats import RegressionFit, ols, welch_t_one_tailed

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Decay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayTable:
    """Per-dimension exponent and activation threshold; absent dims never decay."""

    alpha: Mapping[str, float] = field(default_factory=lambda: dict(C.DECAY_ALPHA))
    threshold: Mapping[str, float] = field(default_factory=lambda: dict(C.DECAY_THRESHOLD))
    beta0: float = C.DECAY_BETA0
    beta2: float = C.DECAY_BETA2

    def __post_init__(self) -> None:
        for dim, a in self.alpha.items():
            if not (math.isfinite(a) and a >= 0):
                raise ConfigError(f"[decay] alpha for {dim!r} must be >= 0, got {a!r}")
        for dim, th in self.threshold.items():
            if not 0.0 <= th <= 1.0:
                raise ConfigError(f"[decay] threshold for {dim!r} must be in [0, 1], got {th!r}")
        object.__setattr__(self, "alpha", dict(self.alpha))
        object.__setattr__(self, "threshold", dict(self.threshold))

    @classmethod
    def from_dict(cls, section: Mapping) -> "DecayTable":
        return cls(
            alpha={k: float(v) for k, v in section.get("alpha", {}).items()},
            threshold={k: float(v) for k, v in section.get("threshold", {}).items()},
            beta0=float(section.get("beta0", C.DECAY_BETA0)),
            beta2=float(section.get("beta2", C.DECAY_BETA2)),
        )

    @property
    def dims(self) -> Tuple[str, ...]:
        return tuple(sorted(set(self.alpha) | set(self.threshold)))

    def alpha_for(self, dim: str) -> float:
        return self.alpha.get(dim, 0.0)

    def threshold_for(self, dim: str) -> float:
        return self.threshold.get(dim, 0.0)


def decay(e_t: float, t: float, dim: str, table: DecayTable) -> float:
    """
    ``exp(beta0) * T**-alpha * E_t**beta2`` clamped to [0, 1].

    Scores at or below the dimension's activation threshold are returned
    unchanged.
    """
    if not t >= 1:
        raise InputError(f"elapsed days must be >= 1, got {t!r}")
    if e_t == 0:
        return 0.0
    if not 0 < e_t <= 1:
        raise InputError(f"decay needs E_t in (0, 1], got {dim}={e_t!r}")
    if e_t <= table.threshold_for(dim):
        return e_t
    value = math.exp(table.beta0) * t ** (-table.alpha_for(dim)) * e_t ** table.beta2
    return min(max(value, 0.0), 1.0)


def signed_decay(score: float, t: float, dim: str, table: DecayTable) -> float:
    """Decay the magnitude of a signed score, keeping its sign."""
    if score < 0:
        return -decay(-score, t, dim, table)
    return decay(score, t, dim, table)


def half_life(alpha: float, beta0: float = 0.0, beta2: float = 1.0, e_t: float = 1.0) -> float:
    """Days until E(T) / E_t reaches one half."""
    if alpha <= 0:
        raise NumericError("half-life undefined without decay (alpha <= 0)")
    return (2.0 * math.exp(beta0) * e_t ** (beta2 - 1.0)) ** (1.0 / alpha)


# ---------------------------------------------------------------------------
# Holiday effect
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolidayTable:
    multipliers: Mapping[str, float] = field(default_factory=lambda: dict(C.HOLIDAY_MULTIPLIERS))
    significance: float = C.HOLIDAY_SIGNIFICANCE

    def __post_init__(self) -> None:
        for dim, m in self.multipliers.items():
            if not (math.isfinite(m) and m > 0):
                raise ConfigError(f"[holiday] multiplier for {dim!r} must be > 0, got {m!r}")
        object.__setattr__(self, "multipliers", dict(self.multipliers))

    @classmethod
    def from_dict(cls, section: Mapping) -> "HolidayTable":
        return cls(
            multipliers={k: float(v) for k, v in section.get("multipliers", {}).items()},
            significance=float(section.get("significance", C.HOLIDAY_SIGNIFICANCE)),
        )

    def multiplier_for(self, dim: str) -> float:
        return self.multipliers.get(dim, 1.0)


def holiday_adjust(value: float, dim: str, is_post_holiday: bool, table: HolidayTable) -> float:
    if not is_post_holiday:
        return value
    return value * table.multiplier_for(dim)


@dataclass(frozen=True)
class HolidayTestResult:
    t: float
    p: float
    mean_holiday: float
    mean_normal: float
    ratio: float
    multiplier: float

    def to_dict(self) -> dict:
        return {
            "t": round(self.t, 4),
            "p": self.p,
            "avg_holiday": round(self.mean_holiday, 6),
            "avg_normal": round(self.mean_normal, 6),
            "ratio": round(self.ratio, 4),
            "significant": self.multiplier != 1.0,
            "multiplier": round(self.multiplier, 4),
        }


def holiday_multiplier(ratio: float, p: float, alpha: float = C.HOLIDAY_SIGNIFICANCE) -> float:
    """Accept the volatility ratio only when the one-tailed test is significant."""
    return ratio if p < alpha else 1.0


def holiday_test(
    post_holiday_revs: Sequence[float],
    normal_revs: Sequence[float],
    alpha: float = C.HOLIDAY_SIGNIFICANCE,
) -> HolidayTestResult:
    """Welch one-tailed test of H1: mean(post-holiday) > mean(normal)."""
    t, p = welch_t_one_tailed(post_holiday_revs, normal_revs)
    mean_h = float(np.mean(post_holiday_revs))
    mean_n = float(np.mean(normal_revs))
    if mean_n == 0:
        raise NumericError("holiday ratio undefined: normal-day mean is zero")
    ratio = mean_h / mean_n
    return HolidayTestResult(
        t=t, p=p, mean_holiday=mean_h, mean_normal=mean_n,
        ratio=ratio, multiplier=holiday_multiplier(ratio, p, alpha),
    )


# ---------------------------------------------------------------------------
# Shock response
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShockConfig:
    mdi_threshold: float = C.MDI_FRAGILITY_THRESHOLD
    vectors: Mapping[str, Mapping[str, float]] = field(
        default_factory=lambda: {k: dict(v) for k, v in C.SHOCK_VECTORS.items()}
    )
    loss_aversion: float = C.LOSS_AVERSION

    def __post_init__(self) -> None:
        if not self.loss_aversion >= 1.0:
            raise ConfigError(f"[shock] loss_aversion must be >= 1, got {self.loss_aversion!r}")
        if not self.mdi_threshold > 0:
            raise ConfigError(f"[shock] mdi_threshold must be > 0, got {self.mdi_threshold!r}")
        object.__setattr__(
            self, "vectors", {k: {d: float(x) for d, x in v.items()} for k, v in self.vectors.items()}
        )

    @classmethod
    def from_dict(cls, section: Mapping) -> "ShockConfig":
        return cls(
            mdi_threshold=float(section.get("mdi_threshold", C.MDI_FRAGILITY_THRESHOLD)),
            vectors=section.get("vectors", {}),
            loss_aversion=float(section.get("loss_aversion", C.LOSS_AVERSION)),
        )

    @property
    def dims(self) -> Tuple[str, ...]:
        return tuple(sorted({d for v in self.vectors.values() for d in v}))


def fragility(current_mdi: float, mdi_threshold: float = C.MDI_FRAGILITY_THRESHOLD) -> bool:
    return current_mdi > mdi_threshold


def apply_shock(
    state: CognitiveVector,
    event_class: str,
    cfg: ShockConfig,
    current_mdi: float,
) -> Tuple[CognitiveVector, bool]:
    """
    Add the event's shock vector; negative components are scaled by the
    loss-aversion factor and every result is clamped to [-1, 1].

    Returns the new vector and whether the market was fragile
    (MDI above threshold) when the shock landed.
    """
    try:
        delta = cfg.vectors[event_class]
    except KeyError:
        raise InputError(f"unknown event class {event_class!r}") from None

    updates: Dict[str, float] = {}
    for dim, d in delta.items():
        if dim not in state.registry:
            raise InputError(f"shock {event_class!r} targets unknown dimension {dim!r}")
        if d < 0:
            d *= cfg.loss_aversion
        updates[dim] = min(max(state.get(dim) + d, C.SCORE_MIN), C.SCORE_MAX)

    fragile = fragility(current_mdi, cfg.mdi_threshold)
    if fragile:
        logger.info("shock %r on a fragile market (mdi=%.4f)", event_class, current_mdi)
    return state.with_scores(updates), fragile


# ---------------------------------------------------------------------------
# Satellite interaction models
# ---------------------------------------------------------------------------

_TERM_NAMES = {
    "fomo": ("c1", "c2", "c3", "c4", "c5"),
    "greed": ("c1", "c2", "c3", "c4", "c5"),
    "uncertainty": ("u1", "u2", "u3"),
    "regret": ("r1", "r2", "r3"),
}


@dataclass(frozen=True)
class SatelliteCoeffs:
    fomo: Tuple[float, ...] = C.FOMO_COEFFS
    greed: Tuple[float, ...] = C.GREED_COEFFS
    uncertainty: Tuple[float, ...] = C.UNCERTAINTY_COEFFS
    regret: Tuple[float, ...] = C.REGRET_COEFFS

    def __post_init__(self) -> None:
        for model, names in _TERM_NAMES.items():
            values = tuple(float(v) for v in getattr(self, model))
            if len(values) != len(names):
                raise ConfigError(f"[satellite] {model} needs {len(names)} coefficients, got {len(values)}")
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(f"[satellite] {model} coefficients must be finite")
            object.__setattr__(self, model, values)

    def updated(self, model: str, values: Union[Sequence[float], Mapping[str, float]]) -> "SatelliteCoeffs":
        """Replace one model's coefficients, wholesale (list) or by term name (mapping)."""
        if model not in _TERM_NAMES:
            raise ConfigError(f"[satellite] unknown model {model!r}")
        if isinstance(values, Mapping):
            current = list(getattr(self, model))
            names = _TERM_NAMES[model]
            for term, v in values.items():
                if term not in names:
                    raise ConfigError(f"[satellite] {model} has no term {term!r}")
                current[names.index(term)] = float(v)
            values = current
        fields = {m: getattr(self, m) for m in _TERM_NAMES}
        fields[model] = tuple(values)
        return SatelliteCoeffs(**fields)

    def active(self, model: str) -> bool:
        """False when every coefficient of *model* is zero."""
        if model not in _TERM_NAMES:
            raise ConfigError(f"[satellite] unknown model {model!r}")
        return any(c != 0.0 for c in getattr(self, model))

    def to_dict(self) -> dict:
        return {
            model: dict(zip(names, getattr(self, model)))
            for model, names in _TERM_NAMES.items()
        }


SATELLITE_2015 = SatelliteCoeffs()
SATELLITE_2021 = SatelliteCoeffs(
    fomo=C.FOMO_COEFFS_2021,
    greed=C.GREED_COEFFS_2021,
    uncertainty=C.UNCERTAINTY_COEFFS_2021,
    regret=C.REGRET_COEFFS_2021,
)
SATELLITE_SETS = {"2015": SATELLITE_2015, "2021": SATELLITE_2021}
ZERO_SATELLITE = SatelliteCoeffs((0.0,) * 5, (0.0,) * 5, (0.0,) * 3, (0.0,) * 3)


@dataclass(frozen=True)
class SatelliteRegimes:
    """Base coefficient set plus per-quadrant replacements."""

    base: SatelliteCoeffs = SATELLITE_2015
    by_quadrant: Mapping[Quadrant, SatelliteCoeffs] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, section: Mapping) -> "SatelliteRegimes":
        name = str(section.get("coefficient_set", "2015"))
        if name not in SATELLITE_SETS:
            raise ConfigError(f"[satellite] unknown coefficient_set {name!r}; choose from {sorted(SATELLITE_SETS)}")
        base = SATELLITE_SETS[name]
        for model in _TERM_NAMES:
            if model in section:
                base = base.updated(model, section[model])

        by_quadrant: Dict[Quadrant, SatelliteCoeffs] = {}
        for key, models in section.get("regimes", {}).items():
            try:
                quadrant = Quadrant.parse(key)
            except InputError as exc:
                raise ConfigError(f"[satellite.regimes] {exc}") from None
            coeffs = base
            for model, values in models.items():
                coeffs = coeffs.updated(model, values)
            by_quadrant[quadrant] = coeffs
        return cls(base=base, by_quadrant=by_quadrant)

    def coeffs_for(self, quadrant: Optional[Quadrant]) -> SatelliteCoeffs:
        if quadrant is None:
            return self.base
        return self.by_quadrant.get(quadrant, self.base)


class SatelliteOutput(NamedTuple):
    fomo: float
    greed: float
    d_uncertainty: float
    regret: float


def _clamp(x: float) -> float:
    return min(max(x, C.SCORE_MIN), C.SCORE_MAX)


def satellite_step(
    joy: float,
    v_joy: float,
    mcfi: float,
    regret_lag: float,
    v_mdi: float,
    coeffs: SatelliteCoeffs,
) -> SatelliteOutput:
    """Evaluate the four interaction models; outputs clamped to [-1, 1]."""
    f = coeffs.fomo
    g = coeffs.greed
    u = coeffs.uncertainty
    r = coeffs.regret
    fomo = f[0] * joy + f[1] * v_joy + f[2] * mcfi + f[3] * joy * mcfi + f[4] * v_joy * mcfi
    greed = g[0] * joy + g[1] * v_joy + g[2] * mcfi + g[3] * joy * mcfi + g[4] * v_joy * mcfi
    d_unc = u[0] * v_mdi + u[1] * mcfi + u[2] * v_mdi * mcfi
    regret = r[0] * regret_lag + r[1] * mcfi + r[2] * regret_lag * mcfi
    return SatelliteOutput(_clamp(fomo), _clamp(greed), _clamp(d_unc), _clamp(regret))


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    alpha: float
    beta0: float
    beta2: float
    r_squared: float
    fit: RegressionFit

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta0": self.beta0,
            "beta2": self.beta2,
            "r_squared": self.r_squared,
            "regression": self.fit.to_dict(),
        }


def fit_decay(samples: Sequence[Tuple[float, float, float]]) -> DecayFit:
    """Log-linear OLS: ln E_{t+T} = b0 + b1 ln T + b2 ln E_t, alpha = -b1."""
    rows = np.asarray(samples, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise InputError("decay samples must be (E_t, T, E_t+T) triples")
    if rows.shape[0] < C.MIN_DECAY_SAMPLES:
        raise InputError(f"decay fit needs at least {C.MIN_DECAY_SAMPLES} samples, got {rows.shape[0]}")
    e_t, t, e_next = rows.T
    if np.any(e_t <= 0) or np.any(e_next <= 0):
        raise InputError("decay samples need strictly positive emotion scores")
    if np.any(t < 1):
        raise InputError("decay samples need elapsed days T >= 1")

    design = np.column_stack([np.log(t), np.log(e_t)])
    fit = ols(design, np.log(e_next), intercept=True, names=("ln_T", "ln_E_t"))
    b0, b1, b2 = (float(c) for c in fit.coefficients)
    return DecayFit(alpha=-b1, beta0=b0, beta2=b2, r_squared=fit.r_squared, fit=fit)


def fit_satellite(rows: Sequence[Tuple[float, float, float, float]]) -> RegressionFit:
    """OLS for Y = c1 X + c2 V_X + c3 MCFI + c4 X*MCFI + c5 V_X*MCFI (no intercept)."""
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise InputError("satellite rows must be (Y, X, V_X, MCFI) tuples")
    if data.shape[0] < C.MIN_SATELLITE_ROWS:
        raise InputError(f"satellite fit needs at least {C.MIN_SATELLITE_ROWS} rows, got {data.shape[0]}")
    y, x, vx, m = data.T
    design = np.column_stack([x, vx, m, x * m, vx * m])
    return ols(design, y, names=_TERM_NAMES["fomo"])
