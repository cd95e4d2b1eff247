"""
Quadrant-switched GJR-GARCH volatility over emotion-dimension innovations.

``run_volatility`` selects parameters day by day from the quadrant path
(dynamic) or uses the cross-quadrant average (static), and records every
selection in a ``ParamDriftLog``.  ``pir_simulate`` rolls a full cognitive
state forward: decay, satellite models, shocks, volatility, macro state.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from . import constants as C
from .affect import apply_shock, satellite_step, signed_decay
from .cogvec import CognitiveVector, Persona, PersonaDayState
from .errors import ConfigError, InputError, NumericError
from .macrostate import (
    QUADRANT_ORDER,
    MacroDynamics,
    MacroState,
    Quadrant,
    QuadrantMembership,
    macro_state,
    quadrant_membership,
)

if TYPE_CHECKING:
    from .ingest import ModelConfig

logger = logging.getLogger(__name__)

MODES = ("dynamic", "static")
INNOVATIONS = ("difference", "residual")
_PARAM_NAMES = ("omega", "alpha", "alpha_neg", "beta")


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    alpha_neg: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ConfigError(f"garch omega must be > 0, got {self.omega!r}")
        for name in ("alpha", "alpha_neg", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"garch {name} must be >= 0, got {value!r}")

    @property
    def persistence(self) -> float:
        return self.alpha + self.alpha_neg / 2.0 + self.beta

    @property
    def is_stationary(self) -> bool:
        return self.persistence < 1.0

    @property
    def long_run_variance(self) -> float:
        if not self.is_stationary:
            raise NumericError(f"no long-run variance: persistence {self.persistence:.4f} >= 1")
        return self.omega / (1.0 - self.persistence)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _PARAM_NAMES}


def gjr_step(h_prev: float, eps_prev: float, p: GarchParams) -> float:
    """``omega + alpha*eps^2 + alpha_neg*eps^2*[eps<0] + beta*h_prev``."""
    if h_prev < 0:
        raise InputError(f"conditional variance must be >= 0, got {h_prev!r}")
    e2 = eps_prev * eps_prev
    h = p.omega + p.alpha * e2 + p.beta * h_prev
    if eps_prev < 0:
        h += p.alpha_neg * e2
    return h


@dataclass(frozen=True)
class ParamRange:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo > self.hi:
            raise ConfigError(f"invalid parameter range [{self.lo}, {self.hi}]")

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class QuadrantParams:
    """Ranges for one quadrant plus optional fixed selections."""

    core: str
    ranges: Mapping[str, ParamRange]
    overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [n for n in _PARAM_NAMES if n not in self.ranges]
        if missing:
            raise ConfigError(f"arsenal entry missing ranges for {missing}")
        unknown = [n for n in self.overrides if n not in _PARAM_NAMES]
        if unknown:
            raise ConfigError(f"arsenal override for unknown parameter(s) {unknown}")

    def selection(self) -> GarchParams:
        values = {
            name: self.overrides.get(name, self.ranges[name].midpoint)
            for name in _PARAM_NAMES
        }
        return GarchParams(**values)


@dataclass(frozen=True)
class ParamArsenal:
    quadrants: Mapping[Quadrant, QuadrantParams]

    def __post_init__(self) -> None:
        for q in QUADRANT_ORDER:
            if q not in self.quadrants:
                raise ConfigError(f"parameter arsenal has no entry for {q.value}")

    @classmethod
    def from_dict(
        cls,
        section: Mapping,
        *,
        strict_ranges: bool = False,
        strict_stationarity: bool = False,
    ) -> "ParamArsenal":
        """
        Each quadrant maps a parameter to ``[lo, hi]`` or to a scalar
        selection override.  With *strict_ranges* both must stay inside the
        calibrated ranges.
        """
        quadrants: Dict[Quadrant, QuadrantParams] = {}
        for key, entry in section.items():
            try:
                q = Quadrant.parse(key)
            except InputError as exc:
                raise ConfigError(f"[arsenal] {exc}") from None
            documented = C.ARSENAL_RANGES[q.letter]
            ranges: Dict[str, ParamRange] = {}
            overrides: Dict[str, float] = {}
            for name in _PARAM_NAMES:
                raw = entry.get(name, documented[name])
                if isinstance(raw, (int, float)):
                    overrides[name] = float(raw)
                    ranges[name] = ParamRange(*documented[name])
                else:
                    if len(raw) != 2:
                        raise ConfigError(f"[arsenal.{q.letter}] {name} must be [lo, hi] or a number")
                    ranges[name] = ParamRange(float(raw[0]), float(raw[1]))
            if strict_ranges:
                _check_documented(q, ranges, overrides)
            qp = QuadrantParams(core=str(entry.get("core", documented["core"])), ranges=ranges, overrides=overrides)
            sel = qp.selection()
            if strict_stationarity and not sel.is_stationary:
                raise ConfigError(
                    f"[arsenal.{q.letter}] selection not covariance-stationary "
                    f"(persistence {sel.persistence:.4f})"
                )
            quadrants[q] = qp
        return cls(quadrants)

    def selection(self, quadrant: Quadrant) -> GarchParams:
        return self.quadrants[quadrant].selection()

    def static_selection(self) -> GarchParams:
        sels = [self.selection(q) for q in QUADRANT_ORDER]
        return GarchParams(**{
            name: math.fsum(getattr(s, name) for s in sels) / len(sels)
            for name in _PARAM_NAMES
        })


def _check_documented(q: Quadrant, ranges: Mapping[str, ParamRange], overrides: Mapping[str, float]) -> None:
    documented = C.ARSENAL_RANGES[q.letter]
    for name in _PARAM_NAMES:
        allowed = ParamRange(*documented[name])
        r = ranges[name]
        if r.lo not in allowed or r.hi not in allowed:
            raise ConfigError(
                f"[arsenal.{q.letter}] {name} range [{r.lo}, {r.hi}] outside calibrated "
                f"[{allowed.lo}, {allowed.hi}]"
            )
        if name in overrides and overrides[name] not in allowed:
            raise ConfigError(
                f"[arsenal.{q.letter}] {name} override {overrides[name]} outside calibrated "
                f"[{allowed.lo}, {allowed.hi}]"
            )


def select_params(quadrant: Quadrant, arsenal: ParamArsenal, mode: str = "dynamic") -> GarchParams:
    """Dynamic: the quadrant's selection.  Static: mean of all six selections."""
    if mode == "static":
        return arsenal.static_selection()
    if mode != "dynamic":
        raise ConfigError(f"unknown volatility mode {mode!r}; choose from {MODES}")
    if not isinstance(quadrant, Quadrant):
        quadrant = Quadrant.parse(quadrant)
    return arsenal.selection(quadrant)


# ---------------------------------------------------------------------------
# Engine configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeedbackConfig:
    """Deviation correction: amplify alpha_neg on abnormal MDI acceleration."""

    enabled: bool = True
    z: float = C.FEEDBACK_Z
    gain: float = C.FEEDBACK_GAIN
    min_history: int = C.FEEDBACK_MIN_HISTORY

    def __post_init__(self) -> None:
        if self.z <= 0 or self.gain < 1 or self.min_history < 2:
            raise ConfigError("[garch.feedback] needs z > 0, gain >= 1 and min_history >= 2")


@dataclass(frozen=True)
class GarchConfig:
    h0: float = C.GARCH_H0
    innovation: str = "difference"
    strict_stationarity: bool = False
    dims: Tuple[str, ...] = ()
    feedback: FeedbackConfig = field(default_factory=FeedbackConfig)

    def __post_init__(self) -> None:
        if not self.h0 >= 0:
            raise ConfigError(f"[garch] h0 must be >= 0, got {self.h0!r}")
        if self.innovation not in INNOVATIONS:
            raise ConfigError(f"[garch] innovation must be one of {INNOVATIONS}, got {self.innovation!r}")

    @classmethod
    def from_dict(cls, section: Mapping) -> "GarchConfig":
        fb = section.get("feedback", {})
        return cls(
            h0=float(section.get("h0", C.GARCH_H0)),
            innovation=str(section.get("innovation", "difference")),
            strict_stationarity=bool(section.get("strict_stationarity", False)),
            dims=tuple(section.get("dims", ())),
            feedback=FeedbackConfig(
                enabled=bool(fb.get("enabled", True)),
                z=float(fb.get("z", C.FEEDBACK_Z)),
                gain=float(fb.get("gain", C.FEEDBACK_GAIN)),
                min_history=int(fb.get("min_history", C.FEEDBACK_MIN_HISTORY)),
            ),
        )


# ---------------------------------------------------------------------------
# Drift log
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftRecord:
    date: Optional[date]
    dim: str
    quadrant: str
    omega: float
    alpha: float
    alpha_neg: float
    beta: float
    h: float
    corrected: bool = False


@dataclass
class ParamDriftLog:
    records: List[DriftRecord] = field(default_factory=list)

    def append(self, record: DriftRecord) -> None:
        self.records.append(record)

    def extend(self, other: "ParamDriftLog") -> None:
        self.records.extend(other.records)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> List:
        return [getattr(r, name) for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        columns = ["date", "dim", "quadrant", "omega", "alpha", "alpha_neg", "beta", "h", "corrected"]
        rows = [
            {
                **{c: getattr(r, c) for c in columns},
                "date": r.date.isoformat() if r.date else "",
            }
            for r in self.records
        ]
        return pd.DataFrame(rows, columns=columns)


# ---------------------------------------------------------------------------
# Volatility path
# ---------------------------------------------------------------------------

def innovations(series: Sequence[float], kind: str = "difference") -> np.ndarray:
    """Per-day innovation; index 0 is always 0."""
    x = np.asarray(series, dtype=float)
    eps = np.zeros_like(x)
    if kind == "difference":
        eps[1:] = np.diff(x)
    elif kind == "residual":
        # deviation from the expanding mean of earlier observations
        eps[1:] = x[1:] - np.cumsum(x)[:-1] / np.arange(1, len(x))
    else:
        raise ConfigError(f"unknown innovation {kind!r}; choose from {INNOVATIONS}")
    return eps


def _feedback_fires(a_mdi: Sequence[Optional[float]], t: int, fb: FeedbackConfig) -> bool:
    current = a_mdi[t]
    if current is None:
        return False
    history = [a for a in a_mdi[:t] if a is not None]
    if len(history) < fb.min_history:
        return False
    sd = float(np.std(history))
    if sd == 0:
        return False
    return (current - float(np.mean(history))) / sd > fb.z


def run_volatility(
    series: Sequence[float],
    quadrant_path: Sequence[Quadrant],
    arsenal: ParamArsenal,
    mode: str = "dynamic",
    h0: float = C.GARCH_H0,
    *,
    dim: str = "fear",
    dates: Optional[Sequence[date]] = None,
    innovation: str = "difference",
    a_mdi: Optional[Sequence[Optional[float]]] = None,
    feedback: Optional[FeedbackConfig] = None,
) -> Tuple[np.ndarray, ParamDriftLog]:
    """
    Conditional-variance path for one dimension.

    ``h[0] = h0``; afterwards ``h[t] = gjr_step(h[t-1], eps[t], params(q[t]))``.
    When *a_mdi* and an enabled *feedback* are given, ``alpha_neg`` is scaled
    by the feedback gain on days whose MDI acceleration is an outlier.
    """
    n = len(series)
    if n < 2:
        raise InputError(f"volatility needs at least 2 observations, got {n}")
    if len(quadrant_path) != n:
        raise InputError(f"quadrant path has {len(quadrant_path)} entries for {n} observations")
    if dates is not None and len(dates) != n:
        raise InputError(f"{len(dates)} dates for {n} observations")
    if a_mdi is not None and len(a_mdi) != n:
        raise InputError(f"{len(a_mdi)} MDI accelerations for {n} observations")
    if h0 < 0:
        raise InputError(f"h0 must be >= 0, got {h0!r}")

    eps = innovations(series, innovation)
    path = [Quadrant.parse(q) for q in quadrant_path]
    h = np.empty(n)
    log = ParamDriftLog()
    use_feedback = a_mdi is not None and feedback is not None and feedback.enabled

    for t in range(n):
        params = select_params(path[t], arsenal, mode)
        corrected = False
        if t == 0:
            h[0] = h0
        else:
            if use_feedback and _feedback_fires(a_mdi, t, feedback):
                params = replace(params, alpha_neg=params.alpha_neg * feedback.gain)
                corrected = True
                logger.debug("%s: feedback correction on %s, alpha_neg -> %.4f",
                             dates[t] if dates else t, dim, params.alpha_neg)
            h[t] = gjr_step(h[t - 1], eps[t], params)
        log.append(DriftRecord(
            date=dates[t] if dates is not None else None,
            dim=dim,
            quadrant=path[t].value if mode == "dynamic" else "static",
            omega=params.omega,
            alpha=params.alpha,
            alpha_neg=params.alpha_neg,
            beta=params.beta,
            h=float(h[t]),
            corrected=corrected,
        ))
    return h, log


# ---------------------------------------------------------------------------
# Freeze predicate
# ---------------------------------------------------------------------------

def freeze_predicate(
    mdi: float,
    liquidity: float,
    mdi_threshold: float = C.FREEZE_MDI,
    liquidity_threshold: float = C.FREEZE_LIQUIDITY,
) -> bool:
    """Cognitive divergence together with a liquidity vacuum."""
    return mdi > mdi_threshold and liquidity < liquidity_threshold


# ---------------------------------------------------------------------------
# Forward simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PirState:
    date: date
    novice: CognitiveVector
    veteran: CognitiveVector
    vol: Mapping[str, float]
    macro: MacroState
    dynamics: MacroDynamics
    membership: QuadrantMembership
    event: Optional[str] = None
    fragile: bool = False
    params: Optional[GarchParams] = None

    def __post_init__(self) -> None:
        for dim, h in self.vol.items():
            if not (math.isfinite(h) and h >= 0):
                raise NumericError(f"{self.date}: conditional variance for {dim} is {h!r}")

    @property
    def quadrant(self) -> Quadrant:
        return self.membership.dominant

    def persona(self, which: Persona) -> CognitiveVector:
        return self.novice if which is Persona.NOVICE else self.veteran

    def to_row(self) -> dict:
        row = {
            "date": self.date.isoformat(),
            "event": self.event or "",
            "fragile": self.fragile,
            "mdi": self.macro.mdi,
            "mcfi": self.macro.mcfi,
            "meta": self.macro.meta,
            "v_mdi": self.dynamics.v_mdi,
            "a_mdi": self.dynamics.a_mdi,
            "dominant": self.quadrant.value,
        }
        for dim, v in self.novice.scores.items():
            row[f"novice_{dim}"] = v
        for dim, v in self.veteran.scores.items():
            row[f"veteran_{dim}"] = v
        for dim, h in self.vol.items():
            row[f"h_{dim}"] = h
        return row


def _vol_dims(cfg: "ModelConfig") -> Tuple[str, ...]:
    return cfg.garch.dims or cfg.registry.labels


def pir_initial(day: PersonaDayState, cfg: "ModelConfig") -> PirState:
    """Known state the forward simulation starts from."""
    state = macro_state(day, cfg.mcfi_alpha)
    dyn = MacroDynamics(day.date)
    membership = quadrant_membership(
        {"mdi": state.mdi, "mcfi": state.mcfi, "meta": state.meta}, cfg.prototypes,
    )
    return PirState(
        date=day.date,
        novice=day.novice,
        veteran=day.veteran,
        vol={d: cfg.garch.h0 for d in _vol_dims(cfg)},
        macro=state,
        dynamics=dyn,
        membership=membership,
    )


def pir_frame(trajectory: Sequence[PirState]) -> pd.DataFrame:
    return pd.DataFrame([s.to_row() for s in trajectory])


def pir_drift(trajectory: Sequence[PirState]) -> ParamDriftLog:
    """Drift log of the parameters each simulated day ran with."""
    log = ParamDriftLog()
    for before, s in zip(trajectory, trajectory[1:]):
        for dim, h in s.vol.items():
            log.append(DriftRecord(
                date=s.date, dim=dim, quadrant=before.quadrant.value,
                omega=s.params.omega, alpha=s.params.alpha,
                alpha_neg=s.params.alpha_neg, beta=s.params.beta, h=h,
            ))
    return log


def _normalize_shocks(shocks: Sequence[Optional[str]], horizon: int) -> List[Optional[str]]:
    if len(shocks) > horizon:
        raise InputError(f"{len(shocks)} scheduled shocks for a {horizon}-day horizon")
    out: List[Optional[str]] = []
    for s in shocks:
        s = (s or "").strip()
        out.append(None if s in ("", "none") else s)
    return out + [None] * (horizon - len(out))


def _lagged_diff(now: Optional[float], then: Optional[float], k: int) -> Optional[float]:
    if now is None or then is None:
        return None
    return (now - then) / k


def pir_simulate(
    initial: PirState,
    shocks: Sequence[Optional[str]],
    horizon: int,
    cfg: "ModelConfig",
    seed: int = 0,
    mode: str = "dynamic",
) -> List[PirState]:
    """
    Roll *initial* forward *horizon* days.

    Each day runs decay, satellite models, the scheduled shock, the GJR
    update and the macro recomputation, in that order.  Decay is measured
    from the last time a dimension was set (initial state, satellite
    output or shock).  Gaussian observation noise (``simulation.noise_sd``)
    is drawn from a generator seeded with *seed* and is off by default.
    """
    if horizon < 0:
        raise InputError(f"horizon must be >= 0, got {horizon}")
    schedule = _normalize_shocks(shocks, horizon)
    for event in schedule:
        if event is not None and event not in cfg.shock.vectors:
            raise InputError(f"unknown event class {event!r}")

    k = cfg.lag
    rng = np.random.default_rng(seed)
    registry = initial.novice.registry
    dims = registry.labels
    vol_dims = tuple(initial.vol)

    anchors = {p: initial.persona(p).scores for p in Persona}
    elapsed = {p: {d: 0 for d in dims} for p in Persona}

    trajectory = [initial]
    prev = initial
    for step in range(horizon):
        today = prev.date + timedelta(days=1)
        prev_q = prev.quadrant

        # decay
        scores: Dict[Persona, Dict[str, float]] = {}
        for p in Persona:
            cur = {}
            for d in dims:
                elapsed[p][d] += 1
                cur[d] = signed_decay(anchors[p][d], 1 + elapsed[p][d], d, cfg.decay)
            scores[p] = cur

        # satellite
        coeffs = cfg.satellite.coeffs_for(prev_q)
        v_mdi = prev.dynamics.v_mdi or 0.0
        for p in Persona:
            before = prev.persona(p)
            cur = scores[p]
            out = satellite_step(
                joy=cur.get("joy", 0.0),
                v_joy=cur.get("joy", 0.0) - before.get("joy"),
                mcfi=prev.macro.mcfi,
                regret_lag=before.get("regret"),
                v_mdi=v_mdi,
                coeffs=coeffs,
            )
            updates = {
                "fomo": out.fomo,
                "greed": out.greed,
                "regret": out.regret,
                "uncertainty": min(max(cur.get("uncertainty", 0.0) + out.d_uncertainty, -1.0), 1.0),
            }
            for d, v in updates.items():
                # a model with all-zero coefficients leaves the decayed level alone
                if d in registry and coeffs.active(d):
                    cur[d] = v
                    anchors[p][d] = v
                    elapsed[p][d] = 0

        vectors = {p: CognitiveVector.from_scores(registry, scores[p]) for p in Persona}

        # shock
        event = schedule[step]
        fragile = False
        if event is not None:
            for p in Persona:
                shocked, fragile = apply_shock(vectors[p], event, cfg.shock, prev.macro.mdi)
                for d in cfg.shock.vectors[event]:
                    anchors[p][d] = shocked.get(d)
                    elapsed[p][d] = 0
                vectors[p] = shocked

        if cfg.noise_sd > 0:
            for p in Persona:
                noisy = vectors[p].values + rng.normal(0.0, cfg.noise_sd, len(dims))
                vectors[p] = CognitiveVector(registry, np.clip(noisy, C.SCORE_MIN, C.SCORE_MAX))

        # volatility
        params = select_params(prev_q, cfg.arsenal, mode)
        vol = {}
        for d in vol_dims:
            eps = (
                (vectors[Persona.NOVICE].get(d) + vectors[Persona.VETERAN].get(d)) / 2.0
                - (prev.novice.get(d) + prev.veteran.get(d)) / 2.0
            )
            vol[d] = gjr_step(prev.vol[d], eps, params)

        # macro
        day_state = PersonaDayState(
            today, vectors[Persona.NOVICE], vectors[Persona.VETERAN], prev.macro.meta,
        )
        state = macro_state(day_state, cfg.mcfi_alpha)
        back = trajectory[-k] if len(trajectory) >= k else None
        v_new = (state.mdi - back.macro.mdi) / k if back is not None else None
        v_mcfi = (state.mcfi - back.macro.mcfi) / k if back is not None else None
        dyn = MacroDynamics(
            date=today,
            v_mdi=v_new,
            v_mcfi=v_mcfi,
            a_mdi=_lagged_diff(v_new, back.dynamics.v_mdi if back is not None else None, k),
            a_mcfi=_lagged_diff(v_mcfi, back.dynamics.v_mcfi if back is not None else None, k),
        )
        membership = quadrant_membership(
            {"mdi": state.mdi, "mcfi": state.mcfi, "v_mdi": v_new, "v_mcfi": v_mcfi, "meta": state.meta},
            cfg.prototypes,
        )
        current = PirState(
            date=today,
            novice=vectors[Persona.NOVICE],
            veteran=vectors[Persona.VETERAN],
            vol=vol,
            macro=state,
            dynamics=dyn,
            membership=membership,
            event=event,
            fragile=fragile,
            params=params,
        )
        if membership.dominant is not prev_q:
            logger.info("%s: simulated quadrant %s -> %s", today, prev_q.value, membership.dominant.value)
        trajectory.append(current)
        prev = current

    return trajectory
