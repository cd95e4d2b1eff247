"""
Shared constants used across all cogmarket modules.

Centralises calibrated coefficients, thresholds and tunables so they live in
exactly one place.  ``config.DEFAULTS`` is built from these values; a user
config file only ever overrides them.
"""

# ---------------------------------------------------------------------------
# Dimension registry
# ---------------------------------------------------------------------------

BASIC_EMOTIONS = (
    "joy", "sadness", "anger", "fear",
    "trust", "disgust", "surprise", "anticipation",
)
REGULATION_DIMS = ("intensity", "agency", "certainty", "temporality")
DOMAIN_DIMS = ("fomo", "greed", "regret", "uncertainty")
DEFAULT_LABELS = BASIC_EMOTIONS + REGULATION_DIMS + DOMAIN_DIMS + ("valence",)

SCORE_MIN = -1.0
SCORE_MAX = 1.0

TAG_METACOGNITION = "TAG_METACOGNITION"

POSITIVE_DIMS = ("joy", "trust", "anticipation")
NEGATIVE_DIMS = ("fear", "sadness", "disgust", "regret")

# ---------------------------------------------------------------------------
# Macro state
# ---------------------------------------------------------------------------

MCFI_ALPHA = 0.6                 # joy weight; anticipation gets 1 - alpha
DYNAMICS_LAG = 1                 # days
QUADRANT_BANDWIDTH = 0.35

INTENSITY_LOW = 0.2              # |value| < 0.2 -> low
INTENSITY_HIGH = 0.5             # |value| > 0.5 -> high

# ---------------------------------------------------------------------------
# Decay (power law, log-linear calibration)
# ---------------------------------------------------------------------------

DECAY_ALPHA = {
    "fear": 0.32,
    "greed": 0.25,
    "joy": 0.20,
    "sadness": 0.11,
    "trust": 0.05,
}
DECAY_THRESHOLD = {
    "fear": 0.7,
    "greed": 0.6,
    "joy": 0.6,
    "sadness": 0.8,
    "trust": 0.6,
}
DECAY_BETA0 = 0.0
DECAY_BETA2 = 1.0
MIN_DECAY_SAMPLES = 4

# ---------------------------------------------------------------------------
# Holiday effect
# ---------------------------------------------------------------------------

HOLIDAY_MULTIPLIERS = {
    "fear": 1.91,
    "joy": 2.12,
    "uncertainty": 1.83,
    "sadness": 1.00,             # p = 0.063, not significant
}
HOLIDAY_SIGNIFICANCE = 0.05

# ---------------------------------------------------------------------------
# Shock response
# ---------------------------------------------------------------------------

MDI_FRAGILITY_THRESHOLD = 1.2
LOSS_AVERSION = 1.5
SHOCK_VECTORS = {
    "fear": {"fear": 0.75, "trust": -0.70},
    "confusion": {"uncertainty": 0.8, "certainty": -0.8},
}

# ---------------------------------------------------------------------------
# Satellite interaction models
# ---------------------------------------------------------------------------

# (c1 X, c2 V_X, c3 MCFI, c4 X*MCFI, c5 V_X*MCFI)
FOMO_COEFFS = (0.8543, 0.2345, 0.1234, -0.4567, -0.1890)
GREED_COEFFS = (0.9123, 0.1987, 0.0, -0.5123, -0.1567)   # c3 not reported
# (u1 V_MDI, u2 MCFI, u3 V_MDI*MCFI)
UNCERTAINTY_COEFFS = (0.3456, -0.2345, 0.1890)
# (r1 regret_lag, r2 MCFI, r3 regret_lag*MCFI)
REGRET_COEFFS = (0.7234, -0.4567, 0.3456)

# 2021 re-estimation: only the interaction terms moved
FOMO_COEFFS_2021 = (0.8543, 0.2345, 0.1234, -0.8872, -0.4431)
GREED_COEFFS_2021 = (0.9123, 0.1987, 0.0, -0.9161, -0.7248)
UNCERTAINTY_COEFFS_2021 = (0.3456, -0.2345, 0.1205)
REGRET_COEFFS_2021 = (0.7234, -0.4567, 0.4168)

BULL_FOMO_JOY = 0.8              # c_joy->fomo in bull quadrants
MIN_SATELLITE_ROWS = 6

# ---------------------------------------------------------------------------
# GJR-GARCH parameter arsenal, per quadrant: (lo, hi)
# Open-ended cells are capped: "< 0.05" -> (0, 0.05), "> 0.90" -> (0.90, 0.99)
# ---------------------------------------------------------------------------

ARSENAL_RANGES = {
    "A": {"core": "joy", "omega": (0.15, 0.25), "alpha": (0.10, 0.20),
          "alpha_neg": (0.0, 0.05), "beta": (0.75, 0.85)},
    "B": {"core": "fear", "omega": (0.10, 0.15), "alpha": (0.05, 0.10),
          "alpha_neg": (0.08, 0.15), "beta": (0.80, 0.90)},
    "C": {"core": "fear", "omega": (0.0, 0.05), "alpha": (0.0, 0.05),
          "alpha_neg": (0.15, 0.25), "beta": (0.90, 0.99)},
    "D": {"core": "sadness", "omega": (0.08, 0.12), "alpha": (0.0, 0.05),
          "alpha_neg": (0.08, 0.15), "beta": (0.85, 0.95)},
    "E": {"core": "fear", "omega": (0.05, 0.10), "alpha": (0.02, 0.05),
          "alpha_neg": (0.15, 0.20), "beta": (0.85, 0.90)},
    "F": {"core": "joy", "omega": (0.01, 0.05), "alpha": (0.10, 0.15),
          "alpha_neg": (0.0, 0.05), "beta": (0.75, 0.80)},
}

GARCH_H0 = 0.05
FEEDBACK_Z = 2.5
FEEDBACK_GAIN = 1.5
FEEDBACK_MIN_HISTORY = 3

# ---------------------------------------------------------------------------
# Freeze predicate
# ---------------------------------------------------------------------------

FREEZE_MDI = 0.8
FREEZE_LIQUIDITY = 0.3

# ---------------------------------------------------------------------------
# Strategy
# ---------------------------------------------------------------------------

FEAR_STOP_BASE = 0.30
FEAR_STOP_FLOOR = 0.25
H_REF = 0.10
H_SCALE = 0.20
BUY_MDI_MAX = 0.2
BUY_MCFI_MIN = 0.4
SPIKE_MULTIPLE = 3.0
SPIKE_WINDOW = 5                 # trailing days
SPIKE_FLOOR = 0.05               # minimum |v_mdi| counted as a spike
PREPARE_MDI_MIN = 0.8
PREPARE_DIMS = ("anticipation", "agency")
POSITION_MAP = {"BUY": 1.0, "WARNING": 0.5, "SELL": 0.0}

# ---------------------------------------------------------------------------
# Backtest
# ---------------------------------------------------------------------------

COST_RATE = 0.0026               # 0.26% of traded notional
RISK_FREE_ANNUAL = 0.02
RISK_FREE_DAILY = 0.00008
TRADING_DAYS = 252
SIGNAL_WINDOW_DAYS = 5

# ---------------------------------------------------------------------------
# Text laboratory
# ---------------------------------------------------------------------------

TERMINATORS = "。？！.?!"
SLANG_P = 0.3
SEMANTIC_LEAP_THRESHOLD = 0.5
HISTOGRAM_BINS = 20

OSC_BASE_LENGTH = 16.0           # characters
OSC_AMPLITUDE = 10.0             # scaled by I_rhythm
OSC_OMEGA = 1.1                  # radians per sentence
OSC_NOISE = 4.0                  # scaled by I_rhythm
FRAGMENT_RATE = 0.7              # split probability per unit I_rhythm
FRAGMENT_CAP = 0.9
RUN_ON_RATE = 0.15               # merge probability per unit I_rhythm
RUN_ON_CAP = 0.5
I_RHYTHM_MAX = 1.5

I_RHYTHM_ROBOT = 0.1
I_RHYTHM_HUMAN = 0.85
I_RHYTHM_MADMAN = 1.2
