"""
Statistics toolbox.

Pure functions and lightweight dataclasses -- no I/O, no side effects.
Everything here is deterministic: reductions run in a fixed order so the
same sample always produces bit-identical results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import special
from scipy import stats as sps

from .constants import HISTOGRAM_BINS
from .errors import InputError, NumericError

Sample = Union[Sequence[float], np.ndarray]


def _as_sample(values: Sample, name: str = "sample", min_n: int = 1) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_n:
        raise InputError(f"{name} needs at least {min_n} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


# ---------------------------------------------------------------------------
# Dataclasses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    """Counts over strictly ascending bin edges."""

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise InputError("histogram needs at least two bin edges")
        if np.any(np.diff(edges) <= 0):
            raise InputError("bin edges must be strictly ascending")
        if counts.shape != (edges.size - 1,):
            raise InputError(
                f"expected {edges.size - 1} counts for {edges.size} edges, got {counts.size}"
            )
        if np.any(counts < 0):
            raise InputError("histogram counts must be non-negative")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_sample(cls, values: Sample, edges: Sample) -> "Histogram":
        counts, _ = np.histogram(np.asarray(values, dtype=float), bins=np.asarray(edges, dtype=float))
        return cls(edges=np.asarray(edges, dtype=float), counts=counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def mass(self) -> np.ndarray:
        """Normalized mass function (all zeros for an empty histogram)."""
        total = self.total
        if total <= 0:
            return np.zeros_like(self.counts)
        return self.counts / total

    def same_support(self, other: "Histogram") -> bool:
        return self.edges.shape == other.edges.shape and bool(np.array_equal(self.edges, other.edges))


@dataclass
class RegressionFit:
    """Ordinary least squares estimates with classical inference."""

    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r_squared: float
    residuals: np.ndarray
    df_resid: int
    names: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        names = self.names or tuple(f"x{i}" for i in range(len(self.coefficients)))
        return {
            "coefficients": {
                name: {
                    "estimate": float(self.coefficients[i]),
                    "std_error": float(self.std_errors[i]),
                    "t": float(self.t_stats[i]),
                    "p_value": float(self.p_values[i]),
                }
                for i, name in enumerate(names)
            },
            "r_squared": float(self.r_squared),
            "df_resid": self.df_resid,
        }


@dataclass(frozen=True)
class Moments:
    """Population-convention moments; ``None`` marks an undefined quantity."""

    n: int
    mean: float
    sd: float
    cv: Optional[float]
    skewness: Optional[float]
    kurtosis_excess: Optional[float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "cv": self.cv,
            "skewness": self.skewness,
            "kurtosis_excess": self.kurtosis_excess,
        }


# ---------------------------------------------------------------------------
# Correlation and mean tests
# ---------------------------------------------------------------------------

def pearson(x: Sample, y: Sample) -> Tuple[float, float]:
    """Pearson r with a two-sided p-value from Student-t(n - 2)."""
    xa = _as_sample(x, "x", 3)
    ya = _as_sample(y, "y", 3)
    if xa.size != ya.size:
        raise InputError(f"length mismatch: {xa.size} vs {ya.size}")

    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise NumericError("pearson correlation undefined: zero variance")

    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    n = xa.size
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * sps.t.sf(abs(t), n - 2))


def welch_t_one_tailed(a: Sample, b: Sample) -> Tuple[float, float]:
    """Welch t statistic and upper-tail p for H1: mean(a) > mean(b)."""
    xa = _as_sample(a, "a", 2)
    xb = _as_sample(b, "b", 2)
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    if va == 0.0 or vb == 0.0:
        raise NumericError("welch t-test undefined: a sample has zero variance")

    sa = va / xa.size
    sb = vb / xb.size
    t = (float(xa.mean()) - float(xb.mean())) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa ** 2 / (xa.size - 1) + sb ** 2 / (xb.size - 1))
    return t, float(sps.t.sf(t, df))


def icc(pairs: Sequence[Tuple[float, float]]) -> float:
    """ICC(C,1): two-way mixed, consistency, single measure."""
    data = np.asarray(pairs, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise InputError("icc expects a sequence of (rater1, rater2) pairs")
    n, k = data.shape
    if n < 3:
        raise InputError(f"icc needs at least 3 pairs, got {n}")
    if not np.all(np.isfinite(data)):
        raise InputError("icc input contains non-finite values")

    grand = data.mean()
    row_means = data.mean(axis=1)
    col_means = data.mean(axis=0)
    ms_rows = k * float(np.sum((row_means - grand) ** 2)) / (n - 1)
    if ms_rows == 0.0:
        raise NumericError("icc undefined: zero between-subject variance")

    resid = data - row_means[:, None] - col_means[None, :] + grand
    ms_err = float(np.sum(resid ** 2)) / ((n - 1) * (k - 1))
    return (ms_rows - ms_err) / (ms_rows + (k - 1) * ms_err)


# ---------------------------------------------------------------------------
# Shapiro-Wilk (Royston's approximation)
# ---------------------------------------------------------------------------

# Polynomial coefficients in ascending powers.
_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_C6 = (-0.4803, -0.082676, 0.0030302)
_SW_G = (-2.273, 0.459)
_SW_MAX_N = 5000


def _sw_coefficients(n: int) -> np.ndarray:
    if n == 3:
        half = math.sqrt(0.5)
        return np.array([-half, 0.0, half])

    m = sps.norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    summ2 = float(np.dot(m, m))
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a_n = -m[0] / ssumm2 + P.polyval(rsn, _SW_C1)

    if n > 5:
        a_n1 = -m[1] / ssumm2 + P.polyval(rsn, _SW_C2)
        phi = (summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a_n ** 2 - 2 * a_n1 ** 2)
        a = m / math.sqrt(phi)
        a[0], a[1] = -a_n, -a_n1
        a[-1], a[-2] = a_n, a_n1
    else:
        phi = (summ2 - 2 * m[0] ** 2) / (1 - 2 * a_n ** 2)
        a = m / math.sqrt(phi)
        a[0], a[-1] = -a_n, a_n
    return a


def shapiro_wilk(x: Sample) -> Tuple[float, float]:
    """Shapiro-Wilk W and its p-value for 3 <= n <= 5000."""
    arr = _as_sample(x, "sample", 3)
    n = arr.size
    if n > _SW_MAX_N:
        raise InputError(f"shapiro-wilk supports n <= {_SW_MAX_N}, got {n}")

    xs = np.sort(arr)
    if xs[-1] == xs[0]:
        raise NumericError("shapiro-wilk undefined for a constant sample")

    a = _sw_coefficients(n)
    centered = xs - xs.mean()
    w = float(np.dot(a, centered)) ** 2 / float(np.dot(centered, centered))
    w = min(w, 1.0)

    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(p, 0.0), 1.0)
    if w >= 1.0:
        return w, 1.0

    y = math.log1p(-w)
    if n <= 11:
        gamma = P.polyval(n, _SW_G)
        if y >= gamma:
            return w, 0.0
        y = -math.log(gamma - y)
        mu = P.polyval(n, _SW_C3)
        sigma = math.exp(P.polyval(n, _SW_C4))
    else:
        ln_n = math.log(n)
        mu = P.polyval(ln_n, _SW_C5)
        sigma = math.exp(P.polyval(ln_n, _SW_C6))
    return w, float(sps.norm.sf(y, loc=mu, scale=sigma))


# ---------------------------------------------------------------------------
# Distribution distance
# ---------------------------------------------------------------------------

def shared_edges(a: Sample, b: Sample, bins: int = HISTOGRAM_BINS) -> np.ndarray:
    """Equal-width edges over the pooled min-max of both samples."""
    if bins < 1:
        raise InputError(f"bins must be >= 1, got {bins}")
    pooled = np.concatenate([np.asarray(a, dtype=float), np.asarray(b, dtype=float)])
    if pooled.size == 0:
        raise InputError("cannot bin two empty samples")
    lo, hi = float(pooled.min()), float(pooled.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, bins + 1)


def _mass(dist: Union[Histogram, Sample], name: str) -> np.ndarray:
    mass = dist.mass if isinstance(dist, Histogram) else np.asarray(dist, dtype=float)
    if mass.ndim != 1 or mass.size == 0:
        raise InputError(f"{name} must be a non-empty mass vector")
    if np.any(mass < 0) or not np.all(np.isfinite(mass)):
        raise InputError(f"{name} has negative or non-finite mass")
    if abs(float(mass.sum()) - 1.0) > 1e-9:
        raise InputError(f"{name} is not normalized (sum={float(mass.sum())!r})")
    return mass


def js_divergence(p: Union[Histogram, Sample], q: Union[Histogram, Sample]) -> float:
    """Jensen-Shannon divergence in bits, within [0, 1]."""
    if isinstance(p, Histogram) and isinstance(q, Histogram) and not p.same_support(q):
        raise InputError("histograms do not share bin edges")
    pm = _mass(p, "p")
    qm = _mass(q, "q")
    if pm.size != qm.size:
        raise InputError(f"support mismatch: {pm.size} vs {qm.size} bins")

    m = 0.5 * (pm + qm)
    nats = 0.5 * float(special.rel_entr(pm, m).sum()) + 0.5 * float(special.rel_entr(qm, m).sum())
    return min(max(nats / math.log(2.0), 0.0), 1.0)


def histogram_jsd(a: Sample, b: Sample, bins: int = HISTOGRAM_BINS) -> float:
    """Bin two samples on shared edges and return their JSD."""
    edges = shared_edges(a, b, bins)
    return js_divergence(Histogram.from_sample(a, edges), Histogram.from_sample(b, edges))


# ---------------------------------------------------------------------------
# Regression
# ---------------------------------------------------------------------------

def ols(
    design: Union[Sequence[Sequence[float]], np.ndarray],
    y: Sample,
    *,
    intercept: bool = False,
    names: Sequence[str] = (),
) -> RegressionFit:
    """
    Least squares with classical standard errors and two-sided p-values.

    With ``intercept=True`` a constant column is prepended and R² is the
    centered form; otherwise R² is uncentered.
    """
    X = np.asarray(design, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    yv = np.asarray(y, dtype=float)
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
        names = ("const", *names) if names else ()

    n, k = X.shape
    if yv.shape != (n,):
        raise InputError(f"response has {yv.size} values for {n} design rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(yv))):
        raise InputError("regression input contains non-finite values")
    if n <= k:
        raise InputError(f"regression needs more rows than columns ({n} <= {k})")
    if np.linalg.matrix_rank(X) < k:
        raise NumericError("rank-deficient design matrix")

    coef, *_ = np.linalg.lstsq(X, yv, rcond=None)
    resid = yv - X @ coef
    df = n - k
    ssr = float(resid @ resid)
    sigma2 = ssr / df
    se = np.sqrt(np.clip(np.diag(np.linalg.inv(X.T @ X)) * sigma2, 0.0, None))

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.where(coef == 0, 0.0, np.sign(coef) * np.inf))
    p = 2.0 * sps.t.sf(np.abs(t), df)

    sst = float(np.sum((yv - yv.mean()) ** 2)) if intercept else float(yv @ yv)
    if sst > 0:
        r2 = 1.0 - ssr / sst
    else:
        r2 = 1.0 if ssr == 0.0 else 0.0

    return RegressionFit(
        coefficients=coef,
        std_errors=se,
        t_stats=t,
        p_values=p,
        r_squared=float(r2),
        residuals=resid,
        df_resid=df,
        names=tuple(names),
    )


# ---------------------------------------------------------------------------
# Descriptive statistics
# ---------------------------------------------------------------------------

def moments(x: Sample) -> Moments:
    """Mean, population sd, cv, skewness and excess kurtosis."""
    arr = _as_sample(x, "sample", 2)
    mean = float(arr.mean())

    if float(np.ptp(arr)) == 0.0:
        return Moments(
            n=arr.size, mean=mean, sd=0.0,
            cv=0.0 if mean != 0 else None,
            skewness=None, kurtosis_excess=None,
        )

    centered = arr - mean
    m2 = float(np.mean(centered ** 2))
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    sd = math.sqrt(m2)
    return Moments(
        n=arr.size,
        mean=mean,
        sd=sd,
        cv=sd / mean if mean != 0 else None,
        skewness=m3 / m2 ** 1.5,
        kurtosis_excess=m4 / m2 ** 2 - 3.0,
    )


def coefficient_of_variation(x: Sample) -> float:
    result = moments(x)
    if result.cv is None:
        raise NumericError("coefficient of variation undefined for zero mean")
    return result.cv


def skewness(x: Sample) -> float:
    result = moments(x)
    if result.skewness is None:
        raise NumericError("skewness undefined for a constant sample")
    return result.skewness


def entropy(counts: Sample) -> float:
    """Shannon entropy (natural log) of category counts."""
    arr = np.asarray(counts, dtype=float)
    if arr.size == 0:
        raise InputError("entropy of an empty count vector")
    if np.any(arr < 0):
        raise InputError("category counts must be non-negative")
    if float(arr.sum()) <= 0:
        raise NumericError("entropy undefined: all counts are zero")
    return float(sps.entropy(arr))


def describe_groups(groups: Dict[str, Sample]) -> Dict[str, dict]:
    """Moments plus Shapiro-Wilk per named sample, in key order."""
    report: Dict[str, dict] = {}
    for name in sorted(groups):
        sample = np.asarray(groups[name], dtype=float)
        row = moments(sample).to_dict()
        try:
            w, p = shapiro_wilk(sample)
            row.update({"shapiro_w": w, "shapiro_p": p, "normal": p >= 0.05})
        except (InputError, NumericError) as exc:
            row.update({"shapiro_w": None, "shapiro_p": None, "normal": None, "note": str(exc)})
        report[name] = row
    return report
