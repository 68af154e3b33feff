"""Friction-trend fitting, running-in/stable segmentation and RMS trend labels.

The friction coefficient is modelled as an exponential approach to a
steady value, ``mu(t) = mu_inf + (mu0 - mu_inf) * exp(-t / tau)``. The stage
boundary is the earliest time at which the fitted curve's slope magnitude
falls below a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .extraction import RmsSeries
from .signal_core import SignalError

# Calibrated so that mu0=0.129, mu_inf=0.103, tau=12 min gives a 40 min boundary.
DEFAULT_SLOPE_THRESHOLD = 7.7e-5  # per minute
DEFAULT_TREND_Z = 2.0

RUNNING_IN = "running-in"
STABLE = "stable"


@dataclass(frozen=True, eq=False)
class FrictionTrace:
    times: np.ndarray  # minutes
    mu_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        mu = np.asarray(self.mu_values, dtype=float)
        if t.shape != mu.shape or t.ndim != 1:
            raise SignalError("times and mu_values must be equal-length 1-D arrays")
        if np.any(np.diff(t) <= 0):
            raise SignalError("times must be strictly increasing")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise SignalError("friction coefficients must be finite and positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "mu_values", mu)

    def __len__(self):
        return self.times.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])


@dataclass(frozen=True)
class TrendFit:
    mu0: float
    mu_inf: float
    tau: float
    rmse: float
    no_decay: bool = False

    def value(self, t):
        return self.mu_inf + (self.mu0 - self.mu_inf) * np.exp(-np.asarray(t) / self.tau)

    def slope(self, t):
        return -(self.mu0 - self.mu_inf) / self.tau * np.exp(-np.asarray(t) / self.tau)


@dataclass(frozen=True)
class StageSegmentation:
    boundary_minutes: float
    stages: tuple  # ((label, (start, end)), ...)
    method_tag: str
    flags: tuple = ()


@dataclass(frozen=True)
class StageTrend:
    label: str
    interval: tuple
    trend: str
    slope_per_min: float
    slope_stderr: float
    mean_rms: float
    n_points: int


@dataclass(frozen=True)
class TrendClassification:
    stages: tuple = field(default_factory=tuple)  # StageTrend per stage
    mean_ratio: float = float("nan")  # last stage mean / first stage mean
    method_tag: str = ""


def _model(t, mu_inf, amp, tau):
    return mu_inf + amp * np.exp(-t / tau)


def fit_friction_trend(trace: FrictionTrace) -> TrendFit:
    """Least-squares exponential-decay fit (time origin at t=0)."""
    if len(trace) < 8:
        raise SignalError("need at least 8 points to fit a friction trend")
    t, mu = trace.times, trace.mu_values
    t0, t1 = trace.span
    span = t1 - t0
    if span <= 0:
        raise SignalError("trace spans zero time")

    def flat():
        m = float(np.mean(mu))
        return TrendFit(m, m, span, float(np.sqrt(np.mean((mu - m) ** 2))), no_decay=True)

    scale = float(np.max(np.abs(mu)))
    if np.ptp(mu) <= 1e-12 * scale:
        return flat()

    # initial guess: tail mean as asymptote, head mean as start, tau = span/4
    k = max(2, len(mu) // 10)
    head, tail = float(np.mean(mu[:k])), float(np.mean(mu[-k:]))
    tau0 = span / 4
    amp0 = (head - tail) * math.exp(t0 / tau0)
    try:
        popt, _ = optimize.curve_fit(
            _model, t, mu, p0=(tail, amp0, tau0),
            bounds=([-np.inf, -np.inf, 1e-6 * span], [np.inf, np.inf, 1e6 * span]),
            x_scale=(scale, scale, span), max_nfev=20000)
    except (RuntimeError, ValueError):
        return flat()
    mu_inf, amp, tau = (float(v) for v in popt)
    resid = mu - _model(t, *popt)
    return TrendFit(mu_inf + amp, mu_inf, tau, float(np.sqrt(np.mean(resid ** 2))))


def segment_stages(fit: TrendFit, trace: FrictionTrace,
                   slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> StageSegmentation:
    """Split the trace at the earliest time where |d mu_fit / dt| < threshold."""
    if not slope_threshold > 0:
        raise SignalError("slope_threshold must be positive")
    start, end = trace.span
    tag = f"exp-decay fit, |dmu/dt| < {slope_threshold:g}/min"
    amp = abs(fit.mu0 - fit.mu_inf)
    # |slope(t)| = amp/tau * exp(-t/tau) is monotone decreasing in t
    if fit.no_decay or amp == 0.0:
        boundary = start
    else:
        boundary = fit.tau * math.log(amp / (fit.tau * slope_threshold))
    flags = []
    if fit.no_decay:
        flags.append("no_decay")
    if boundary <= start:
        return StageSegmentation(start, ((STABLE, (start, end)),), tag, tuple(flags))
    if boundary >= end:
        flags.append("threshold_not_reached")
        return StageSegmentation(end, ((RUNNING_IN, (start, end)),), tag, tuple(flags))
    return StageSegmentation(boundary, ((RUNNING_IN, (start, boundary)),
                                        (STABLE, (boundary, end))), tag, tuple(flags))


def segment_from_rms(series: RmsSeries, settle_fraction: float = 0.95) -> StageSegmentation:
    """Fallback segmentation when no friction trace is available.

    Fits the same exponential model to the RMS series and places the
    boundary where the fitted curve has covered ``settle_fraction`` of its
    total change.
    """
    t = series.window_centers_min
    trace = FrictionTrace(t, np.maximum(series.rms_values, np.finfo(float).tiny))
    fit = fit_friction_trend(trace)
    start, end = float(t[0]), float(t[-1])
    tag = f"rms-only exp fit, {settle_fraction:.0%} settled"
    flags = ["rms_only_segmentation"]
    if fit.no_decay:
        flags.append("no_decay")
        return StageSegmentation(start, ((STABLE, (start, end)),), tag, tuple(flags))
    boundary = -fit.tau * math.log(1.0 - settle_fraction)
    if boundary <= start:
        return StageSegmentation(start, ((STABLE, (start, end)),), tag, tuple(flags))
    if boundary >= end:
        flags.append("threshold_not_reached")
        return StageSegmentation(end, ((RUNNING_IN, (start, end)),), tag, tuple(flags))
    return StageSegmentation(boundary, ((RUNNING_IN, (start, boundary)),
                                        (STABLE, (boundary, end))), tag, tuple(flags))


def _ols_trend(t, y, z):
    res = stats.linregress(t, y)
    slope, stderr = float(res.slope), float(res.stderr)
    # exact-fit series: treat round-off slopes as zero
    if abs(slope) * np.ptp(t) <= 1e-12 * max(float(np.max(np.abs(y))), 1e-300):
        slope = 0.0
    if slope > z * stderr:
        label = "rising"
    elif slope < -z * stderr:
        label = "falling"
    else:
        label = "stable"
    return label, slope, stderr


def classify_rms_trend(series: RmsSeries, segmentation: StageSegmentation,
                       z: float = DEFAULT_TREND_Z) -> TrendClassification:
    """OLS slope test (``|slope| > z * stderr``) of RMS vs time, per stage.

    Points are assigned by window centre: every stage is half-open except
    the last, which also takes any point at or beyond its end.
    """
    t = series.window_centers_min
    y = series.rms_values
    out = []
    n_stages = len(segmentation.stages)
    for i, (label, (lo, hi)) in enumerate(segmentation.stages):
        lower_ok = t >= lo if i > 0 else np.ones_like(t, dtype=bool)
        upper_ok = t < hi if i < n_stages - 1 else np.ones_like(t, dtype=bool)
        sel = lower_ok & upper_ok
        n = int(sel.sum())
        mean = float(np.mean(y[sel])) if n else float("nan")
        if n < 3:
            out.append(StageTrend(label, (lo, hi), "insufficient data",
                                  float("nan"), float("nan"), mean, n))
            continue
        trend, slope, stderr = _ols_trend(t[sel], y[sel], z)
        out.append(StageTrend(label, (lo, hi), trend, slope, stderr, mean, n))
    ratio = float("nan")
    if len(out) >= 2 and out[0].mean_rms > 0:
        ratio = out[-1].mean_rms / out[0].mean_rms
    return TrendClassification(tuple(out), ratio, f"OLS slope vs {z:g}-sigma")
