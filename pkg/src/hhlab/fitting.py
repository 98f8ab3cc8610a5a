"""Log-log slope fits for decay-rate tracks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_SLOPE_TOL = 0.05
MIN_R_SQUARED = 0.99


@dataclass
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    predicted_slope: float | None = None
    slope_tol: float = DEFAULT_SLOPE_TOL
    verdict: str = "inconclusive"  # consistent | inconsistent | inconclusive

    def evaluate(self, t) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(t, dtype=float) ** self.slope


def decay_slope_fit(
    times,
    values,
    predicted_slope: float | None = None,
    window: tuple[float, float] | None = None,
    slope_tol: float = DEFAULT_SLOPE_TOL,
) -> DecayFit:
    """Least-squares slope of log(value) against log(t).

    The verdict is `consistent` when the fitted slope is within slope_tol
    (relative, floored absolutely for near-zero predictions) of the
    prediction and the fit explains the track (r^2 >= 0.99);
    `inconclusive` when the track is not power-like (r^2 < 0.9).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    keep = (t > 0) & (v > 0) & np.isfinite(v)
    t, v = t[keep], v[keep]
    if t.size < 3:
        win = (float(t.min()), float(t.max())) if t.size else (math.nan, math.nan)
        return DecayFit(math.nan, math.nan, 0.0, win, predicted_slope, slope_tol)
    x = np.log(t)
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # tracks constant to machine precision are perfect slope-0 power laws
    floor = (1e-13 * max(1.0, float(np.max(np.abs(y))))) ** 2 * y.size
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > floor else 1.0
    fit = DecayFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        window=(float(t.min()), float(t.max())),
        predicted_slope=predicted_slope,
        slope_tol=slope_tol,
    )
    if predicted_slope is None:
        fit.verdict = "consistent" if r2 >= MIN_R_SQUARED else "inconclusive"
        return fit
    if r2 < 0.9:
        fit.verdict = "inconclusive"
        return fit
    tol = slope_tol * max(abs(predicted_slope), 0.1)
    if abs(slope - predicted_slope) <= tol and r2 >= MIN_R_SQUARED:
        fit.verdict = "consistent"
    else:
        fit.verdict = "inconsistent"
    return fit


def excess_decay(base_fit: DecayFit, diff_slope: float) -> float:
    """Measured extra decay rate of a difference track over the base rate.

    Positive when the difference decays strictly faster than the base
    prediction.
    """
    ref = base_fit.predicted_slope if base_fit.predicted_slope is not None else base_fit.slope
    return ref - diff_slope
