"""Least-squares power-law and exponential fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


@dataclass
class FitResult:
    """``y = prefactor * x**exponent`` (log-log) or ``y = prefactor * exp(exponent * x)`` (log-linear)."""

    exponent: float
    prefactor: float
    window: tuple[float, float]
    residual: float
    n_points: int
    mode: str = "loglog"

    def as_dict(self) -> dict:
        return {"exponent": self.exponent, "prefactor": self.prefactor, "window": list(self.window),
                "residual": self.residual, "n_points": self.n_points, "mode": self.mode}


def fit_power_law(points, window=None, mode: str = "loglog", min_points: int = 4) -> FitResult:
    """Fit ``points = [(x, y), ...]`` restricted to ``window = (x_lo, x_hi)``.

    ``mode="loglog"`` regresses ``log y`` on ``log x``; ``mode="loglinear"``
    regresses ``log y`` on ``x``.  The residual is the RMS of the log misfit.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if window is not None:
        lo, hi = window
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    if x.size < min_points:
        raise DomainError(f"fit window holds {x.size} points, need at least {min_points}")
    if np.any(y <= 0) or (mode == "loglog" and np.any(x <= 0)):
        raise DomainError("fit requires positive data inside the window")
    if mode == "loglog":
        u = np.log(x)
    elif mode == "loglinear":
        u = x
    else:
        raise DomainError("mode must be 'loglog' or 'loglinear'")
    v = np.log(y)
    slope, intercept = np.polyfit(u, v, 1)
    resid = float(np.sqrt(np.mean((v - (slope * u + intercept)) ** 2)))
    return FitResult(float(slope), float(np.exp(intercept)), (float(x.min()), float(x.max())), resid,
                     int(x.size), mode)
