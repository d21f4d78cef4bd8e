"""Curve containers shared by the mediator laws and the experiment runners."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .io import write_csv

LAWS = ("scheme-I", "scheme-II", "coulomb", "exponential", "tabulated")


@dataclass
class PotentialCurve:
    """An ``(abscissa, energy)`` series with units and provenance metadata."""

    abscissa: np.ndarray
    energy: np.ndarray
    abscissa_name: str = "d_over_a0"
    energy_unit: str = "Ry"
    label: str = ""
    extra: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.energy = np.asarray(self.energy, dtype=float)
        if self.abscissa.shape != self.energy.shape:
            raise DomainError("abscissa and energy lengths differ")
        self.extra = {k: np.asarray(v) for k, v in self.extra.items()}

    def columns(self):
        return [self.abscissa_name, f"E_over_{self.energy_unit}", *self.extra]

    def rows(self):
        cols = [self.abscissa, self.energy, *self.extra.values()]
        return zip(*cols)

    def to_csv(self, path) -> None:
        write_csv(path, self.columns(), self.rows())

    def argmin(self) -> int:
        return int(np.argmin(self.energy))


@dataclass
class EffectivePotentialCurve:
    """Pair potential ``V(d)`` sampled at lattice distances.

    Calling the curve interpolates linearly between samples; distances
    outside the sampled range raise :class:`DomainError` unless
    ``extrapolate`` is ``"hold"`` (clamp to the end values) or ``"zero"``
    (zero beyond the largest sample, clamp below the smallest).
    """

    distances: np.ndarray
    values: np.ndarray
    law: str = "tabulated"
    mode: str = "analytic"
    in_window: np.ndarray | None = None
    unit: str = "t_a"
    extrapolate: str = "error"
    extra: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.extra = {k: np.asarray(v, dtype=float) for k, v in self.extra.items()}
        self.distances = np.asarray(self.distances, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.law not in LAWS:
            raise DomainError(f"unknown law {self.law!r}")
        if self.distances.shape != self.values.shape or self.distances.ndim != 1:
            raise DomainError("distances and values must be 1-D of equal length")
        if np.any(np.diff(self.distances) <= 0):
            raise DomainError("distances must be strictly increasing")
        if self.in_window is None:
            self.in_window = np.ones(self.distances.size, dtype=bool)
        self.in_window = np.asarray(self.in_window, dtype=bool)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.distances[0], self.distances[-1]
        tol = 1e-12 * max(1.0, hi)
        outside = (r < lo - tol) | (r > hi + tol)
        if np.any(outside):
            if self.extrapolate == "error":
                bad = r[outside].ravel()[0]
                raise DomainError(f"potential undefined at distance {bad:g} (tabulated {lo:g}..{hi:g})")
        out = np.interp(r, self.distances, self.values)
        if self.extrapolate == "zero":
            out = np.where(r > hi + tol, 0.0, out)
        return out

    def scaled(self, factor: float, unit: str) -> "EffectivePotentialCurve":
        return EffectivePotentialCurve(self.distances, self.values * factor, self.law, self.mode,
                                       self.in_window, unit, self.extrapolate,
                                       {k: v * factor for k, v in self.extra.items()}, dict(self.meta))

    def is_positive_decreasing(self) -> bool:
        v = self.values[self.in_window]
        return bool(np.all(v > 0) and np.all(np.diff(v) < 0))

    def to_csv(self, path) -> None:
        rows = zip(self.distances, self.values, [self.mode] * self.values.size, self.in_window,
                   *self.extra.values())
        write_csv(path, ["d_over_a", f"V_over_{self.unit.replace('_', '')}", "mode",
                         "in_validity_window", *self.extra], rows)
