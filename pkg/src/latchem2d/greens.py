"""Lattice Green's functions of the square tight-binding band above its top edge.

``Sigma(z, d) = (1/N^2) sum_k exp(i k.d) / (z - omega_k)`` together with its
continuum limits.  Energies are in units of the hopping ``t`` (default 1);
the continuum forms assume ``z > 4t``.

Lattice sums are accumulated with :func:`math.fsum` in row-major momentum
order, which is exactly rounded and therefore independent of any blocking.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SingularPointError
from .lattice import LatticeSpec
from .special import EULER_GAMMA, bessel_K0, elliptic_K

SINGULAR_TOL = 1e-12


def _check_above_band(z, t):
    if z <= 4.0 * t:
        raise DomainError(f"z={z} is not above the band edge 4t={4 * t}")


def _separation(d):
    d = tuple(int(v) for v in np.atleast_1d(d))
    if len(d) != 2:
        raise DomainError("separation must be a 2-vector")
    return d


def sigma0_analytic(z: float, t: float = 1.0) -> float:
    """Brillouin-zone integral ``2 K(4t/z) / (pi z)`` for ``z > 4t``."""
    _check_above_band(z, t)
    return 2.0 * elliptic_K(4.0 * t / z) / (np.pi * z)


def sigma0_band_edge(delta: float, t: float = 1.0) -> float:
    """Logarithmic form of :func:`sigma0_analytic` at ``z = 4t + delta``, small delta."""
    if delta <= 0:
        raise DomainError("band-edge detuning must be positive")
    return (5.0 * math.log(2.0) - math.log(delta / t)) / (4.0 * np.pi * t)


def sigma_d_analytic(z: float, d, t: float = 1.0) -> complex:
    """Continuum ``exp(i pi (dx+dy)) K0(|d| sqrt((z-4t)/t)) / (2 pi t)``."""
    _check_above_band(z, t)
    dx, dy = _separation(d)
    r = math.hypot(dx, dy)
    if r == 0:
        raise DomainError("zero separation: use sigma0_analytic")
    sign = -1.0 if (dx + dy) % 2 else 1.0
    return complex(sign * bessel_K0(r * math.sqrt((z - 4.0 * t) / t)) / (2.0 * np.pi * t))


def sigma_d_band_edge(delta: float, d, t: float = 1.0) -> complex:
    """Small-argument form ``(-log(|d| sqrt(delta)/2) - gamma) / (2 pi)`` with the parity sign."""
    if delta <= 0:
        raise DomainError("band-edge detuning must be positive")
    dx, dy = _separation(d)
    r = math.hypot(dx, dy)
    if r == 0:
        raise DomainError("zero separation: use sigma0_band_edge")
    sign = -1.0 if (dx + dy) % 2 else 1.0
    x = r * math.sqrt(delta / t)
    return complex(sign * (-math.log(x / 2.0) - EULER_GAMMA) / (2.0 * np.pi * t))


def _fsum_complex(values: np.ndarray) -> complex:
    values = np.ravel(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(math.fsum(values), 0.0)


def lattice_sum(z, d, lattice: LatticeSpec, t: float = 1.0, power: int = 1,
                shifted: bool = False) -> complex:
    """``(1/N^2) sum_k exp(i k.d) / (z - omega_k)^power`` over the lattice momentum grid.

    With ``shifted=True`` the phase uses ``k - (pi, pi)``, which removes the
    alternating sign of states near the upper band edge.
    """
    dx, dy = _separation(d)
    kx, ky = lattice.momentum_grid()
    omega = lattice.dispersion_grid(t)
    gap = z - omega
    if np.min(np.abs(gap)) < SINGULAR_TOL:
        raise SingularPointError(f"z={z} coincides with a lattice eigenvalue")
    if shifted:
        kx = kx - np.pi
        ky = ky - np.pi
    denom = gap ** power
    if dx == 0 and dy == 0:
        terms = 1.0 / denom
    else:
        terms = np.exp(1j * (kx * dx + ky * dy)) / denom
    return _fsum_complex(terms) / lattice.n_sites


def sigma0_lattice_sum(z: float, lattice: LatticeSpec, t: float = 1.0) -> float:
    """Exact finite-lattice ``(1/N^2) sum_k 1/(z - omega_k)``."""
    return lattice_sum(z, (0, 0), lattice, t).real


def sigma_d_lattice_sum(z: float, d, lattice: LatticeSpec, t: float = 1.0,
                        shifted: bool = False) -> complex:
    """Exact finite-lattice ``(1/N^2) sum_k exp(i k.d)/(z - omega_k)``."""
    return lattice_sum(z, d, lattice, t, shifted=shifted)
