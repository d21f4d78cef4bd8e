"""Complete elliptic integral K and modified Bessel functions K0, K1.

``elliptic_K`` follows the modulus convention
``K(m) = int_0^{pi/2} (1 - m^2 sin^2 theta)^{-1/2} dtheta``, i.e. ``m`` enters
squared.  This differs from ``scipy.special.ellipk``, which takes the
parameter ``m^2``.

The Bessel functions use the ascending series for ``x <= 2`` and, above the
crossover, the trapezoidal rule applied to
``K_nu(x) = exp(-x) int_0^inf exp(-x (cosh s - 1)) cosh(nu s) ds``.  The
integrand is entire and decays doubly exponentially, so the trapezoidal rule
converges geometrically in the step and reaches full double precision with a
few dozen nodes.  A truncated asymptotic series cannot reach 1e-10 near the
crossover, which is why it is not used.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_CROSSOVER = 2.0
_SERIES_TERMS = 30
_TRAP_STEP = 0.1
_TRAP_CUTOFF = 45.0


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def agm(a, b, tol: float = 1e-16, max_iter: int = 64):
    """Arithmetic-geometric mean of positive arguments (vectorised)."""
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    for _ in range(max_iter):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= tol * np.abs(a)):
            break
    return 0.5 * (a + b)


def elliptic_K(m):
    """Complete elliptic integral of the first kind in the modulus convention.

    Parameters
    ----------
    m : float or array_like
        Modulus with ``|m| < 1``.

    Returns
    -------
    float or ndarray
        ``pi / (2 agm(1, sqrt(1 - m^2)))``.
    """
    arr, scalar = _as_array(m)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) >= 1):
        raise DomainError("elliptic_K requires |m| < 1")
    out = np.pi / (2.0 * agm(np.ones_like(arr), np.sqrt(1.0 - arr * arr)))
    return float(out) if scalar else out


def _series_k0_k1(x):
    q = 0.25 * x * x
    log_half = np.log(0.5 * x)
    term0 = np.ones_like(x)  # q^k / (k!)^2
    term1 = np.ones_like(x)  # q^k / (k! (k+1)!)
    i0 = np.zeros_like(x)
    i1_sum = np.zeros_like(x)
    k0_tail = np.zeros_like(x)
    k1_tail = np.zeros_like(x)
    harmonic = 0.0
    for k in range(_SERIES_TERMS):
        if k > 0:
            harmonic += 1.0 / k
            term0 = term0 * q / (k * k)
            term1 = term1 * q / (k * (k + 1))
        psi_k1 = harmonic - EULER_GAMMA
        psi_k2 = harmonic + 1.0 / (k + 1) - EULER_GAMMA
        i0 += term0
        i1_sum += term1
        k0_tail += harmonic * term0
        k1_tail += (psi_k1 + psi_k2) * term1
    k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail
    i1 = 0.5 * x * i1_sum
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail
    return k0, k1


def _integral_k(x, nu):
    s_max = math.acosh(1.0 + _TRAP_CUTOFF / _CROSSOVER)
    s = np.arange(0.0, s_max + _TRAP_STEP, _TRAP_STEP)
    weights = np.full(s.size, _TRAP_STEP)
    weights[0] *= 0.5
    expo = np.exp(-np.multiply.outer(x, np.cosh(s) - 1.0))
    return np.exp(-x) * (expo @ (weights * np.cosh(nu * s)))


def _bessel(x, order):
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise DomainError("modified Bessel K requires x > 0")
    out = np.empty_like(arr)
    small = arr <= _CROSSOVER
    if np.any(small):
        out[small] = _series_k0_k1(arr[small])[order]
    if np.any(~small):
        out[~small] = _integral_k(arr[~small], order)
    return float(out) if scalar else out


def bessel_K0(x):
    """Modified Bessel function of the second kind, order 0, for ``x > 0``."""
    return _bessel(x, 0)


def bessel_K1(x):
    """Modified Bessel function of the second kind, order 1, for ``x > 0``."""
    return _bessel(x, 1)
