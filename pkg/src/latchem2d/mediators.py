"""Effective fermion-fermion potentials mediated by bound bosonic states.

Scheme I (one boson, repulsion ``U``): the bound state above the band sits
at ``E_B`` with ``1/U = Sigma(E_B, 0)``; two fermions ``d`` apart push it to
``E_up`` with ``1/U = Sigma(E_up, 0) + |Sigma(E_up, d)|``, and
``delta_up = E_up - 4 t_a`` follows ``~ 1/d`` at short range.

Scheme II (two-level mediators): fourth-order perturbation theory in ``g``
gives a pair potential decaying as ``exp(-2 d sqrt(delta_II / t_a))``.
All energies are in units of ``t_a`` unless stated otherwise.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .curves import EffectivePotentialCurve
from .errors import ConvergenceError, DomainError, RegimeError
from .greens import (lattice_sum, sigma0_analytic, sigma0_lattice_sum, sigma_d_analytic)
from .hamiltonians.mediator import MediatorParamsI, MediatorParamsII, build_mediator_I
from .lattice import LatticeSpec
from .special import EULER_GAMMA, bessel_K0, bessel_K1
from .solvers.ite import WaveState

BOUND_METHODS = ("analytic", "lattice-sum")
LENGTH_WINDOW_PREFACTOR = 2.0 ** -2.5


# --------------------------------------------------------------------------- scheme I


@dataclass
class BoundStateI:
    E_B: float
    delta_B: float
    residual: float
    method: str
    wavefunction: WaveState | None = None
    norm_factor: float | None = None

    @property
    def length(self) -> float:
        """Decay length ``(delta_B / t_a)^(-1/2)`` in lattice units."""
        return self.delta_B ** -0.5


def delta_B_asymptote(U: float, t_a: float = 1.0) -> float:
    """Weak-coupling bound-state detuning ``2^5 exp(-4 pi t_a / U) t_a``."""
    return 32.0 * math.exp(-4.0 * math.pi * t_a / U) * t_a


def _sigma0(z, t, lattice, method):
    if method == "analytic":
        return sigma0_analytic(z, t)
    if lattice is None:
        raise DomainError("lattice-sum method needs a lattice")
    return sigma0_lattice_sum(z, lattice, t)


def _brent(f, lo, hi, what):
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) == np.sign(fhi):
        raise ConvergenceError(f"no {what} root in bracket [{lo}, {hi}]")
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def solve_bound_state_I(params: MediatorParamsI, lattice: LatticeSpec | None = None,
                        method: str = "analytic") -> BoundStateI:
    """Energy of the single-fermion bound state above the band.

    Solves ``1/U = Sigma(E_B, 0)`` with Brent's method on
    ``(4 t_a, U + 8 t_a)``.  ``method="lattice-sum"`` uses the exact finite
    lattice sum, which for small ``U`` may have no root above ``4 t_a``.
    """
    if method not in BOUND_METHODS:
        raise DomainError(f"method must be one of {BOUND_METHODS}")
    t = params.t_a
    edge = 4.0 * t
    lo = edge * (1.0 + 4 * np.finfo(float).eps)
    if method == "lattice-sum":
        top = float(np.max(lattice.dispersion_grid(t))) if lattice is not None else edge
        lo = max(lo, top * (1.0 + 4 * np.finfo(float).eps) + 1e-11 * t)
    f = lambda E: 1.0 / params.U - _sigma0(E, t, lattice, method)
    try:
        E_B = _brent(f, lo, params.U + 2 * edge, "bound-state")
    except ConvergenceError as exc:
        raise ConvergenceError(f"{exc}; U/t_a={params.U / t} is too small for this lattice") from exc
    return BoundStateI(E_B, E_B - edge, abs(f(E_B)), method)


def _resolvent_grid(E_B: float, lattice: LatticeSpec, t: float) -> np.ndarray:
    omega = lattice.dispersion_grid(t)
    gap = E_B - omega
    if np.min(gap) <= 0:
        raise DomainError("energy is not above every lattice eigenvalue")
    return 1.0 / gap


def bound_wavefunction(E_B: float, lattice: LatticeSpec, t: float = 1.0, center=(0, 0)):
    """Real-space bound-state profile ``(1/sqrt(N_1B)) (1/N^2) sum_k e^{-ik(j-j0)}/(E_B - omega_k)``.

    Returns
    -------
    (WaveState, float)
        Normalised position-basis state centred on ``center`` and ``N_1B``.
    """
    res = _resolvent_grid(E_B, lattice, t)
    n1b = math.fsum((res ** 2).ravel()) / lattice.n_sites
    profile = np.fft.fft2(res).real / lattice.n_sites / math.sqrt(n1b)
    profile = np.roll(profile, shift=tuple(int(c) for c in center), axis=(0, 1))
    state = WaveState(profile.ravel(), "position",
                      {"E_B": E_B, "N": lattice.N, "center": list(center), "N_1B": n1b})
    return state, n1b


def franck_condon_hopping(E_B: float, t_F: float, lattice: LatticeSpec, t: float = 1.0) -> float:
    """Dressed fermion hopping ``(t_F/N_1B) (1/N^2) sum_k e^{-i k_x} / (E_B - omega_k)^2``.

    The value is signed: states above the band alternate in sign from site
    to site, so the overlap of neighbouring profiles is negative.  Its
    magnitude never exceeds ``t_F``.
    """
    res = _resolvent_grid(E_B, lattice, t)
    kx, _ = lattice.momentum_grid()
    n1b = math.fsum((res ** 2).ravel())
    num = math.fsum((np.cos(kx) * res ** 2).ravel())
    return t_F * num / n1b


def two_site_bound_energy(params: MediatorParamsI, d, lattice: LatticeSpec | None = None,
                          method: str = "lattice-sum", E_B: float | None = None) -> float:
    """Upper bound state with two fermions: ``1/U = Sigma(E,0) + |Sigma(E,d)|``."""
    t = params.t_a
    if E_B is None:
        E_B = solve_bound_state_I(params, lattice, method).E_B
    if method == "analytic":
        f = lambda E: 1.0 / params.U - sigma0_analytic(E, t) - abs(sigma_d_analytic(E, d, t))
    else:
        f = lambda E: 1.0 / params.U - sigma0_lattice_sum(E, lattice, t) - abs(
            lattice_sum(E, d, lattice, t, shifted=True))
    return _brent(f, E_B, 4.0 * t + 2.0 * params.U, "two-site bound-state")


def v_I_prefactor(U: float, t_a: float = 1.0) -> float:
    """``V_I0 = 2^(7/2) exp(-gamma - 2 pi t_a / U) t_a``."""
    return 2.0 ** 3.5 * math.exp(-EULER_GAMMA - 2.0 * math.pi * t_a / U) * t_a


def v_I_window(U: float, N: int | None = None, t_a: float = 1.0,
               prefactor: float = LENGTH_WINDOW_PREFACTOR) -> float:
    """Largest separation of the ``1/d`` regime, ``prefactor * exp(2 pi t_a / U)``.

    The default prefactor ``2^(-5/2)`` equals the bound-state length
    ``delta_B^(-1/2)`` of the weak-coupling asymptote; ``0.06`` is the
    stricter choice.  Returns 0 if the length does not fit well inside ``N``.
    """
    length = prefactor * math.exp(2.0 * math.pi * t_a / U)
    if N is not None and length >= N:
        return 0.0
    return length


def v_I_curve(params: MediatorParamsI, lattice: LatticeSpec | None, d_range, mode: str = "analytic",
              window_prefactor: float = LENGTH_WINDOW_PREFACTOR) -> EffectivePotentialCurve:
    """``delta_up(d) = E_up(d) - 4 t_a`` for fermions ``d`` sites apart along ``x``.

    Modes: ``"analytic"`` (``V_I0 / d``), ``"root"`` (solve the two-site
    bound-state condition with lattice sums, or continuum sums when
    ``lattice`` is None) and ``"ed"`` (top eigenvalue of the one-boson
    Hamiltonian with two static fermions).
    """
    d = np.asarray(list(d_range), dtype=float)
    if d.size == 0 or np.any(d <= 0):
        raise DomainError("separations must be positive")
    t = params.t_a
    if mode == "analytic":
        vals = v_I_prefactor(params.U, t) / d
    elif mode == "root":
        method = "analytic" if lattice is None else "lattice-sum"
        E_B = solve_bound_state_I(params, lattice, method).E_B
        vals = np.array([two_site_bound_energy(params, (int(x), 0), lattice, method, E_B) - 4 * t
                         for x in d])
    elif mode == "ed":
        from .solvers.ed import ed_extremal
        if lattice is None:
            raise DomainError("ED mode needs a lattice")
        c = lattice.N // 2
        vals = []
        for x in d.astype(int):
            left = c - x // 2
            H = build_mediator_I(lattice, params, [(left, c), (left + x, c)])
            vals.append(ed_extremal(H, "highest", 1).ground - 4 * t)
        vals = np.array(vals)
    else:
        raise DomainError("mode must be 'analytic', 'root' or 'ed'")
    limit = v_I_window(params.U, lattice.N if lattice is not None else None, t, window_prefactor)
    return EffectivePotentialCurve(d, vals, "scheme-I", mode, d < limit, "t_a",
                                   meta={"U": params.U, "t_a": t, "window": limit,
                                         "N": lattice.N if lattice is not None else None})


# --------------------------------------------------------------------------- scheme II


@dataclass
class SchemeIIDetuning:
    delta_bare: float
    delta_II: float
    E2: float
    N_f: int


def delta_II(params: MediatorParamsII, N_f: int, lattice: LatticeSpec | None = None) -> SchemeIIDetuning:
    """Dressed detuning ``delta_II = delta + E2 / N_f`` with ``E2 = N_f g^2 Sigma(U - Delta, 0)``.

    ``delta = U - Delta - 4 t_a`` is the distance of the bare pole from the
    a-band top.  ``E2`` is positive: every denominator ``U - Delta - omega_k``
    is positive above the band.
    """
    delta = params.detuning
    if delta <= 0:
        raise RegimeError(f"bare detuning U - Delta - 4 t_a = {delta} must be positive")
    z = params.U - params.Delta
    sigma = sigma0_analytic(z, params.t_a) if lattice is None else sigma0_lattice_sum(z, lattice, params.t_a)
    E2 = N_f * params.g ** 2 * sigma
    return SchemeIIDetuning(delta, delta + E2 / N_f, E2, N_f)


def v_II_closed_form(d, g: float, delta: float, t_a: float = 1.0):
    """``(2 g^4 / ((2 pi)^2 t_a^2)) K0(x) K1(x) d / (2 sqrt(delta t_a))`` with ``x = d sqrt(delta/t_a)``."""
    d = np.asarray(d, dtype=float)
    x = d * math.sqrt(delta / t_a)
    return 2.0 * g ** 4 / ((2 * math.pi) ** 2 * t_a ** 2) * bessel_K0(x) * bessel_K1(x) * d / (
        2.0 * math.sqrt(delta * t_a))


def v_II_asymptotic(d, g: float, delta: float, t_a: float = 1.0):
    """``g^4 / (8 pi t_a^2 delta) exp(-2 d sqrt(delta / t_a))``."""
    d = np.asarray(d, dtype=float)
    return g ** 4 / (8 * math.pi * t_a ** 2 * delta) * np.exp(-2.0 * d * math.sqrt(delta / t_a))


def v_II_lattice(d, g: float, delta: float, lattice: LatticeSpec, t_a: float = 1.0) -> float:
    """Finite-lattice pair term ``2 g^4 Sigma_2(z, d) Sigma_1(z, d)`` at ``z = 4 t_a + delta``."""
    z = 4.0 * t_a + delta
    s1 = lattice_sum(z, d, lattice, t_a)
    s2 = lattice_sum(z, d, lattice, t_a, power=2)
    return float((2.0 * g ** 4 * s2 * np.conj(s1)).real)


def v_II_decay_length(delta: float, t_a: float = 1.0) -> float:
    """``L_II / a = (2 sqrt(delta / t_a))^(-1)``."""
    return 0.5 / math.sqrt(delta / t_a)


def v_II_curve(params: MediatorParamsII, N_f: int, d_range,
               lattice: LatticeSpec | None = None) -> EffectivePotentialCurve:
    """Scheme-II pair potential: closed form for every ``d`` and the exponential for ``d sqrt(delta_II) > 1``.

    ``in_window`` marks points where the perturbative regime holds and the
    exponential form applies.
    """
    det = delta_II(params, N_f, lattice)
    d = np.asarray(list(d_range), dtype=float)
    if d.size == 0 or np.any(d <= 0):
        raise DomainError("separations must be positive")
    t = params.t_a
    closed = v_II_closed_form(d, params.g, det.delta_II, t)
    x = d * math.sqrt(det.delta_II / t)
    asym = np.where(x > 1.0, v_II_asymptotic(d, params.g, det.delta_II, t), np.nan)
    flags = params.regime_flags()
    window = (x > 1.0) & flags["weak_coupling"]
    extra = {"asymptotic": asym}
    if lattice is not None:
        extra["lattice"] = np.array([v_II_lattice((int(v), 0), params.g, det.delta_II, lattice, t) for v in d])
    return EffectivePotentialCurve(d, closed, "scheme-II", "analytic", window, "t_a", extra=extra,
                                   meta={"delta_II": det.delta_II, "delta": det.delta_bare, "E2": det.E2,
                                         "g": params.g, "U": params.U, "Delta": params.Delta,
                                         "decay_length": v_II_decay_length(det.delta_II, t)})


@dataclass
class PairwiseExpansion:
    zeroth: float
    second: float
    pairs: dict = field(default_factory=dict)
    delta_II: float = 0.0

    @property
    def fourth(self) -> float:
        return math.fsum(self.pairs.values())

    @property
    def total(self) -> float:
        return self.zeroth + self.second + self.fourth


def pairwise_energy_expansion(fermion_sites, params: MediatorParamsII,
                              lattice: LatticeSpec | None = None, strict: bool = False) -> PairwiseExpansion:
    """Perturbative bound-state energy ``N_f U + E2 + sum_{i<j} V_II(r_i - r_j)``.

    With ``lattice`` the pair terms are the exact finite-lattice double sums;
    otherwise the continuum closed form at the Euclidean distance is used.
    ``strict=True`` raises when the weak-coupling flags fail.
    """
    sites = [tuple(int(v) for v in s) for s in fermion_sites]
    if len(set(sites)) != len(sites):
        raise DomainError("fermion sites must be distinct")
    flags = params.regime_flags()
    if strict and not (flags["weak_coupling"] and flags["above_band"]):
        raise RegimeError(f"perturbative regime violated: {flags}")
    n_f = len(sites)
    det = delta_II(params, n_f, lattice)
    pairs = {}
    for a, b in itertools.combinations(range(n_f), 2):
        dx = sites[b][0] - sites[a][0]
        dy = sites[b][1] - sites[a][1]
        if lattice is not None:
            pairs[(a, b)] = v_II_lattice((dx, dy), params.g, det.delta_II, lattice, params.t_a)
        else:
            pairs[(a, b)] = float(v_II_closed_form(math.hypot(dx, dy), params.g, det.delta_II, params.t_a))
    zeroth = n_f * params.U
    return PairwiseExpansion(zeroth, det.E2, pairs, det.delta_II)
