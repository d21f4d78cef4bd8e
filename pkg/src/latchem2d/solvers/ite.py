"""Split-step imaginary-time evolution over a :class:`SplitHamiltonian`.

One step applies, in order, the exact on-site conversion exponential, the
position-diagonal exponential and the a-hopping exponential (diagonal in
momentum space, reached by FFT over every a-slot), then renormalises.
Evolving under ``-H`` (``target="highest"``) selects the top of the spectrum.
A constant energy shift only rescales each step and cancels in the
renormalisation; it is recorded in the report for bookkeeping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from ..errors import ConvergenceError, DomainError
from ..hamiltonians.mediator import SplitHamiltonian, inner, norm
from ..io import read_blob, write_blob


@dataclass
class WaveState:
    """Normalised amplitude vector over a catalog (or the lattice) with a basis tag."""

    amplitudes: np.ndarray
    basis: str = "catalog"
    meta: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def save(self, path) -> None:
        header = {"kind": "wave_state", "basis": self.basis, "dimension": self.dimension, "meta": self.meta}
        write_blob(path, header, {"amplitudes": self.amplitudes})

    @classmethod
    def load(cls, path) -> "WaveState":
        header, arrays = read_blob(path)
        if header.get("kind") != "wave_state":
            raise ValueError("file does not hold a wave state")
        return cls(arrays["amplitudes"], header["basis"], header.get("meta", {}))


@dataclass
class ITEConfig:
    """Step size, stopping rule and target of an imaginary-time run.

    ``dt=None`` picks ``dt_scale / width`` from a spectral-width estimate.
    Convergence is declared when ``1 - |<psi_{k-1}|psi_k>| < overlap_tol``.
    """

    dt: float | None = None
    overlap_tol: float = 1e-5
    shift: float | None = None
    max_iters: int = 200_000
    target: str = "lowest"
    dt_scale: float = 0.05
    max_halvings: int = 6
    energy_every: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.overlap_tol > 0:
            raise DomainError("overlap_tol must be positive")
        if self.target not in ("lowest", "highest"):
            raise DomainError("target must be 'lowest' or 'highest'")


@dataclass
class ConvergenceReport:
    converged: bool
    iterations: int
    final_defect: float
    dt: float
    shift: float
    halvings: int = 0
    energies: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"converged": self.converged, "iterations": self.iterations,
                "final_defect": self.final_defect, "dt": self.dt, "shift": self.shift,
                "halvings": self.halvings}


def spectral_bounds(model: SplitHamiltonian) -> tuple[float, float]:
    """Interval guaranteed to contain the spectrum (Gershgorin-style)."""
    lo, hi = math.inf, -math.inf
    conv = model.g * 2 * math.sqrt(max(1, max(s.n_a for s in model.sectors))) * len(
        {l.site for l in model.links})
    for s in model.sectors:
        d = np.asarray(s.diagonal, dtype=float)
        band = 4.0 * abs(model.t_a) * s.n_a
        lo = min(lo, float(d.min()) - band - conv)
        hi = max(hi, float(d.max()) + band + conv)
    return lo, hi


def _sign(target: str) -> float:
    return 1.0 if target == "lowest" else -1.0


def coupling_exponential(dt: float, g: float, state: list[np.ndarray], model: SplitHamiltonian,
                         sign: float = 1.0) -> list[np.ndarray]:
    """Exact ``exp(-sign * dt * g * sum_x (b_x^dag a_x + h.c.))`` on a sector-array state.

    Each link pairs ``phi_lower(x, m)`` with ``phi_upper(m)``; the pair rotates
    hyperbolically with angle ``g dt sqrt(n)``, ``n`` being the a-occupation
    of site ``x`` before conversion.  Configurations whose partner lies
    outside a truncated catalog have no link and are left unchanged, i.e. each
    site's factor is the exact exponential of that site's coupling projected
    onto the catalog.  Without truncation the site factors commute and the
    product is exact; with truncation it carries an ``O(dt^2)`` splitting
    error like the other factors of the step.
    """
    out = [a.copy() for a in state]
    theta = g * dt
    if theta == 0:
        return out
    # per-site exponentials commute; links of one site act on disjoint pairs
    for link in sorted(model.links, key=lambda l: l.site):
        k = model.sectors[link.lower].n_a
        x = link.site
        lo, hi = out[link.lower], out[link.upper]
        n = 1.0 + model.slot_count(x, k - 1)
        root = np.sqrt(n)
        ch = np.cosh(theta * root)
        sh = np.sinh(theta * root)
        slice_old = lo[x].copy() if k > 1 else lo[x]
        hi_old = hi.copy() if k > 1 else hi[()]
        hi_new = ch * hi_old - sign * (sh / root) * math.sqrt(k) * slice_old
        slice_new = ch * slice_old - sign * np.sqrt(n / k) * sh * hi_old
        if k > 1:
            out[link.upper] = hi_new
            for slot in range(k):
                lo[(slice(None),) * slot + (x,)] = slice_new
        else:
            out[link.upper] = np.asarray(hi_new, dtype=hi.dtype)
            lo[x] = slice_new
    return out


class _Stepper:
    def __init__(self, model: SplitHamiltonian, dt: float, sign: float, real: bool):
        self.model = model
        self.dt = dt
        self.sign = sign
        self.real = real
        N = model.lattice.N
        self.grids = []
        self.kin = []
        self.diag = []
        for s in model.sectors:
            grid = (N,) * (2 * s.n_a)
            self.grids.append(grid)
            self.diag.append(np.exp(-sign * dt * np.asarray(s.diagonal, dtype=float)))
            if s.n_a and model.t_a:
                fac = np.exp(-sign * dt * model._dispersion_sum(s.n_a))
                if real:
                    fac = np.ascontiguousarray(fac[..., : N // 2 + 1])
                self.kin.append(fac)
            else:
                self.kin.append(None)

    def step(self, state):
        m = self.model
        state = coupling_exponential(self.dt, m.g, state, m, self.sign)
        out = []
        for phi, grid, dfac, kfac in zip(state, self.grids, self.diag, self.kin):
            phi = phi * dfac
            if kfac is not None:
                shape = phi.shape
                if self.real:
                    mom = sfft.rfftn(phi.reshape(grid), norm="ortho")
                    phi = sfft.irfftn(mom * kfac, s=grid, norm="ortho").reshape(shape)
                else:
                    mom = sfft.fftn(phi.reshape(grid), norm="ortho")
                    phi = sfft.ifftn(mom * kfac, norm="ortho").reshape(shape)
            out.append(phi)
        nrm = norm(out)
        if not math.isfinite(nrm) or nrm == 0:
            raise FloatingPointError("non-finite amplitude")
        return [a / nrm for a in out]


def rayleigh(model: SplitHamiltonian, state: list[np.ndarray]) -> float:
    return float(inner(state, model.apply(state)).real)


def ite_ground(model: SplitHamiltonian, config: ITEConfig | None = None,
               warm_start: WaveState | list[np.ndarray] | None = None,
               rng: np.random.Generator | None = None):
    """Imaginary-time projection onto the lowest (or highest) eigenstate.

    Returns
    -------
    (WaveState, float, ConvergenceReport)
        Packed state, Rayleigh-quotient energy of ``H`` and the run report.
    """
    config = config or ITEConfig()
    if model.t_b != 0:
        raise NotImplementedError("split-step evolution does not implement b-level hopping")
    if model.lattice.boundary != "periodic":
        raise DomainError("split-step evolution requires a periodic lattice")
    sign = _sign(config.target)
    lo, hi = spectral_bounds(model)
    shift = config.shift if config.shift is not None else (-lo if sign > 0 else hi)
    dt = config.dt if config.dt is not None else config.dt_scale / max(hi - lo, 1e-12)

    if warm_start is None:
        rng = rng or np.random.default_rng(config.seed)
        start = model.random_state(rng)
    elif isinstance(warm_start, WaveState):
        start = model.unpack(warm_start.amplitudes)
    else:
        start = [np.asarray(a).copy() for a in warm_start]
    nrm = norm(start)
    start = [a / nrm for a in start]
    real = not any(np.iscomplexobj(a) for a in start)

    for halving in range(config.max_halvings + 1):
        try:
            state, report = _run(model, config, start, dt, sign, real, shift)
            report.halvings = halving
            break
        except FloatingPointError:
            dt *= 0.5
    else:
        raise ConvergenceError("non-finite amplitudes persisted after step halving")
    energy = rayleigh(model, state)
    packed = model.pack(state)
    tag = "catalog" if model.catalog is not None else "position"
    return WaveState(packed, tag, {"dt": dt, "target": config.target}), energy, report


def _run(model, config, state, dt, sign, real, shift):
    stepper = _Stepper(model, dt, sign, real)
    energies = []
    defect = math.inf
    best = math.inf
    for it in range(1, config.max_iters + 1):
        new = stepper.step(state)
        overlap = abs(inner(state, new))
        defect = 1.0 - overlap
        best = min(best, defect)
        state = new
        if config.energy_every and it % config.energy_every == 0:
            energies.append(rayleigh(model, state))
        if defect < config.overlap_tol:
            return state, ConvergenceReport(True, it, defect, dt, shift, energies=energies)
    raise ConvergenceError(f"no convergence in {config.max_iters} iterations",
                           best_residual=best, iterations=config.max_iters)


def warm_sweep(parameter_grid, builder, config: ITEConfig | None = None, rng=None,
               checkpoint_dir=None):
    """Run :func:`ite_ground` along a monotone grid, seeding each run with the previous state.

    Parameters
    ----------
    parameter_grid : sequence
        Monotone sequence of parameter values.
    builder : callable
        ``builder(value) -> SplitHamiltonian``; consecutive models must share
        a basis layout.
    checkpoint_dir : path, optional
        When given, each converged state is written as ``point_<i>.lc2d``
        and an existing checkpoint is reused as that point's start.

    Returns
    -------
    list of (parameter, energy, ConvergenceReport)
    """
    from pathlib import Path

    grid = list(parameter_grid)
    diffs = np.diff(np.asarray(grid, dtype=float))
    if diffs.size and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise DomainError("parameter grid must be strictly monotone")
    config = config or ITEConfig()
    rng = rng or np.random.default_rng(config.seed)
    results = []
    previous = None
    for idx, value in enumerate(grid):
        model = builder(value)
        start = previous
        ckpt = Path(checkpoint_dir) / f"point_{idx}.lc2d" if checkpoint_dir else None
        if ckpt is not None and ckpt.exists():
            start = WaveState.load(ckpt)
        try:
            state, energy, report = ite_ground(model, config, start, rng)
        except Exception as exc:
            raise type(exc)(f"grid index {idx} (value {value!r}): {exc}") from exc
        if ckpt is not None:
            state.meta.update({"grid_index": idx, "value": value})
            state.save(ckpt)
        results.append((value, energy, report))
        previous = state
    return results
