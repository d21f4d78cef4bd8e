"""Lattice analogues of atomic and molecular Hamiltonians.

One or two fermions hop on the lattice with rate ``t_F`` and feel the
attraction ``-Z V(|j - r_n|)`` of static nuclei placed half a site off the
lattice nodes along ``y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse

from ..errors import CapacityError, DomainError
from ..lattice import LatticeSpec
from .sparse import SparseHamiltonian

POTENTIAL_FORMS = ("coulomb2d", "exponential")
EXCHANGE_SECTORS = ("antisymmetric", "symmetric")
DEFAULT_MAX_PAIR_DIMENSION = 3_000_000


@dataclass(frozen=True)
class NucleusSpec:
    """Static nucleus of charge ``Z`` at ``(x, y)`` with integer ``x`` and half-integer ``y``."""

    position: tuple[float, float]
    Z: int = 1

    def __post_init__(self):
        x, y = (float(v) for v in self.position)
        object.__setattr__(self, "position", (x, y))
        if int(self.Z) != self.Z or self.Z <= 0:
            raise DomainError(f"nuclear charge must be a positive integer, got {self.Z!r}")
        if x != math.floor(x):
            raise DomainError(f"nucleus x-coordinate must sit on a lattice column, got {x}")
        if y - math.floor(y) != 0.5:
            raise DomainError(f"nucleus y-coordinate must be offset by 1/2 from the nodes, got {y}")

    @classmethod
    def centered(cls, N: int, Z: int = 1) -> "NucleusSpec":
        c = N // 2
        return cls((c, c + 0.5), Z)


def molecular_nuclei(N: int, d: int, Z: int = 1) -> tuple[NucleusSpec, NucleusSpec]:
    """Two nuclei ``d`` sites apart at ``(floor(N/2 -+ d/2), floor(N/2) + 1/2)``."""
    y = N // 2 + 0.5
    return (NucleusSpec((math.floor(N / 2 - d / 2), y), Z),
            NucleusSpec((math.floor(N / 2 + d / 2), y), Z))


@dataclass(frozen=True)
class ChemParams:
    """Fermion hopping, potential strength and nuclei.

    ``potential_form`` is ``"coulomb2d"`` for ``V(r) = V0 / r`` or
    ``"exponential"`` for ``V(r) = V0 exp(-r / decay_length)``.
    """

    t_F: float
    V0: float
    nuclei: tuple[NucleusSpec, ...] = ()
    potential_form: str = "coulomb2d"
    decay_length: float | None = None

    def __post_init__(self):
        if not (self.t_F > 0 and self.V0 > 0):
            raise DomainError("t_F and V0 must be positive")
        if self.potential_form not in POTENTIAL_FORMS:
            raise DomainError(f"potential_form must be one of {POTENTIAL_FORMS}")
        if self.potential_form == "exponential" and not (self.decay_length and self.decay_length > 0):
            raise DomainError("exponential potential needs a positive decay_length")
        object.__setattr__(self, "nuclei", tuple(self.nuclei))

    @property
    def bohr_radius(self) -> float:
        """``a0 / a = t_F / V0``."""
        return self.t_F / self.V0

    @property
    def rydberg(self) -> float:
        """``Ry = V0^2 / t_F``."""
        return self.V0 ** 2 / self.t_F

    def potential(self, r):
        """Potential law ``V(r)`` (positive; attraction carries the minus sign)."""
        r = np.asarray(r, dtype=float)
        if self.potential_form == "coulomb2d":
            with np.errstate(divide="ignore"):
                return self.V0 / r
        return self.V0 * np.exp(-r / self.decay_length)

    def with_nuclei(self, nuclei) -> "ChemParams":
        return ChemParams(self.t_F, self.V0, tuple(nuclei), self.potential_form, self.decay_length)


def nuclear_potential(lattice: LatticeSpec, params: ChemParams) -> np.ndarray:
    """Diagonal ``-sum_n Z_n V(|j - r_n|)`` over flat site index ``j``."""
    x, y = lattice.coordinates()
    out = np.zeros(lattice.n_sites)
    for nuc in params.nuclei:
        nx, ny = nuc.position
        if not (0 <= nx <= lattice.N - 1 and 0 <= ny <= lattice.N - 1):
            raise DomainError(f"nucleus at {nuc.position} lies outside the {lattice.N}x{lattice.N} lattice")
        out -= nuc.Z * params.potential(np.hypot(x - nx, y - ny))
    return out


def nuclear_repulsion(params: ChemParams) -> float:
    """Pairwise ``Z_n Z_m V(|r_n - r_m|)`` between the nuclei, in the units of ``V0``."""
    total = 0.0
    nuc = params.nuclei
    for a in range(len(nuc)):
        for b in range(a + 1, len(nuc)):
            ra, rb = np.array(nuc[a].position), np.array(nuc[b].position)
            total += nuc[a].Z * nuc[b].Z * float(params.potential(np.linalg.norm(ra - rb)))
    return total


def build_single_particle(lattice: LatticeSpec, params: ChemParams) -> SparseHamiltonian:
    """One fermion: hopping ``-t_F`` plus the nuclear attraction on the diagonal."""
    H = lattice.hopping_matrix(params.t_F) + sparse.diags(nuclear_potential(lattice, params))
    return SparseHamiltonian(H.tocsr(), basis="position",
                             meta={"N": lattice.N, "boundary": lattice.boundary, "n_fermions": 1})


@dataclass
class PairBasis:
    """Two-fermion basis of unordered site pairs ``i < j`` (no double occupancy).

    In the antisymmetric sector the basis state is ``f_i^dag f_j^dag |0>``;
    in the symmetric sector it is the normalised symmetric combination.
    """

    lattice: LatticeSpec
    exchange: str = "antisymmetric"
    first: np.ndarray = field(init=False, repr=False)
    second: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.exchange not in EXCHANGE_SECTORS:
            raise DomainError(f"exchange must be one of {EXCHANGE_SECTORS}")
        self.first, self.second = np.triu_indices(self.lattice.n_sites, 1)

    @staticmethod
    def size_for(N: int) -> int:
        S = N * N
        return S * (S - 1) // 2

    @property
    def dimension(self) -> int:
        return self.first.size

    def index(self, i, j):
        """Flat index of the pair ``{i, j}`` with ``i < j``."""
        S = self.lattice.n_sites
        i = np.asarray(i)
        j = np.asarray(j)
        return i * S - i * (i + 1) // 2 + (j - i - 1)

    def to_full(self, amplitudes: np.ndarray) -> np.ndarray:
        """Expand to the ``(N^2, N^2)`` wavefunction ``psi(i, j)`` with unit norm."""
        S = self.lattice.n_sites
        psi = np.zeros((S, S), dtype=np.result_type(amplitudes, float))
        psi[self.first, self.second] = amplitudes / math.sqrt(2.0)
        sign = -1.0 if self.exchange == "antisymmetric" else 1.0
        psi[self.second, self.first] = sign * amplitudes / math.sqrt(2.0)
        return psi


def build_two_fermion(lattice: LatticeSpec, params: ChemParams, repulsion: Callable,
                      exchange: str = "antisymmetric",
                      max_dimension: int = DEFAULT_MAX_PAIR_DIMENSION):
    """Two fermions with nuclear attraction and pair repulsion ``repulsion(|i - j|)``.

    Parameters
    ----------
    lattice, params
        Geometry and single-particle couplings.
    repulsion : callable
        Maps an array of Euclidean pair distances to repulsion energies
        (for example ``params.potential`` or an
        :class:`~latchem2d.curves.EffectivePotentialCurve`).
    exchange : {"antisymmetric", "symmetric"}
        Spatial exchange sector.  The antisymmetric sector carries the
        fermionic sign of a hop past the partner in flat-index order.
    max_dimension : int
        Capacity limit on the pair basis.

    Returns
    -------
    (SparseHamiltonian, PairBasis)
    """
    dim = PairBasis.size_for(lattice.N)
    if dim > max_dimension:
        raise CapacityError(f"two-fermion basis needs {dim} states, limit is {max_dimension}",
                            required=dim, limit=max_dimension)
    basis = PairBasis(lattice, exchange)
    i, j = basis.first, basis.second
    N = lattice.N
    xi, yi = np.divmod(i, N)
    xj, yj = np.divmod(j, N)
    vnuc = nuclear_potential(lattice, params)
    vee = np.asarray(repulsion(np.hypot(xi - xj, yi - yj)), dtype=float)
    if not np.all(np.isfinite(vee)):
        raise DomainError("repulsion is not finite at every occurring pair distance")
    states = np.arange(basis.dimension)
    rows, cols, vals = [states], [states], [vnuc[i] + vnuc[j] + vee]
    shifts = list(lattice.neighbor_shifts())
    for mover, other in ((i, j), (j, i)):
        for src_site, dst_site in shifts:
            # neighbour of every mover site, via a dense site map
            target = np.full(lattice.n_sites, -1)
            target[src_site] = dst_site
            new = target[mover]
            ok = (new >= 0) & (new != other)
            new, partner, old, src = new[ok], other[ok], mover[ok], states[ok]
            lo = np.minimum(new, partner)
            hi = np.maximum(new, partner)
            amp = np.full(new.size, -params.t_F)
            if exchange == "antisymmetric":
                between = (partner > np.minimum(old, new)) & (partner < np.maximum(old, new))
                amp[between] *= -1.0
            rows.append(basis.index(lo, hi))
            cols.append(src)
            vals.append(amp)
    H = sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(basis.dimension, basis.dimension)).tocsr()
    meta = {"N": N, "boundary": lattice.boundary, "n_fermions": 2, "exchange": exchange}
    return SparseHamiltonian(H, basis=f"pairs-{exchange}", meta=meta), basis
