"""Square-lattice geometry, momentum grid, dispersion and Fourier transforms.

Sites are flattened row-major, ``k = x * N + y``.  Momenta are
``2 pi m / N`` for ``m = 0 .. N-1`` along each axis (no half shift), so the
grid is the one produced by a plain FFT.  The position/momentum transform is
the unitary (``norm="ortho"``) FFT, i.e. a factor ``1/N`` per 2D transform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft
from scipy import sparse

from .errors import DomainError

BOUNDARIES = ("open", "periodic")


class Site(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class LatticeSpec:
    """An ``N x N`` square lattice with unit spacing."""

    N: int
    boundary: str = "open"
    a: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"lattice side must be an integer >= 2, got {self.N!r}")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.a != 1.0:
            raise DomainError("lattice spacing is the length unit and must be 1")

    @property
    def n_sites(self) -> int:
        return self.N * self.N

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    def with_boundary(self, boundary: str) -> "LatticeSpec":
        return LatticeSpec(self.N, boundary)

    def flatten(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        if np.any((x < 0) | (x >= self.N) | (y < 0) | (y >= self.N)):
            raise DomainError(f"site outside the {self.N}x{self.N} lattice")
        k = x * self.N + y
        return int(k) if k.ndim == 0 else k

    def unflatten(self, k):
        k = np.asarray(k)
        if np.any((k < 0) | (k >= self.n_sites)):
            raise DomainError("flat index outside the lattice")
        x, y = np.divmod(k, self.N)
        if k.ndim == 0:
            return Site(int(x), int(y))
        return x, y

    def coordinates(self):
        """Integer ``(x, y)`` coordinate arrays of all sites in flat order."""
        return np.divmod(np.arange(self.n_sites), self.N)

    def momenta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.N) / self.N

    def momentum_grid(self):
        """``(kx, ky)`` arrays of shape ``(N, N)`` matching FFT output order."""
        k = self.momenta()
        return np.meshgrid(k, k, indexing="ij")

    def dispersion_grid(self, t: float = 1.0) -> np.ndarray:
        kx, ky = self.momentum_grid()
        return dispersion(kx, ky, t)

    def neighbor_shifts(self):
        """Yield ``(source, target)`` flat-index arrays for the four hopping directions.

        Open boundaries drop bonds that leave the lattice.  With periodic
        boundaries and ``N == 2`` the +x and -x neighbours coincide; both bonds
        are kept so that the real-space operator matches the dispersion.
        """
        x, y = self.coordinates()
        src = np.arange(self.n_sites)
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if self.periodic:
                nx %= self.N
                ny %= self.N
                yield src, nx * self.N + ny
            else:
                ok = (nx >= 0) & (nx < self.N) & (ny >= 0) & (ny < self.N)
                yield src[ok], (nx * self.N + ny)[ok]

    def hopping_matrix(self, t: float = 1.0) -> sparse.csr_matrix:
        """Nearest-neighbour kinetic operator ``-t sum_<ij> c_i^dag c_j`` (both orderings)."""
        rows, cols = [], []
        for s, d in self.neighbor_shifts():
            rows.append(d)
            cols.append(s)
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.full(rows.size, -float(t))
        m = sparse.coo_matrix((vals, (rows, cols)), shape=(self.n_sites, self.n_sites))
        return m.tocsr()

    def coordination(self) -> np.ndarray:
        counts = np.zeros(self.n_sites, dtype=int)
        for s, _ in self.neighbor_shifts():
            np.add.at(counts, s, 1)
        return counts


def dispersion(kx, ky, t: float = 1.0):
    """Tight-binding band ``-2 t (cos kx + cos ky)``, spanning ``[-4t, 4t]``."""
    return -2.0 * t * (np.cos(kx) + np.cos(ky))


def _slot_shape(amplitudes: np.ndarray, lattice: LatticeSpec, slots: int):
    expected = lattice.n_sites ** slots
    if amplitudes.size != expected:
        raise DomainError(
            f"state has {amplitudes.size} amplitudes, expected {expected} "
            f"for {slots} slot(s) on an {lattice.N}x{lattice.N} lattice"
        )
    return (lattice.N,) * (2 * slots)


def to_momentum(amplitudes, lattice: LatticeSpec, slots: int = 1) -> np.ndarray:
    """Unitary transform of a position-basis state to the momentum basis.

    ``slots`` particle coordinates are transformed jointly; the result has
    the same flat layout as the input.
    """
    amplitudes = np.asarray(amplitudes)
    shape = _slot_shape(amplitudes, lattice, slots)
    out = sfft.fftn(amplitudes.reshape(shape), norm="ortho")
    return out.reshape(amplitudes.shape)


def to_position(amplitudes, lattice: LatticeSpec, slots: int = 1) -> np.ndarray:
    """Inverse of :func:`to_momentum`."""
    amplitudes = np.asarray(amplitudes)
    shape = _slot_shape(amplitudes, lattice, slots)
    out = sfft.ifftn(amplitudes.reshape(shape), norm="ortho")
    return out.reshape(amplitudes.shape)


def kinetic_exponential_diag(dt: float, t: float, lattice: LatticeSpec) -> np.ndarray:
    """Momentum-space factor ``exp(-omega_k dt)`` on the ``(N, N)`` grid."""
    if dt < 0:
        raise DomainError("imaginary-time step must be non-negative")
    return np.exp(-lattice.dispersion_grid(t) * dt)
