"""Mediator Hamiltonians for static fermions.

Scheme I: a single boson hopping with ``t_a`` and repelled by ``U`` on the
fermion sites.  Scheme II: ``N_f`` two-level mediator atoms; level ``b``
sits only on fermion sites (energy ``U`` each, hard-core), level ``a`` hops
with ``t_a`` and costs ``Delta``, and ``g`` converts between them on site.

Scheme-II states are stored per *sector*, labelled by the set of fermion
sites whose ``b`` level is occupied; the remaining ``k`` atoms are in level
``a``.  A sector's a-part is kept as a symmetric array ``phi`` of shape
``(N^2,) * k`` with ``sum |phi|^2 = 1`` over all sectors.  The catalog
(occupation-number) amplitude of a sorted configuration ``m`` is
``sqrt(k! / prod n_i!) * phi[m]``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from ..errors import CapacityError, DomainError
from ..io import read_blob, write_blob
from ..lattice import LatticeSpec
from .sparse import SparseHamiltonian

DEFAULT_MAX_CATALOG = 6_000_000


@dataclass(frozen=True)
class MediatorParamsI:
    """Single-boson mediator: hopping ``t_a`` and on-site repulsion ``U``."""

    U: float
    t_a: float = 1.0

    def __post_init__(self):
        if not self.t_a > 0:
            raise DomainError("t_a must be positive")
        if not self.U > 0:
            raise DomainError("U must be positive for a bound state above the band")


@dataclass(frozen=True)
class MediatorParamsII:
    """Two-level mediator couplings; ``W = inf`` means an exact hard-core constraint."""

    U: float
    g: float
    Delta: float = 0.0
    t_a: float = 1.0
    t_b: float = 0.0
    W: float = math.inf

    def __post_init__(self):
        if not self.t_a > 0:
            raise DomainError("t_a must be positive")
        if self.t_b < 0 or self.g < 0:
            raise DomainError("t_b and g must be non-negative")

    @property
    def detuning(self) -> float:
        """Bare band-edge detuning ``U - Delta - 4 t_a``."""
        return self.U - self.Delta - 4.0 * self.t_a

    def regime_flags(self, t_F: float | None = None) -> dict[str, bool]:
        """Which perturbative and hierarchy assumptions hold."""
        gap = abs(self.U - self.Delta)
        flags = {
            "weak_coupling": gap > 0 and self.g / gap < 0.1,
            "hard_core": math.isinf(self.W) or abs(self.W) > 10 * abs(self.U),
            "above_band": self.detuning > 0,
        }
        lower = t_F if t_F is not None else 0.0
        flags["hopping_order"] = lower <= self.t_b < self.t_a
        return flags

    def check_regime(self, t_F: float | None = None) -> dict[str, bool]:
        flags = self.regime_flags(t_F)
        bad = [k for k, ok in flags.items() if not ok]
        if bad:
            warnings.warn(f"mediator-II parameters outside assumed regime: {', '.join(bad)}",
                          RuntimeWarning, stacklevel=2)
        return flags


def _flat_sites(lattice: LatticeSpec, sites) -> tuple[int, ...]:
    out = []
    for s in sites:
        if isinstance(s, (int, np.integer)):
            lattice.unflatten(int(s))
            out.append(int(s))
        else:
            x, y = s
            out.append(lattice.flatten(int(x), int(y)))
    if len(set(out)) != len(out):
        raise DomainError("fermion sites must be distinct")
    return tuple(out)


def build_mediator_I(lattice: LatticeSpec, params: MediatorParamsI, fermion_sites=()) -> SparseHamiltonian:
    """One boson: hopping ``-t_a`` plus ``+U`` on every static fermion site."""
    sites = _flat_sites(lattice, fermion_sites)
    diag = np.zeros(lattice.n_sites)
    diag[list(sites)] = params.U
    H = lattice.hopping_matrix(params.t_a) + sparse.diags(diag)
    return SparseHamiltonian(H.tocsr(), basis="position",
                             meta={"N": lattice.N, "boundary": lattice.boundary,
                                   "fermion_sites": list(sites), "U": params.U, "t_a": params.t_a})


# --------------------------------------------------------------------------- catalog


def multisets(n_sites: int, k: int) -> np.ndarray:
    """All sorted ``k``-tuples ``m_0 <= ... <= m_{k-1}`` in lexicographic order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if k == 1:
        return np.arange(n_sites, dtype=np.int64)[:, None]
    if k == 2:
        i, j = np.triu_indices(n_sites)
        return np.stack([i, j], axis=1).astype(np.int64)
    count = math.comb(n_sites + k - 1, k)
    flat = np.fromiter(itertools.chain.from_iterable(
        itertools.combinations_with_replacement(range(n_sites), k)), dtype=np.int64, count=count * k)
    return flat.reshape(count, k)


def _keys(configs: np.ndarray, n_sites: int) -> np.ndarray:
    k = configs.shape[1]
    weights = n_sites ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return configs @ weights


@dataclass
class CatalogSector:
    """Configurations sharing one b-occupied set."""

    b_sites: tuple[int, ...]
    n_a: int
    configs: np.ndarray
    offset: int

    @property
    def size(self) -> int:
        return self.configs.shape[0]

    @property
    def n_b(self) -> int:
        return len(self.b_sites)


@dataclass
class BasisCatalog:
    """Enumerated scheme-II basis with sectors ordered by increasing ``N_a``."""

    lattice: LatticeSpec
    fermion_sites: tuple[int, ...]
    truncate_Na: int | None
    sectors: list[CatalogSector] = field(default_factory=list)

    @property
    def n_mediators(self) -> int:
        return len(self.fermion_sites)

    @property
    def dimension(self) -> int:
        return sum(s.size for s in self.sectors)

    def sector_sizes(self) -> dict[tuple[int, int], int]:
        """Total size per ``(N_b, N_a)`` label."""
        out: dict[tuple[int, int], int] = {}
        for s in self.sectors:
            out[(s.n_b, s.n_a)] = out.get((s.n_b, s.n_a), 0) + s.size
        return out

    def sector_index(self, b_sites) -> int | None:
        b_sites = tuple(sorted(b_sites))
        for idx, s in enumerate(self.sectors):
            if s.b_sites == b_sites:
                return idx
        return None

    def lookup(self, sector: int, configs: np.ndarray) -> np.ndarray:
        """Global indices of sorted configurations inside ``sector`` (``-1`` if absent)."""
        sec = self.sectors[sector]
        S = self.lattice.n_sites
        if sec.n_a == 0:
            return np.full(configs.shape[0], sec.offset, dtype=np.int64)
        ref = _keys(sec.configs, S)
        q = _keys(configs, S)
        pos = np.searchsorted(ref, q)
        pos_c = np.minimum(pos, ref.size - 1)
        found = ref[pos_c] == q
        return np.where(found, sec.offset + pos_c, -1)

    def describe(self) -> dict:
        return {"N": self.lattice.N, "boundary": self.lattice.boundary,
                "fermion_sites": list(self.fermion_sites), "truncate_Na": self.truncate_Na,
                "dimension": self.dimension,
                "sectors": [{"b_sites": list(s.b_sites), "n_a": s.n_a, "size": s.size}
                            for s in self.sectors]}

    def save(self, path) -> None:
        header = {"kind": "basis_catalog", **self.describe()}
        write_blob(path, header, {})

    @classmethod
    def load(cls, path) -> "BasisCatalog":
        header, _ = read_blob(path)
        if header.get("kind") != "basis_catalog":
            raise ValueError("file does not hold a basis catalog")
        lattice = LatticeSpec(header["N"], header["boundary"])
        return build_mediator_II_basis(lattice, len(header["fermion_sites"]), header["fermion_sites"],
                                       header["truncate_Na"])


def catalog_size(N: int, n_mediators: int, truncate_Na: int | None = None) -> int:
    S = N * N
    total = 0
    for n_a in range(n_mediators + 1):
        if truncate_Na is not None and n_a > truncate_Na:
            break
        total += math.comb(n_mediators, n_a) * math.comb(S + n_a - 1, n_a)
    return total


def build_mediator_II_basis(lattice: LatticeSpec, n_mediators: int, fermion_sites,
                            truncate_Na: int | None = None,
                            max_dimension: int = DEFAULT_MAX_CATALOG) -> BasisCatalog:
    """Enumerate the scheme-II basis for ``n_mediators`` atoms bound to as many fermions.

    Level ``b`` is restricted to fermion sites with at most one atom each;
    ``truncate_Na`` drops sectors with more atoms in level ``a``.
    """
    if n_mediators not in (1, 2, 3):
        raise DomainError("n_mediators must be 1, 2 or 3")
    sites = _flat_sites(lattice, fermion_sites)
    if len(sites) != n_mediators:
        raise DomainError("n_mediators must equal the number of fermion sites")
    if truncate_Na is not None and truncate_Na < 0:
        raise DomainError("truncate_Na must be non-negative")
    required = catalog_size(lattice.N, n_mediators, truncate_Na)
    if required > max_dimension:
        raise CapacityError(f"catalog needs {required} states, limit is {max_dimension}",
                            required=required, limit=max_dimension)
    ordered = tuple(sorted(sites))
    catalog = BasisCatalog(lattice, ordered, truncate_Na)
    offset = 0
    for n_a in range(n_mediators + 1):
        if truncate_Na is not None and n_a > truncate_Na:
            break
        configs = multisets(lattice.n_sites, n_a)
        for b_sites in itertools.combinations(ordered, n_mediators - n_a):
            catalog.sectors.append(CatalogSector(tuple(b_sites), n_a, configs, offset))
            offset += configs.shape[0]
    return catalog


# --------------------------------------------------------------------------- split model


@dataclass
class SectorSpec:
    """One block of the split model: ``n_a`` mobile slots and a position-diagonal energy."""

    label: tuple
    n_a: int
    diagonal: float | np.ndarray


@dataclass(frozen=True)
class CouplingLink:
    """On-site conversion at ``site`` between ``lower`` (b empty at site) and ``upper`` (b filled)."""

    site: int
    lower: int
    upper: int


@dataclass
class SplitHamiltonian:
    """Hamiltonian split into diagonal, a-kinetic and conversion parts for split-step evolution.

    States are lists of per-sector symmetric arrays of shape ``(N^2,) * n_a``.
    """

    lattice: LatticeSpec
    sectors: list[SectorSpec]
    t_a: float
    g: float = 0.0
    links: list[CouplingLink] = field(default_factory=list)
    t_b: float = 0.0
    catalog: BasisCatalog | None = None

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    def shape(self, sector: int) -> tuple[int, ...]:
        return (self.n_sites,) * self.sectors[sector].n_a

    def zeros(self, dtype=float) -> list[np.ndarray]:
        return [np.zeros(self.shape(i), dtype=dtype) for i in range(len(self.sectors))]

    def dimension(self) -> int:
        """Length of the packed (catalog) vector."""
        S = self.n_sites
        return sum(math.comb(S + s.n_a - 1, s.n_a) for s in self.sectors)

    def random_state(self, rng: np.random.Generator) -> list[np.ndarray]:
        return self.unpack(rng.standard_normal(self.dimension()))

    # catalog <-> arrays ------------------------------------------------------

    def _configs(self, sector: int) -> np.ndarray:
        if self.catalog is not None:
            return self.catalog.sectors[sector].configs
        return multisets(self.n_sites, self.sectors[sector].n_a)

    @staticmethod
    def _multiplicity_weight(configs: np.ndarray) -> np.ndarray:
        """``sqrt(k! / prod n_i!)`` for sorted configurations."""
        k = configs.shape[1]
        if k <= 1:
            return np.ones(configs.shape[0])
        runs = np.ones(configs.shape[0])
        denom = np.ones(configs.shape[0])
        for c in range(1, k):
            same = configs[:, c] == configs[:, c - 1]
            runs = np.where(same, runs + 1, 1.0)
            denom *= runs
        return np.sqrt(math.factorial(k) / denom)

    def unpack(self, vector: np.ndarray) -> list[np.ndarray]:
        """Catalog amplitudes to symmetric sector arrays."""
        arrays = []
        offset = 0
        for idx, sec in enumerate(self.sectors):
            configs = self._configs(idx)
            n = configs.shape[0]
            chunk = vector[offset:offset + n]
            offset += n
            arr = np.zeros(self.shape(idx), dtype=vector.dtype)
            if sec.n_a == 0:
                arr[()] = chunk[0]
            else:
                vals = chunk / self._multiplicity_weight(configs)
                for perm in set(itertools.permutations(range(sec.n_a))):
                    arr[tuple(configs[:, p] for p in perm)] = vals
            arrays.append(arr)
        if offset != vector.size:
            raise DomainError("vector length does not match the split model")
        return arrays

    def pack(self, arrays: list[np.ndarray]) -> np.ndarray:
        parts = []
        for idx, sec in enumerate(self.sectors):
            configs = self._configs(idx)
            if sec.n_a == 0:
                parts.append(np.atleast_1d(arrays[idx][()]))
            else:
                parts.append(arrays[idx][tuple(configs.T)] * self._multiplicity_weight(configs))
        return np.concatenate(parts)

    # operator application ---------------------------------------------------

    def _dispersion_sum(self, n_a: int) -> np.ndarray:
        """``sum_i omega(k_i)`` on the ``(N, N) * n_a`` momentum grid."""
        omega = self.lattice.dispersion_grid(self.t_a)
        total = np.zeros((self.lattice.N,) * (2 * n_a))
        for slot in range(n_a):
            shape = [1] * (2 * n_a)
            shape[2 * slot] = shape[2 * slot + 1] = self.lattice.N
            total = total + omega.reshape(shape)
        return total

    def slot_count(self, site: int, n_slots: int) -> np.ndarray:
        """Number of slots equal to ``site`` for every entry of a ``(N^2,) * n_slots`` array."""
        ind = np.zeros(self.n_sites)
        ind[site] = 1.0
        count = np.zeros((self.n_sites,) * n_slots) if n_slots else np.zeros(())
        for slot in range(n_slots):
            shape = [1] * n_slots
            shape[slot] = self.n_sites
            count = count + ind.reshape(shape)
        return count

    def apply(self, arrays: list[np.ndarray]) -> list[np.ndarray]:
        """``H`` acting on a state in sector-array form."""
        if self.t_b != 0:
            raise NotImplementedError("sector-array form does not carry b-level hopping")
        import scipy.fft as sfft
        out = []
        N = self.lattice.N
        for idx, sec in enumerate(self.sectors):
            phi = arrays[idx]
            res = sec.diagonal * phi
            if sec.n_a > 0 and self.t_a != 0:
                grid = (N,) * (2 * sec.n_a)
                mom = sfft.fftn(phi.reshape(grid), norm="ortho") * self._dispersion_sum(sec.n_a)
                kin = sfft.ifftn(mom, norm="ortho").reshape(phi.shape)
                res = res + (kin.real if not np.iscomplexobj(phi) else kin)
            out.append(np.asarray(res, dtype=np.result_type(phi, float)))
        for link in self.links:
            lo, hi = arrays[link.lower], arrays[link.upper]
            k = self.sectors[link.lower].n_a
            x = link.site
            out[link.upper] = out[link.upper] + self.g * math.sqrt(k) * lo[x]
            add = self.g / math.sqrt(k) * hi
            for slot in range(k):
                index = (slice(None),) * slot + (x,)
                out[link.lower][index] = out[link.lower][index] + add
        return out


def inner(a: list[np.ndarray], b: list[np.ndarray]) -> complex:
    return sum(np.vdot(x, y) for x, y in zip(a, b))


def norm(a: list[np.ndarray]) -> float:
    return math.sqrt(sum(float(np.vdot(x, x).real) for x in a))


class MediatorIIHamiltonian:
    """Scheme-II Hamiltonian over a :class:`BasisCatalog` in term-split form.

    ``terms`` holds the sparse matrices of (i) the position-diagonal part,
    (ii) a-hopping, (iii) b-hopping and (iv) the ``g`` conversion; ``split``
    is the equivalent sector-array model used by the split-step solver.
    The hard-core constraint is exact: doubly occupied b levels are never
    enumerated, so ``W`` never enters a matrix element.
    """

    def __init__(self, catalog: BasisCatalog, params: MediatorParamsII):
        if catalog.n_mediators not in (1, 2, 3):
            raise DomainError("catalog/params mismatch: unsupported mediator count")
        if not math.isinf(params.W) and params.W <= 0:
            raise DomainError("finite W must be positive; the catalog assumes hard-core b atoms")
        self.catalog = catalog
        self.params = params

    @property
    def dimension(self) -> int:
        return self.catalog.dimension

    def _diag_values(self) -> np.ndarray:
        p = self.params
        return np.concatenate([np.full(s.size, p.U * s.n_b + p.Delta * s.n_a) for s in self.catalog.sectors])

    def _a_hopping(self) -> sparse.csr_matrix:
        cat = self.catalog
        lat = cat.lattice
        rows, cols, vals = [], [], []
        shifts = list(lat.neighbor_shifts())
        for si, sec in enumerate(cat.sectors):
            if sec.n_a == 0:
                continue
            C = sec.configs
            src = sec.offset + np.arange(sec.size)
            for slot in range(sec.n_a):
                # act on the first copy of each distinct site only
                first = np.ones(sec.size, dtype=bool) if slot == 0 else C[:, slot] != C[:, slot - 1]
                occ = (C == C[:, [slot]]).sum(axis=1)
                for s_from, s_to in shifts:
                    target = np.full(lat.n_sites, -1)
                    target[s_from] = s_to
                    new_site = target[C[:, slot]]
                    ok = first & (new_site >= 0)
                    if not np.any(ok):
                        continue
                    moved = C[ok].copy()
                    moved[:, slot] = new_site[ok]
                    occ_new = (moved == new_site[ok][:, None]).sum(axis=1)  # after the move
                    moved.sort(axis=1)
                    dst = cat.lookup(si, moved)
                    amp = -self.params.t_a * np.sqrt(occ[ok] * occ_new)
                    rows.append(dst)
                    cols.append(src[ok])
                    vals.append(amp)
        return self._assemble(rows, cols, vals)

    def _b_hopping(self) -> sparse.csr_matrix:
        cat = self.catalog
        lat = cat.lattice
        rows, cols, vals = [], [], []
        if self.params.t_b != 0:
            neighbours = {}
            for s_from, s_to in lat.neighbor_shifts():
                for a, b in zip(s_from, s_to):
                    neighbours.setdefault(int(a), []).append(int(b))
            for si, sec in enumerate(cat.sectors):
                for b in sec.b_sites:
                    for nb in neighbours.get(b, []):
                        if nb not in cat.fermion_sites or nb in sec.b_sites:
                            continue
                        new_b = tuple(sorted(set(sec.b_sites) - {b} | {nb}))
                        ti = cat.sector_index(new_b)
                        if ti is None:
                            continue
                        tgt = cat.sectors[ti]
                        rows.append(tgt.offset + np.arange(tgt.size))
                        cols.append(sec.offset + np.arange(sec.size))
                        vals.append(np.full(sec.size, -self.params.t_b))
        return self._assemble(rows, cols, vals)

    def links(self) -> list[CouplingLink]:
        cat = self.catalog
        out = []
        for si, sec in enumerate(cat.sectors):
            for x in cat.fermion_sites:
                if x in sec.b_sites or sec.n_a == 0:
                    continue
                ui = cat.sector_index(sec.b_sites + (x,))
                if ui is not None:
                    out.append(CouplingLink(x, si, ui))
        return sorted(out, key=lambda l: (l.site, l.lower))

    def _coupling(self) -> sparse.csr_matrix:
        cat = self.catalog
        rows, cols, vals = [], [], []
        for link in self.links():
            lo = cat.sectors[link.lower]
            C = lo.configs
            n_x = (C == link.site).sum(axis=1)
            has = n_x > 0
            # drop one copy of the site: replace it by a large sentinel and cut the last column
            reduced = np.where((C == link.site) & (np.cumsum(C == link.site, axis=1) == 1),
                               np.iinfo(np.int64).max, C)[has]
            reduced.sort(axis=1)
            reduced = reduced[:, :-1]
            dst = cat.lookup(link.upper, reduced)
            amp = self.params.g * np.sqrt(n_x[has])
            src = lo.offset + np.nonzero(has)[0]
            rows += [dst, src]
            cols += [src, dst]
            vals += [amp, amp]
        return self._assemble(rows, cols, vals)

    def _assemble(self, rows, cols, vals) -> sparse.csr_matrix:
        n = self.dimension
        if not rows:
            return sparse.csr_matrix((n, n))
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(vals)
        keep = r >= 0
        return sparse.coo_matrix((v[keep], (r[keep], c[keep])), shape=(n, n)).tocsr()

    @cached_property
    def terms(self) -> dict[str, SparseHamiltonian]:
        meta = self.catalog.describe()
        meta.pop("sectors")
        return {
            "diagonal": SparseHamiltonian(sparse.diags(self._diag_values()).tocsr(), "catalog", meta),
            "a_kinetic": SparseHamiltonian(self._a_hopping(), "catalog", meta),
            "b_kinetic": SparseHamiltonian(self._b_hopping(), "catalog", meta),
            "coupling": SparseHamiltonian(self._coupling(), "catalog", meta),
        }

    def total(self) -> SparseHamiltonian:
        t = self.terms
        return t["diagonal"] + t["a_kinetic"] + t["b_kinetic"] + t["coupling"]

    @cached_property
    def split(self) -> SplitHamiltonian:
        p = self.params
        sectors = [SectorSpec(s.b_sites, s.n_a, float(p.U * s.n_b + p.Delta * s.n_a))
                   for s in self.catalog.sectors]
        return SplitHamiltonian(self.catalog.lattice, sectors, p.t_a, p.g, self.links(), p.t_b,
                                self.catalog)


def build_mediator_II(catalog: BasisCatalog, params: MediatorParamsII) -> MediatorIIHamiltonian:
    """Scheme-II Hamiltonian over ``catalog`` in term-split form."""
    return MediatorIIHamiltonian(catalog, params)


def mediator_I_split(lattice: LatticeSpec, params: MediatorParamsI, fermion_sites=()) -> SplitHamiltonian:
    """Scheme-I single boson as a one-sector split model (periodic transform)."""
    sites = _flat_sites(lattice, fermion_sites)
    diag = np.zeros(lattice.n_sites)
    diag[list(sites)] = params.U
    return SplitHamiltonian(lattice, [SectorSpec((), 1, diag)], params.t_a)
