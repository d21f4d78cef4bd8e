"""Sparse Hermitian operator container with serialisation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..io import read_blob, write_blob


@dataclass
class SparseHamiltonian:
    """Hermitian operator stored as a CSR matrix over an enumerated basis."""

    matrix: sparse.csr_matrix
    basis: str = "position"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = sparse.csr_matrix(self.matrix)
        self.matrix.sum_duplicates()
        self.matrix.sort_indices()
        n, m = self.matrix.shape
        if n != m:
            raise ValueError("Hamiltonian must be square")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    @property
    def hermitian(self) -> bool:
        return self.is_hermitian()

    def is_hermitian(self, atol: float = 0.0) -> bool:
        """Exact (``atol=0``) comparison of every stored entry with its transpose partner."""
        diff = (self.matrix - self.matrix.conj().T).tocoo()
        if diff.nnz == 0:
            return True
        return bool(np.max(np.abs(diff.data)) <= atol)

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector

    def triplets(self):
        coo = self.matrix.tocoo()
        return coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __add__(self, other: "SparseHamiltonian") -> "SparseHamiltonian":
        return SparseHamiltonian(self.matrix + other.matrix, self.basis, dict(self.meta))

    def spectral_bounds(self) -> tuple[float, float]:
        """Gershgorin interval containing the spectrum."""
        m = self.matrix
        diag = m.diagonal().real
        radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
        return float(np.min(diag - radius)), float(np.max(diag + radius))

    def save(self, path) -> None:
        rows, cols, vals = self.triplets()
        header = {"kind": "sparse_hamiltonian", "dimension": self.dimension, "nnz": int(vals.size),
                  "basis": self.basis, "meta": self.meta}
        write_blob(path, header, {"rows": rows, "cols": cols, "values": vals})

    @classmethod
    def load(cls, path) -> "SparseHamiltonian":
        header, arrays = read_blob(path)
        if header.get("kind") != "sparse_hamiltonian":
            raise ValueError("file does not hold a sparse Hamiltonian")
        n = header["dimension"]
        m = sparse.coo_matrix((arrays["values"], (arrays["rows"], arrays["cols"])), shape=(n, n))
        return cls(m.tocsr(), header.get("basis", "position"), header.get("meta", {}))
