"""Exact diagonalisation of extremal eigenpairs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.sparse import linalg as spla

from ..errors import ConvergenceError, DomainError
from ..hamiltonians.sparse import SparseHamiltonian

DENSE_THRESHOLD = 4096


@dataclass
class EigenResult:
    """Eigenvalues in ascending order with optional eigenvectors (columns) and residual norms."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray
    method: str

    @property
    def ground(self) -> float:
        return float(self.eigenvalues[0])


def _matrix(H):
    if isinstance(H, SparseHamiltonian):
        return H.matrix
    if sparse.issparse(H):
        return sparse.csr_matrix(H)
    return np.asarray(H)


def ed_extremal(H, which: str = "lowest", count: int = 1, dense_threshold: int = DENSE_THRESHOLD,
                residual_tol: float = 1e-8, maxiter: int | None = None, seed: int = 0,
                v0: np.ndarray | None = None) -> EigenResult:
    """Extremal eigenpairs of a Hermitian operator.

    Dimensions up to ``dense_threshold`` use a dense LAPACK solve; larger
    operators use implicitly restarted Lanczos (ARPACK) from a seeded start
    vector, so repeated calls are reproducible.

    Parameters
    ----------
    which : {"lowest", "highest"}
    count : int
        Number of eigenpairs, returned in ascending order either way.
    residual_tol : float
        Largest accepted ``||H v - lambda v|| / max(1, |lambda|)``.

    Raises
    ------
    ConvergenceError
        When Lanczos stops early or a residual exceeds ``residual_tol``.
    """
    if which not in ("lowest", "highest"):
        raise DomainError("which must be 'lowest' or 'highest'")
    M = _matrix(H)
    n = M.shape[0]
    if not 1 <= count <= n:
        raise DomainError(f"count must lie in [1, {n}]")
    if n <= dense_threshold or count >= n - 1:
        dense = M.toarray() if sparse.issparse(M) else M
        lo, hi = (0, count - 1) if which == "lowest" else (n - count, n - 1)
        vals, vecs = sla.eigh(dense, subset_by_index=(lo, hi))
        method = "dense"
    else:
        if v0 is None:
            v0 = np.random.default_rng(seed).standard_normal(n)
        ncv = min(n, max(2 * count + 1, 20))
        try:
            vals, vecs = spla.eigsh(M, k=count, which="SA" if which == "lowest" else "LA",
                                    v0=v0, ncv=ncv, maxiter=maxiter, tol=0)
        except spla.ArpackNoConvergence as exc:
            best = None
            if exc.eigenvalues.size:
                r = M @ exc.eigenvectors - exc.eigenvectors * exc.eigenvalues
                best = float(np.max(np.linalg.norm(r, axis=0)))
            raise ConvergenceError("Lanczos did not converge", best_residual=best) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        method = "lanczos"
    resid = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    scale = np.maximum(1.0, np.abs(vals))
    if np.any(resid / scale > residual_tol):
        raise ConvergenceError("eigenpair residual above tolerance",
                               best_residual=float(np.max(resid / scale)))
    return EigenResult(np.asarray(vals), vecs, resid, method)
