"""Latent semantic indexing by seeded orthogonal (subspace) iteration."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from triage.errors import ConfigError
from triage.features.text import SparseVector, term_document_matrix

OVERSAMPLE = 10


@dataclass
class LsiModel:
    projection: np.ndarray  # V x k, orthonormal columns
    singular_values: np.ndarray
    iterations: int = 0
    converged: bool = True

    @property
    def k(self) -> int:
        return self.projection.shape[1]

    @property
    def dim(self) -> int:
        return self.projection.shape[0]


def _fix_signs(u: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def top_left_singular(
    a,
    k: int,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Top-k left singular vectors/values of ``a`` (dense or sparse, V x N).

    Iterates a (k + oversample)-wide block on A Aᵀ with QR re-orthonormalization
    and a Rayleigh-Ritz step; stops when every wanted Ritz pair has residual
    ‖A Aᵀ u − λ u‖ ≤ tol · λ_max.
    """
    v_dim, n_dim = a.shape
    rank_bound = min(v_dim, n_dim)
    if not 1 <= k <= rank_bound:
        raise ConfigError(f"LSI dimension k={k} must lie in [1, {rank_bound}]")
    block = min(k + OVERSAMPLE, rank_bound)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((v_dim, block)))

    u = q
    lam = np.zeros(block)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        z = a @ (a.T @ q)
        q, _ = np.linalg.qr(z)
        aq = a.T @ q  # N x block
        t = aq.T @ aq
        t = (t + t.T) / 2
        lam, w = np.linalg.eigh(t)
        order = np.argsort(lam)[::-1]
        lam, w = lam[order], w[:, order]
        u = q @ w
        top = max(lam[0], 0.0)
        if top == 0.0:
            converged = True
            break
        uk = u[:, :k]
        resid = a @ (a.T @ uk) - uk * lam[:k]
        if np.max(np.linalg.norm(resid, axis=0)) <= tol * top:
            converged = True
            break
        q = u
    if not converged:
        warnings.warn(f"LSI subspace iteration did not converge in {max_iter} iterations", RuntimeWarning)
    sv = np.sqrt(np.clip(lam[:k], 0.0, None))
    return _fix_signs(u[:, :k]), sv, it, converged


def lsi_fit(
    docs: Sequence[SparseVector] | np.ndarray | sp.spmatrix,
    k: int,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> LsiModel:
    """Fit on weighted document vectors (or a ready V x N term-document matrix)."""
    if isinstance(docs, (np.ndarray, sp.spmatrix)):
        a = docs
    else:
        a = term_document_matrix(list(docs))
    u, sv, it, ok = top_left_singular(a, k, seed=seed, tol=tol, max_iter=max_iter)
    return LsiModel(u, sv, it, ok)


def lsi_project(v: SparseVector | np.ndarray, model: LsiModel) -> np.ndarray:
    if isinstance(v, SparseVector):
        return model.projection[v.indices].T @ v.weights
    return model.projection.T @ np.asarray(v, dtype=np.float64)


def lsi_project_many(vectors: Sequence[SparseVector], model: LsiModel) -> np.ndarray:
    if not vectors:
        return np.zeros((0, model.k))
    a = term_document_matrix(list(vectors), model.dim)
    return np.asarray((a.T @ model.projection))


def truncation_error(a, model: LsiModel) -> float:
    """Frobenius norm of A − U Uᵀ A."""
    dense = a.toarray() if sp.issparse(a) else np.asarray(a)
    u = model.projection
    return float(np.linalg.norm(dense - u @ (u.T @ dense)))
