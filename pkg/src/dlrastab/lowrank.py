"""Rank-r factorizations ``u = X S W^T`` and the QR/SVD primitives the integrators share."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10
# relative residual below which a column counts as linearly dependent
_DEFICIENT_RTOL = 1e-14


@dataclass(frozen=True)
class LowRankState:
    """Factored solution ``X @ S @ W.T``.

    ``X`` (N_x x r) and ``W`` (N+1 x r) have orthonormal columns, so the
    Frobenius norm of the represented matrix equals ``||S||_F``.
    """

    X: np.ndarray
    S: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        r = self.S.shape[0]
        if self.S.shape != (r, r):
            raise ValueError(f"S must be square, got {self.S.shape}")
        if self.X.ndim != 2 or self.X.shape[1] != r:
            raise ValueError(f"X must have {r} columns, got {self.X.shape}")
        if self.W.ndim != 2 or self.W.shape[1] != r:
            raise ValueError(f"W must have {r} columns, got {self.W.shape}")
        if r > min(self.X.shape[0], self.W.shape[0]):
            raise ValueError(f"rank {r} exceeds min{(self.X.shape[0], self.W.shape[0])}")

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.X.shape[0], self.W.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.S))

    def orthonormality_error(self) -> float:
        """Largest entry of ``|X^T X - I|`` and ``|W^T W - I|``."""
        eye = np.eye(self.rank)
        ex = np.abs(self.X.T @ self.X - eye).max()
        ew = np.abs(self.W.T @ self.W - eye).max()
        return float(max(ex, ew))

    def is_orthonormal(self, tol: float = ORTHO_TOL) -> bool:
        return self.orthonormality_error() <= tol


def _complete(Q: np.ndarray, filled: list[int], missing: list[int]) -> None:
    """Fill columns ``missing`` of Q with canonical unit vectors orthonormalized
    against the columns in ``filled`` (in place, deterministic)."""
    basis = [Q[:, k] for k in filled]
    n = Q.shape[0]
    candidate = 0
    for k in missing:
        while True:
            if candidate >= n:
                raise RuntimeError("could not complete orthonormal basis")
            v = np.zeros(n)
            v[candidate] = 1.0
            candidate += 1
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                v /= nv
                break
        Q[:, k] = v
        basis.append(v)


def orthonormalize(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorization ``M = Q R`` with nonnegative diagonal of R.

    Classical Gram-Schmidt with reorthogonalization. Columns that are
    (numerically) dependent on their predecessors get a zero row in R and a
    Q column taken from the orthogonal complement of ``range(M)``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    n, r = M.shape
    if n < r:
        raise ValueError(f"cannot orthonormalize {r} columns in dimension {n}")
    if not np.all(np.isfinite(M)):
        raise ValueError("orthonormalize: non-finite entries in input")

    Q = np.zeros((n, r))
    scale = np.linalg.norm(M)
    good: list[int] = []
    bad: list[int] = []
    for k in range(r):
        v = M[:, k].copy()
        ref = max(np.linalg.norm(v), scale)
        for _ in range(2):
            if good:
                Qg = Q[:, good]
                v -= Qg @ (Qg.T @ v)
        nv = np.linalg.norm(v)
        if ref == 0.0 or nv <= _DEFICIENT_RTOL * ref:
            bad.append(k)
            continue
        v /= nv
        if good:
            # third pass when the column was nearly dependent
            Qg = Q[:, good]
            v -= Qg @ (Qg.T @ v)
            v /= np.linalg.norm(v)
        Q[:, k] = v
        good.append(k)
    if bad:
        _complete(Q, good, bad)

    R = np.triu(Q.T @ M)
    R[bad, :] = 0.0
    for k in good:
        # sign is positive by construction; clamp roundoff
        R[k, k] = abs(R[k, k])
    return Q, R


def truncated_init(u0: np.ndarray, r: int) -> LowRankState:
    """Leading-r SVD factors of ``u0``; missing directions are completed."""
    u0 = np.asarray(u0, dtype=float)
    if u0.ndim != 2:
        raise ValueError(f"initial condition must be a matrix, got shape {u0.shape}")
    nx, nm = u0.shape
    if not 1 <= r <= min(nx, nm):
        raise ValueError(f"rank {r} not in [1, {min(nx, nm)}] for data of shape {u0.shape}")
    U, sig, Vt = np.linalg.svd(u0, full_matrices=False)
    tol = sig[0] * max(nx, nm) * np.finfo(float).eps if sig.size else 0.0
    numerical_rank = int(np.sum(sig > tol))
    keep = min(r, numerical_rank)

    X = np.zeros((nx, r))
    W = np.zeros((nm, r))
    s = np.zeros(r)
    X[:, :keep] = U[:, :keep]
    W[:, :keep] = Vt[:keep].T
    s[:keep] = sig[:keep]
    if keep < r:
        missing = list(range(keep, r))
        _complete(X, list(range(keep)), missing)
        _complete(W, list(range(keep)), missing)
    return LowRankState(X=X, S=np.diag(s), W=W)


def reconstruct(state: LowRankState) -> np.ndarray:
    return state.X @ state.S @ state.W.T
