"""Dense reference implementations used only by the tests."""

import numpy as np


def flux(u, L1, L2, A):
    return L1 @ u - L2 @ u @ A.T


def col_proj(M, r):
    U = np.linalg.svd(M, full_matrices=False)[0][:, :r]
    return U @ U.T


def dense_step(variant, u, X, W, L1, L2, A):
    """One streaming step written with explicit projectors on dense matrices."""
    r = X.shape[1]
    Q = W @ W.T
    I = np.eye(u.shape[0])
    if variant == "unconventional":
        P = col_proj(flux(u, L1, L2, A) @ Q, r)
        R = col_proj((X @ X.T @ flux(u, L1, L2, A)).T, r)
        return P @ flux(P @ u @ R, L1, L2, A) @ R
    uI = flux(u, L1, L2, A) @ Q
    P = col_proj(uI, r)
    if variant == "ps-discrete":
        uII = -P @ ((L1 - 2 * I) @ uI - L2 @ uI @ A.T) @ Q
        return P @ flux(uII, L1, L2, A)
    if variant == "ps-naive":
        uII = uI + P @ L2 @ uI @ A.T @ Q
        return uII - P @ L2 @ uII @ A.T
    if variant == "ps-stabilized":
        uII = P @ (L1 @ uI + L2 @ uI @ A.T) @ Q
        return P @ flux(uII, L1, L2, A)
    raise ValueError(variant)
