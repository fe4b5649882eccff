"""Moment extraction, error metrics and trace validation."""

from __future__ import annotations

import numpy as np

from dlrastab import spectral
from dlrastab.integrators import NormTrace, ScatteringMode, Variant
from dlrastab.lowrank import LowRankState

TRACE_SLACK = 1e-12


def _as_factors(state) -> tuple[np.ndarray, np.ndarray]:
    """(X S, W) for a low-rank state, (u, I) for a dense one."""
    if isinstance(state, LowRankState):
        return state.X @ state.S, state.W
    u = np.asarray(state, dtype=float)
    return u, np.eye(u.shape[1])


def scalar_flux(state, physical: bool = False) -> np.ndarray:
    """Zeroth moment coefficient per cell, ``sum_im X_i S_im W_0m``.

    ``physical=True`` multiplies by sqrt(2) to turn the normalized-Legendre
    coefficient into the angular integral of psi.
    """
    B, W = _as_factors(state)
    phi = B @ W[0]
    return np.sqrt(2.0) * phi if physical else phi


def expectation_and_sd(state) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard deviation per cell for a gPC basis orthonormal in probability."""
    B, W = _as_factors(state)
    E = B @ W[0]
    Wr = W[1:]
    C = Wr.T @ Wr
    var = np.einsum("ij,jk,ik->i", B, C, B)
    return E, np.sqrt(np.clip(var, 0.0, None))


def l2_error(a: np.ndarray, b: np.ndarray, dx: float | None = None, weighted: bool = True) -> float:
    """``sqrt(dx sum (a - b)^2)``; plain Euclidean distance with ``weighted=False``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = float(np.linalg.norm(a - b))
    if weighted:
        if dx is None:
            raise ValueError("dx is required for the weighted error")
        d *= np.sqrt(dx)
    return d


def step_bound(variant, cfl: float, scattering=ScatteringMode.NONE, dt: float = 0.0, G=None) -> float | None:
    """Per-step norm growth the stability analysis allows, or None if it gives none.

    The streaming factor is the maximized symbol amplification; the scattering
    factor is ``max|1 + dt G|`` (L-step only) or ``max|1 + dt G|^2 max|1 - dt G|``
    (three substeps).
    """
    variant = Variant(variant)
    if variant not in spectral.SYMBOL_SCHEMES:
        return None
    bound = spectral.max_amplification(variant, cfl)
    g = np.zeros(1) if G is None else np.asarray(G, dtype=float)
    mode = ScatteringMode(scattering)
    if mode is not ScatteringMode.NONE and np.any(g):
        plus = np.abs(1.0 + dt * g).max()
        if variant is Variant.FULL or mode is ScatteringMode.L_STEP_ONLY:
            bound *= plus
        else:
            bound *= plus**2 * np.abs(1.0 - dt * g).max()
    return float(bound)


def validate_trace(trace: NormTrace, bound: float | None, slack: float = TRACE_SLACK) -> list[int]:
    """Steps whose growth factor exceeds ``bound``; empty when the trace is admissible."""
    if bound is None:
        return []
    ratios = trace.ratios()
    bad = np.nonzero(ratios > bound * (1.0 + slack))[0]
    return [trace.steps[i + 1] for i in bad]


def is_monotone(norms, slack: float = TRACE_SLACK) -> bool:
    n = np.asarray(norms, dtype=float)
    return bool(np.all(n[1:] <= n[:-1] * (1.0 + slack)))
