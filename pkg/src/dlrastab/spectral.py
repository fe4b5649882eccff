"""Fourier symbols, per-scheme amplification factors and CFL thresholds.

All factors depend on the wave angle ``theta = alpha pi dx`` only through
``t = sin^2 theta``, which is what the maximizations below exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dlrastab.bases import MomentSystem, SystemKind, build_pn_flux, lambda_max
from dlrastab.integrators import ScatteringMode, Variant, ps_discrete_step
from dlrastab.lowrank import LowRankState
from dlrastab.stencil import Boundary, Grid1D, StencilOperators

THETA_GRID = np.linspace(0.0, np.pi, 10001)
# a few ulps: the naive factor rises quadratically past its threshold, so a
# loose slack would shift the bisected CFL number by sqrt(slack)
STABILITY_SLACK = 8 * np.finfo(float).eps

# schemes with a closed-form amplification factor
SYMBOL_SCHEMES = (Variant.FULL, Variant.PS_NAIVE, Variant.PS_STABILIZED, Variant.UNCONVENTIONAL)


@dataclass(frozen=True)
class SymbolPoint:
    alpha: int
    theta: float
    d1: float
    d2_mag: float


@dataclass(frozen=True)
class AmplificationProfile:
    scheme: Variant
    cfl: float
    theta: np.ndarray
    factors: np.ndarray

    @property
    def max_factor(self) -> float:
        return float(self.factors.max())


def symbols(grid: Grid1D, dt: float, alphas) -> list[SymbolPoint]:
    """Eigenvalues of L1 (``cos theta``) and L2 (``i dt/dx sin theta``) per wave number."""
    out = []
    for a in np.atleast_1d(alphas):
        th = float(a) * np.pi * grid.dx
        out.append(SymbolPoint(int(a), th, math.cos(th), dt / grid.dx * math.sin(th)))
    return out


def amplification(scheme, cfl: float, theta):
    """Per-step growth of a Fourier mode at angle ``theta`` and CFL number ``cfl``."""
    scheme = Variant(scheme)
    if cfl < 0:
        raise ValueError(f"cfl must be nonnegative, got {cfl}")
    theta = np.asarray(theta, dtype=float)
    s2 = np.sin(theta) ** 2
    base = np.cos(theta) ** 2 + cfl**2 * s2
    if scheme is Variant.FULL or scheme is Variant.UNCONVENTIONAL:
        val = np.sqrt(base)
    elif scheme is Variant.PS_STABILIZED:
        val = base**1.5
    elif scheme is Variant.PS_NAIVE:
        val = (1.0 + cfl**2 * s2) * np.sqrt(base)
    else:
        raise ValueError(f"no closed-form amplification factor for {scheme.value}")
    return val if val.ndim else float(val)


def _stationary_thetas(scheme: Variant, cfl: float) -> list[float]:
    if scheme is not Variant.PS_NAIVE:
        # the other factors are monotone in sin^2 theta
        return [0.0, np.pi / 2, np.pi]
    c2 = cfl**2
    pts = [0.0, np.pi / 2, np.pi]
    if 0 < c2 < 1:
        t = (3 * c2 - 1) / (3 * c2 * (1 - c2))
        if 0 <= t <= 1:
            pts.append(float(np.arcsin(np.sqrt(t))))
    return pts


def amplification_profile(scheme, cfl: float, theta: np.ndarray | None = None) -> AmplificationProfile:
    scheme = Variant(scheme)
    if theta is None:
        theta = np.union1d(THETA_GRID, _stationary_thetas(scheme, cfl))
    return AmplificationProfile(scheme, cfl, theta, np.asarray(amplification(scheme, cfl, theta)))


def max_amplification(scheme, cfl: float) -> float:
    return amplification_profile(scheme, cfl).max_factor


def _bisect(stable, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Largest x in [lo, hi] with ``stable(x)``, assuming a single transition."""
    if not stable(lo):
        raise ValueError(f"unstable at the lower bracket {lo}")
    if stable(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo


def stability_threshold(scheme) -> float:
    """Largest CFL number with ``max_theta amplification <= 1``."""
    scheme = Variant(scheme)
    return _bisect(lambda c: max_amplification(scheme, c) <= 1.0 + STABILITY_SLACK, 1e-6, 4.0)


def scattering_factor(mode, y):
    """Worst-entry growth of one scattering step with ``y = dt max|G_ll|``."""
    mode = ScatteringMode(mode)
    y = np.asarray(y, dtype=float)
    if mode is ScatteringMode.FULL_SPLIT_3STEP:
        val = (1.0 - y) ** 2 * np.abs(1.0 + y)
    elif mode is ScatteringMode.L_STEP_ONLY:
        val = np.abs(1.0 - y)
    else:
        val = np.ones_like(y)
    return val if val.ndim else float(val)


def scattering_threshold(mode) -> float:
    mode = ScatteringMode(mode)
    if mode is ScatteringMode.NONE:
        return math.inf
    # factor dips below one right after zero, so bracket from y = 1
    return _bisect(lambda y: scattering_factor(mode, y) <= 1.0 + STABILITY_SLACK, 1.0, 4.0, 1e-12)


# --------------------------------------------------------------------------
# test modes

def adversarial_mode(grid: Grid1D, w: np.ndarray) -> np.ndarray:
    """Nyquist mode ``u_jk = (-1)^j w_k``: L1 negates it and L2 annihilates it."""
    if grid.nx % 2:
        raise ValueError(f"adversarial mode needs an even cell count, got {grid.nx}")
    sign = (-1.0) ** np.arange(grid.nx)
    return np.outer(sign, np.asarray(w, dtype=float))


def fourier_pair_state(grid: Grid1D, alpha: int, amplitude: float = 1.0) -> LowRankState:
    """Real rank-2 embedding of the complex mode ``exp(i alpha pi x)``.

    ``X = [cos, sin] / sqrt(N_x / 2)`` spans an invariant subspace of L1 and
    L2; paired with ``W = I_2`` and ``A = lambda I_2`` every scheme acts on it
    as a scaled rotation, so one step scales ``||S||_F`` by exactly the symbol
    factor.
    """
    if not 0 < alpha < grid.nx / 2:
        raise ValueError(f"need 0 < alpha < nx/2, got alpha={alpha}")
    k = alpha * np.pi
    x = grid.centers
    X = np.column_stack([np.cos(k * x), np.sin(k * x)]) / np.sqrt(grid.nx / 2.0)
    return LowRankState(X, amplitude * np.eye(2), np.eye(2))


def scalar_speed_system(speed: float, n_moments: int = 2) -> MomentSystem:
    A = speed * np.eye(n_moments)
    return MomentSystem(SystemKind.PN, A, np.zeros(n_moments), abs(speed), {"basis": "scalar speed"})


@dataclass(frozen=True)
class ModeTestReport:
    nx: int
    steps: int
    factors: np.ndarray
    norms: np.ndarray

    @property
    def total_growth(self) -> float:
        return float(self.norms[-1] / self.norms[0])


def mode_test(
    nx: int = 64,
    steps: int = 20,
    w: np.ndarray | None = None,
    A: np.ndarray | None = None,
    cfl: float = 1.0,
) -> ModeTestReport:
    """Drive the discretize-first projector splitting with the Nyquist mode.

    Periodic grid on [-1, 1], rank one. Defaults to a 4-moment P_3-like flux
    and the normalized all-ones moment vector; any unit ``w`` and symmetric
    ``A`` give the same factor.
    """
    grid = Grid1D(-1.0, 1.0, nx)
    A = build_pn_flux(3) if A is None else np.asarray(A, dtype=float)
    m = A.shape[0]
    w = np.ones(m) if w is None else np.asarray(w, dtype=float)
    w = w / np.linalg.norm(w)
    lam = lambda_max(A)
    sys_ = MomentSystem(SystemKind.PN, A, np.zeros(m), lam)
    ops = StencilOperators(grid, cfl * grid.dx / max(lam, 1e-300), Boundary.PERIODIC)

    sign = (-1.0) ** np.arange(nx) / np.sqrt(nx)
    st = LowRankState(sign[:, None], np.eye(1), w[:, None])
    norms = [st.norm()]
    for _ in range(steps):
        st = ps_discrete_step(st, ops, sys_)
        norms.append(st.norm())
    norms = np.asarray(norms)
    return ModeTestReport(nx, steps, norms[1:] / norms[:-1], norms)
