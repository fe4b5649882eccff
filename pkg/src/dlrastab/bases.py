"""Coefficient matrices of the P_N and stochastic-Galerkin moment systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss


class SystemKind(str, Enum):
    PN = "pn"
    SG = "sg"


@dataclass(frozen=True)
class ScatteringSpec:
    sigma_s: float = 0.0
    sigma_a: float = 0.0

    def __post_init__(self):
        if self.sigma_s < 0 or self.sigma_a < 0:
            raise ValueError("cross sections must be nonnegative")

    @property
    def sigma_t(self) -> float:
        return self.sigma_s + self.sigma_a

    def kernel(self, n_moments: int) -> np.ndarray:
        """Isotropic kernel eigenvalues ``g_k = delta_k0 - 1``."""
        g = -np.ones(n_moments)
        g[0] = 0.0
        return g


@dataclass(frozen=True)
class MomentSystem:
    kind: SystemKind
    A: np.ndarray
    G: np.ndarray
    lambda_max: float
    basis_meta: dict = field(default_factory=dict)

    @property
    def n_moments(self) -> int:
        return self.A.shape[0]


def normalized_legendre(n_max: int, x: np.ndarray) -> np.ndarray:
    """Legendre polynomials orthonormal on [-1, 1], shape ``(n_max + 1, len(x))``."""
    x = np.asarray(x, dtype=float)
    P = np.zeros((n_max + 1, x.size))
    P[0] = 1.0
    if n_max >= 1:
        P[1] = x
    for k in range(1, n_max):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
    P *= np.sqrt((2 * np.arange(n_max + 1) + 1) / 2.0)[:, None]
    return P


def gauss_legendre(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] integrating polynomials of ``degree`` exactly."""
    n = max(1, -(-(degree + 1) // 2))
    return leggauss(n)


def build_pn_flux(N: int) -> np.ndarray:
    """``a_km = int mu P_k P_m dmu`` for normalized Legendre P_k, k, m <= N."""
    if N < 1:
        raise ValueError(f"moment order must be >= 1, got {N}")
    mu, w = gauss_legendre(2 * N + 1)
    P = normalized_legendre(N, mu)
    A = (P * (w * mu)) @ P.T
    A = 0.5 * (A + A.T)
    # quadrature round-off off the tridiagonal band
    A[np.abs(A) < 1e-13] = 0.0
    return A


def pn_flux_closed_form(N: int) -> np.ndarray:
    """Tridiagonal P_N flux from ``a_{k,k+1} = (k+1)/sqrt((2k+1)(2k+3))``."""
    k = np.arange(N)
    off = (k + 1) / np.sqrt((2 * k + 1) * (2 * k + 3))
    return np.diag(off, 1) + np.diag(off, -1)


def build_sg_flux(
    N: int,
    a: Callable[[np.ndarray], np.ndarray],
    support: tuple[float, float] = (0.2, 1.0),
    a_degree: int = 3,
) -> np.ndarray:
    """``a_lm = E[a(xi) P_l(xi) P_m(xi)]`` for xi uniform on ``support``.

    The gPC basis is orthonormal with respect to the uniform probability
    density, i.e. ``P_l(xi) = sqrt(2 l + 1) Leg_l(t)`` with t the affine image
    of xi on [-1, 1]. Quadrature is exact when ``a`` is a polynomial of degree
    at most ``a_degree``.
    """
    lo, hi = support
    if not hi > lo:
        raise ValueError(f"empty support {support}")
    t, w = gauss_legendre(a_degree + 2 * N)
    xi = lo + 0.5 * (hi - lo) * (t + 1.0)
    # probability weights sum to one
    p = 0.5 * w
    P = normalized_legendre(N, t) * np.sqrt(2.0)
    A = (P * (p * np.asarray(a(xi), dtype=float))) @ P.T
    return 0.5 * (A + A.T)


def build_scattering_diag(spec: ScatteringSpec, N: int) -> np.ndarray:
    """Diagonal of ``G = sigma_s diag(g) - sigma_a I`` (length N+1)."""
    return spec.sigma_s * spec.kernel(N + 1) - spec.sigma_a


def lambda_max(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("lambda_max requires a symmetric matrix")
    return float(np.abs(np.linalg.eigvalsh(A)).max())


def pn_system(N: int, scattering: ScatteringSpec | None = None) -> MomentSystem:
    scattering = scattering or ScatteringSpec()
    A = build_pn_flux(N)
    return MomentSystem(
        kind=SystemKind.PN,
        A=A,
        G=build_scattering_diag(scattering, N),
        lambda_max=lambda_max(A),
        basis_meta={
            "basis": "normalized Legendre on [-1, 1]",
            "order": N,
            "sigma_s": scattering.sigma_s,
            "sigma_a": scattering.sigma_a,
        },
    )


def sg_system(
    N: int,
    a: Callable[[np.ndarray], np.ndarray] = lambda xi: xi**3,
    support: tuple[float, float] = (0.2, 1.0),
    a_degree: int = 3,
) -> MomentSystem:
    A = build_sg_flux(N, a, support, a_degree)
    return MomentSystem(
        kind=SystemKind.SG,
        A=A,
        G=np.zeros(N + 1),
        lambda_max=lambda_max(A),
        basis_meta={
            "basis": "Legendre orthonormal w.r.t. uniform probability density",
            "order": N,
            "support": tuple(support),
        },
    )
