"""Matrix-free Lax-Friedrichs stencils on a uniform 1-D grid.

``L1`` averages the two neighbours (off-diagonals 1/2) and ``L2`` is the
centred difference scaled by ``dt / (2 dx)``. Neither is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class Boundary(str, Enum):
    PERIODIC = "periodic"
    DIRICHLET_ZERO = "dirichlet"


@dataclass(frozen=True)
class Grid1D:
    x_left: float
    x_right: float
    nx: int

    def __post_init__(self):
        if self.nx < 4:
            raise ValueError(f"need at least 4 cells, got nx={self.nx}")
        if not self.x_right > self.x_left:
            raise ValueError(f"empty domain [{self.x_left}, {self.x_right}]")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.nx

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_left + np.arange(self.nx + 1) * self.dx


def _neighbours(V: np.ndarray, boundary: Boundary) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``V_{j-1}`` and ``V_{j+1}`` under the boundary policy."""
    if boundary is Boundary.PERIODIC:
        return np.roll(V, 1, axis=0), np.roll(V, -1, axis=0)
    left = np.empty_like(V)
    right = np.empty_like(V)
    left[0] = 0.0
    left[1:] = V[:-1]
    right[-1] = 0.0
    right[:-1] = V[1:]
    return left, right


@dataclass(frozen=True)
class StencilOperators:
    grid: Grid1D
    dt: float
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"time step must be positive, got {self.dt}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def ratio(self) -> float:
        """``dt / dx``."""
        return self.dt / self.grid.dx

    def with_dt(self, dt: float) -> StencilOperators:
        return replace(self, dt=dt)

    def _check(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V)
        if V.shape[0] != self.grid.nx:
            raise ValueError(f"expected {self.grid.nx} rows, got {V.shape[0]}")
        return V

    def apply_L1(self, V: np.ndarray) -> np.ndarray:
        V = self._check(V)
        left, right = _neighbours(V, self.boundary)
        return 0.5 * (left + right)

    def apply_L2(self, V: np.ndarray) -> np.ndarray:
        V = self._check(V)
        left, right = _neighbours(V, self.boundary)
        return (0.5 * self.ratio) * (right - left)

    def apply(self, op: str, V: np.ndarray) -> np.ndarray:
        if op == "L1":
            return self.apply_L1(V)
        if op == "L2":
            return self.apply_L2(V)
        raise ValueError(f"unknown stencil {op!r}, expected 'L1' or 'L2'")

    def projected(self, op: str, X: np.ndarray) -> np.ndarray:
        """Galerkin projection ``X^T (op X)`` onto the spatial basis."""
        X = self._check(X)
        return X.T @ self.apply(op, X)

    def dense(self, op: str) -> np.ndarray:
        """Explicit N_x x N_x matrix; only meant for tests on small grids."""
        return self.apply(op, np.eye(self.grid.nx))
