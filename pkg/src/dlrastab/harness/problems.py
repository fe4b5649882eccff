"""Benchmark problem definitions: plane source (P_N) and uncertain advection (SG)."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum

import numpy as np

from dlrastab.bases import ScatteringSpec, pn_system, sg_system
from dlrastab.integrators import Problem
from dlrastab.stencil import Boundary, Grid1D

IC_FLOOR = 1e-4


class ProblemKind(str, Enum):
    PLANE_SOURCE = "plane-source"
    UNCERTAIN_ADVECTION = "uncertain-advection"


@dataclass(frozen=True)
class ProblemConfig:
    problem: ProblemKind = ProblemKind.PLANE_SOURCE
    x_left: float = -1.5
    x_right: float = 1.5
    nx: int = 800
    # moment order; N + 1 coefficients are carried
    N: int = 99
    end_time: float = 1.0
    sigma_s: float = 1.0
    sigma_a: float = 0.0
    delta: float = 0.03**2
    support: tuple[float, float] = (0.2, 1.0)
    boundary: Boundary = Boundary.DIRICHLET_ZERO

    def __post_init__(self):
        object.__setattr__(self, "problem", ProblemKind(self.problem))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if self.nx < 4:
            raise ValueError(f"nx must be >= 4, got {self.nx}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not self.end_time > 0:
            raise ValueError(f"end_time must be positive, got {self.end_time}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @classmethod
    def plane_source(cls, **overrides) -> ProblemConfig:
        return cls(problem=ProblemKind.PLANE_SOURCE, **overrides)

    @classmethod
    def uncertain_advection(cls, **overrides) -> ProblemConfig:
        base = dict(problem=ProblemKind.UNCERTAIN_ADVECTION, nx=2000, sigma_s=0.0)
        base.update(overrides)
        return cls(**base)

    def updated(self, **changes) -> ProblemConfig:
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise KeyError(", ".join(sorted(unknown)))
        return replace(self, **changes)


def plane_source_profile(x: np.ndarray, delta: float = 0.03**2) -> np.ndarray:
    """Gaussian of variance ``delta`` floored at ``IC_FLOOR``."""
    g = np.exp(-(x**2) / (2.0 * delta)) / np.sqrt(2.0 * np.pi * delta)
    return np.maximum(IC_FLOOR, g)


def build_plane_source(cfg: ProblemConfig) -> Problem:
    grid = Grid1D(cfg.x_left, cfg.x_right, cfg.nx)
    system = pn_system(cfg.N, ScatteringSpec(cfg.sigma_s, cfg.sigma_a))
    u0 = np.zeros((cfg.nx, cfg.N + 1))
    # isotropic psi = f(x) has zeroth normalized-Legendre coefficient sqrt(2) f(x)
    u0[:, 0] = np.sqrt(2.0) * plane_source_profile(grid.centers, cfg.delta)
    return Problem("plane-source", u0, system, grid, cfg.boundary)


def indicator_cell_average(grid: Grid1D, a: float, b: float) -> np.ndarray:
    """Cell averages of the indicator of [a, b]."""
    e = grid.edges
    lo, hi = e[:-1], e[1:]
    frac = np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None) / (hi - lo)
    # exact values for covered and empty cells
    frac[(lo >= a) & (hi <= b)] = 1.0
    return np.clip(frac, 0.0, 1.0)


def build_uncertain_advection(cfg: ProblemConfig) -> Problem:
    grid = Grid1D(cfg.x_left, cfg.x_right, cfg.nx)
    system = sg_system(cfg.N, lambda xi: xi**3, cfg.support)
    u0 = np.zeros((cfg.nx, cfg.N + 1))
    u0[:, 0] = indicator_cell_average(grid, -1.0, 0.0)
    return Problem("uncertain-advection", u0, system, grid, cfg.boundary)


def build_problem(cfg: ProblemConfig) -> Problem:
    if cfg.problem is ProblemKind.PLANE_SOURCE:
        return build_plane_source(cfg)
    return build_uncertain_advection(cfg)
