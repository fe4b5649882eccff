"""Stability experiments for dynamical low-rank integrators on linear moment systems."""

from dlrastab.bases import MomentSystem, ScatteringSpec, pn_system, sg_system
from dlrastab.integrators import Problem, SchemeSpec, ScatteringMode, Variant, run
from dlrastab.lowrank import LowRankState, orthonormalize, reconstruct, truncated_init
from dlrastab.stencil import Boundary, Grid1D, StencilOperators

__all__ = [
    "Boundary",
    "Grid1D",
    "LowRankState",
    "MomentSystem",
    "Problem",
    "ScatteringMode",
    "ScatteringSpec",
    "SchemeSpec",
    "StencilOperators",
    "Variant",
    "orthonormalize",
    "pn_system",
    "reconstruct",
    "run",
    "sg_system",
    "truncated_init",
]

__version__ = "0.1.0"
