"""CFL sweeps against a full-rank reference on the same grid."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from dlrastab.bases import SystemKind
from dlrastab.harness.diagnostics import expectation_and_sd, l2_error, scalar_flux
from dlrastab.integrators import Problem, RunResult, ScatteringMode, SchemeSpec, Variant, run


@dataclass(frozen=True)
class SweepRecord:
    scheme: Variant
    rank: int
    cfl: float
    error: float
    diverged: bool


def zeroth_moment(problem: Problem, result: RunResult) -> np.ndarray:
    if problem.system.kind is SystemKind.SG:
        return expectation_and_sd(result.state)[0]
    return scalar_flux(result.state)


def reference_solution(problem: Problem, cfl: float, end_time: float, scattering=ScatteringMode.L_STEP_ONLY) -> RunResult:
    return run(problem, SchemeSpec(Variant.FULL, cfl, end_time, scattering=scattering))


def cfl_sweep(
    problem: Problem,
    variants,
    ranks,
    cfls,
    end_time: float,
    scattering=ScatteringMode.L_STEP_ONLY,
    weighted: bool = True,
    workers: int = 1,
    reference: RunResult | None = None,
) -> list[SweepRecord]:
    """One record per (variant, rank, cfl), in that nesting order.

    The reference is the full scheme at the smallest requested CFL number
    unless one is passed in. Diverged runs carry ``error = nan``.
    """
    cfls = [float(c) for c in cfls]
    if reference is None:
        reference = reference_solution(problem, min(cfls), end_time, scattering)
    ref = zeroth_moment(problem, reference)
    dx = problem.grid.dx

    def one(point) -> SweepRecord:
        variant, rank, cfl = point
        variant = Variant(variant)
        spec = SchemeSpec(variant, cfl, end_time, None if variant is Variant.FULL else rank, scattering)
        res = run(problem, spec)
        if res.diverged:
            return SweepRecord(variant, rank, cfl, float("nan"), True)
        return SweepRecord(variant, rank, cfl, l2_error(zeroth_moment(problem, res), ref, dx, weighted), False)

    points = list(itertools.product(variants, ranks, cfls))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]
