"""Acceptance gate: one check per criterion at its stated tolerance.

Each test records a PASS/FAIL line that is repeated in the terminal summary.
Full-resolution benchmark runs take a few seconds each.
"""

import math
import time

import numpy as np
import pytest

from dlrastab.bases import MomentSystem, ScatteringSpec, SystemKind, build_pn_flux, build_sg_flux, pn_flux_closed_form, pn_system
from dlrastab.harness.diagnostics import is_monotone, l2_error, scalar_flux
from dlrastab.harness.problems import ProblemConfig, build_problem
from dlrastab.integrators import STEPPERS, ScatteringMode, SchemeSpec, Variant, full_step, run, scatter
from dlrastab.lowrank import reconstruct, truncated_init
from dlrastab.spectral import (
    SYMBOL_SCHEMES,
    amplification,
    fourier_pair_state,
    mode_test,
    scalar_speed_system,
    scattering_threshold,
    stability_threshold,
)
from dlrastab.stencil import Boundary, Grid1D, StencilOperators

from oracles import dense_step

MONO_SLACK = 1e-12


def _paper_runs(cfg, specs):
    prob = build_problem(cfg)
    return {key: run(prob, spec) for key, spec in specs.items()}


def _pointwise_le(a, b, start=1):
    a, b = np.asarray(a[start:]), np.asarray(b[start:])
    return bool(np.all(a <= b * (1 + MONO_SLACK)))


def test_c1_factor_three_instability(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_step, worst_total = 0.0, 0.0
    for nx in (16, 64, 800):
        rep = mode_test(nx, 20, w=rng.standard_normal(4))
        worst_step = max(worst_step, float(np.max(np.abs(rep.factors / 3.0 - 1))))
        worst_total = max(worst_total, abs(rep.total_growth / 3.0**20 - 1))
    dt = time.perf_counter() - t0
    ok = worst_step < 1e-12 and worst_total < 1e-9 and dt < 1.0
    assert verdict(
        "1 factor-3 instability",
        ok,
        f"max step rel err {worst_step:.1e}, 20-step rel err {worst_total:.1e}, {dt:.2f}s",
    )


def test_c2_cfl_thresholds(verdict):
    t0 = time.perf_counter()
    expected = {
        Variant.FULL: 1.0,
        Variant.PS_NAIVE: 1 / math.sqrt(3),
        Variant.PS_STABILIZED: 1.0,
        Variant.UNCONVENTIONAL: 1.0,
    }
    errs = {v.value: abs(stability_threshold(v) - c) for v, c in expected.items()}
    errs["scatter-3step"] = abs(scattering_threshold(ScatteringMode.FULL_SPLIT_3STEP) - (1 + math.sqrt(5)) / 2)
    errs["scatter-l-only"] = abs(scattering_threshold(ScatteringMode.L_STEP_ONLY) - 2.0)
    dt = time.perf_counter() - t0
    ok = max(errs.values()) < 1e-6 and dt < 1.0
    assert verdict("2 CFL thresholds", ok, f"max abs err {max(errs.values()):.1e}, {dt:.2f}s")


def test_c3_symbol_time_domain_agreement(verdict):
    t0 = time.perf_counter()
    nx, lam = 64, 0.8
    grid = Grid1D(-1.0, 1.0, nx)
    sys_ = scalar_speed_system(lam)
    worst = 0.0
    for scheme in SYMBOL_SCHEMES:
        for c in (0.3, 0.9, 1.0):
            ops = StencilOperators(grid, c * grid.dx / lam, Boundary.PERIODIC)
            for alpha in (1, 3, 5, 8, 13, 17, 24, 31):
                s = fourier_pair_state(grid, alpha)
                if scheme is Variant.FULL:
                    got = np.linalg.norm(full_step(reconstruct(s), ops, sys_)) / s.norm()
                else:
                    got = STEPPERS[scheme](s, ops, sys_).norm() / s.norm()
                want = amplification(scheme, c, alpha * np.pi * grid.dx)
                worst = max(worst, abs(got / want - 1))
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and dt < 5.0
    assert verdict("3 symbol/time-domain agreement", ok, f"max rel err {worst:.1e} over 96 cases, {dt:.2f}s")


def test_c4_norm_monotonicity(verdict):
    t0 = time.perf_counter()
    nx, m, r = 32, 8, 4
    grid = Grid1D(-1.0, 1.0, nx)
    cases = [(Variant.UNCONVENTIONAL, 1.0), (Variant.PS_STABILIZED, 1.0), (Variant.PS_NAIVE, 0.577)]
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        if seed % 2:
            A = build_pn_flux(m - 1)
        else:
            B = rng.standard_normal((m, m))
            A = 0.5 * (B + B.T)
        lam = float(np.max(np.abs(np.linalg.eigvalsh(A))))
        sys_ = MomentSystem(SystemKind.PN, A, np.zeros(m), lam)
        st0 = truncated_init(rng.standard_normal((nx, m)), r)
        for variant, c in cases:
            ops = StencilOperators(grid, c * grid.dx / lam, Boundary.PERIODIC)
            st_, prev = st0, st0.norm()
            for _ in range(200):
                st_ = STEPPERS[variant](st_, ops, sys_)
                worst = max(worst, st_.norm() / prev - 1)
                prev = st_.norm()
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 30.0
    assert verdict("4 norm monotonicity", ok, f"max per-step growth {worst:.1e}, {dt:.1f}s")


def test_c5_plane_source(verdict):
    t0 = time.perf_counter()
    specs = {("ps-discrete", r): SchemeSpec(Variant.PS_DISCRETE, 1.0, 1.0, r) for r in (10, 15)}
    for r in (10, 15):
        specs[("unconventional", r)] = SchemeSpec(Variant.UNCONVENTIONAL, 1.0, 1.0, r)
        specs[("ps-stabilized", r)] = SchemeSpec(Variant.PS_STABILIZED, 1.0, 1.0, r)
    res = _paper_runs(ProblemConfig.plane_source(), specs)
    dt = time.perf_counter() - t0

    d15 = res[("ps-discrete", 15)]
    d10 = res[("ps-discrete", 10)].trace.norms
    checks = {
        "ps-discrete r15 diverged": d15.diverged and d15.trace.status[-1] == "diverged",
        "ps-discrete r10 norm growth": max(d10[1:]) > d10[0],
    }
    for r in (10, 15):
        u = res[("unconventional", r)].trace.norms
        s = res[("ps-stabilized", r)].trace.norms
        checks[f"r{r} monotone"] = is_monotone(u, MONO_SLACK) and is_monotone(s, MONO_SLACK)
        checks[f"r{r} stabilized <= unconventional"] = len(u) == len(s) and _pointwise_le(s, u)
    checks["runtime < 120s"] = dt < 120.0
    failed = [k for k, v in checks.items() if not v]
    assert verdict(
        "5 plane source",
        not failed,
        f"r15 diverged at step {d15.divergence_step}, r10 peak/initial {max(d10) / d10[0]:.3g}, "
        f"{dt:.1f}s" + (f"; failed: {failed}" if failed else ""),
    )


def test_c6_scattering_conservation(verdict):
    cfg = ProblemConfig.plane_source(nx=200, N=29, sigma_a=0.0)
    prob = build_problem(cfg)
    sys_ = prob.system
    dt = prob.grid.dx / sys_.lambda_max
    ops = StencilOperators(prob.grid, dt, prob.boundary)
    st_ = truncated_init(prob.u0, 10)
    col_err = 0.0
    for _ in range(50):
        st_ = STEPPERS[Variant.UNCONVENTIONAL](st_, ops, sys_)
        before = reconstruct(st_)[:, 0]
        st_ = scatter(st_, dt, sys_.G, ScatteringMode.L_STEP_ONLY)
        after = reconstruct(st_)[:, 0]
        col_err = max(col_err, float(np.max(np.abs(after - before))) / max(1.0, np.abs(before).max()))

    # streaming-free: only the scattering update acts
    st_ = truncated_init(prob.u0 + 0.1 * np.random.default_rng(3).standard_normal(prob.u0.shape), 10)
    phi0 = np.linalg.norm(scalar_flux(st_))
    flux_err = 0.0
    for _ in range(200):
        st_ = scatter(st_, dt, sys_.G, ScatteringMode.L_STEP_ONLY)
        flux_err = max(flux_err, abs(np.linalg.norm(scalar_flux(st_)) / phi0 - 1))
    ok = col_err <= 1e-14 and flux_err <= 1e-14
    assert verdict(
        "6 scattering conservation",
        ok,
        f"zeroth column max change {col_err:.1e}, scalar-flux norm drift {flux_err:.1e}",
    )


def test_c7_full_rank_exactness(verdict):
    rng = np.random.default_rng(7)
    nx, m = 16, 8
    B = rng.standard_normal((m, m))
    A = 0.5 * (B + B.T)
    lam = float(np.max(np.abs(np.linalg.eigvalsh(A))))
    sys_ = MomentSystem(SystemKind.PN, A, np.zeros(m), lam)
    grid = Grid1D(-1.0, 1.0, nx)
    errs = {}
    for boundary in Boundary:
        ops = StencilOperators(grid, grid.dx / lam, boundary)
        st_ = truncated_init(rng.standard_normal((nx, m)), m)
        for variant in (Variant.PS_STABILIZED, Variant.UNCONVENTIONAL):
            out = reconstruct(STEPPERS[variant](st_, ops, sys_))
            ref = dense_step(variant.value, reconstruct(st_), st_.X, st_.W, ops.dense("L1"), ops.dense("L2"), A)
            errs[(variant.value, boundary.value)] = float(np.linalg.norm(out - ref))
    worst = max(errs.values())
    assert verdict("7 full-rank exactness", worst < 1e-8, f"max Frobenius diff {worst:.1e}")


def test_c8_uncertain_advection(verdict):
    t0 = time.perf_counter()
    specs = {
        ("ps-discrete", 10): SchemeSpec(Variant.PS_DISCRETE, 1.0, 1.0, 10),
        ("ps-discrete", 5): SchemeSpec(Variant.PS_DISCRETE, 1.0, 1.0, 5),
    }
    for r in (5, 10):
        specs[("unconventional", r)] = SchemeSpec(Variant.UNCONVENTIONAL, 1.0, 1.0, r)
        specs[("ps-stabilized", r)] = SchemeSpec(Variant.PS_STABILIZED, 1.0, 1.0, r)
    res = _paper_runs(ProblemConfig.uncertain_advection(), specs)
    dt = time.perf_counter() - t0

    d10 = res[("ps-discrete", 10)]
    d5 = res[("ps-discrete", 5)].trace.norms
    checks = {
        "ps-discrete r10 diverged": d10.diverged,
        "ps-discrete r5 non-monotone": not is_monotone(d5, MONO_SLACK),
    }
    for r in (5, 10):
        checks[f"r{r} unconventional/stabilized monotone"] = is_monotone(
            res[("unconventional", r)].trace.norms, MONO_SLACK
        ) and is_monotone(res[("ps-stabilized", r)].trace.norms, MONO_SLACK)
    checks["runtime < 180s"] = dt < 180.0
    failed = [k for k, v in checks.items() if not v]
    n10 = d10.trace.norms
    assert verdict(
        "8 uncertain advection",
        not failed,
        f"ps-discrete r10 final/initial {n10[-1] / n10[0]:.3g} (peak {max(n10) / n10[0]:.3g}), "
        f"{dt:.1f}s" + (f"; failed: {failed}" if failed else ""),
    )


def test_c9_flux_matrices(verdict):
    pn = float(np.max(np.abs(build_pn_flux(99) - pn_flux_closed_form(99))))
    k = np.arange(99)
    closed = (k + 1) / np.sqrt((2 * k + 1) * (2 * k + 3))
    band = float(np.max(np.abs(np.diag(build_pn_flux(99), 1) - closed)))
    a00 = build_sg_flux(99, lambda xi: xi**3)[0, 0]
    sg = abs(a00 - 0.3120)
    ok = max(pn, band) < 1e-12 and sg < 1e-12
    assert verdict("9 flux matrices", ok, f"P_N max err {max(pn, band):.1e}, SG a00 = {a00:.15f}")


def test_error_ordering_plane_source(verdict):
    prob = build_problem(ProblemConfig.plane_source())
    ref = scalar_flux(run(prob, SchemeSpec(Variant.FULL, 1.0, 1.0)).state)
    errs = {}
    for v in (Variant.PS_STABILIZED, Variant.UNCONVENTIONAL):
        errs[v] = l2_error(scalar_flux(run(prob, SchemeSpec(v, 1.0, 1.0, 15)).state), ref, prob.grid.dx)
    ok = errs[Variant.PS_STABILIZED] < errs[Variant.UNCONVENTIONAL]
    assert verdict(
        "error ordering r15 c1",
        ok,
        f"stabilized {errs[Variant.PS_STABILIZED]:.4g} vs unconventional {errs[Variant.UNCONVENTIONAL]:.4g}",
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
