"""Command line entry point: ``simulate``, ``sweep``, ``spectral`` and ``mode-test``.

Every option can also be given in a ``key = value`` config file, in a section
named after the subcommand (``[simulate]``, ``[sweep]``, ``[spectral]``,
``[mode-test]``) or in ``[common]``. Flags override the file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from dlrastab import spectral
from dlrastab.bases import SystemKind, build_pn_flux
from dlrastab.harness import diagnostics, io
from dlrastab.harness.problems import ProblemConfig, ProblemKind, build_problem
from dlrastab.harness.sweep import cfl_sweep
from dlrastab.integrators import ScatteringMode, SchemeSpec, Variant, run
from dlrastab.stencil import Boundary

PROBLEM_KEYS = {
    "problem": ProblemKind,
    "nx": int,
    "n_moments": int,
    "end_time": float,
    "x_left": float,
    "x_right": float,
    "sigma_s": float,
    "sigma_a": float,
    "delta": float,
    "boundary": Boundary,
    "scattering": ScatteringMode,
}

SCHEMAS = {
    "simulate": {
        **PROBLEM_KEYS,
        "scheme": Variant,
        "rank": int,
        "cfl": float,
        "physical_flux": io.parse_bool,
        "out_dir": str,
        "trace_csv": str,
        "moments_csv": str,
    },
    "sweep": {
        **PROBLEM_KEYS,
        "schemes": io.parse_list(Variant),
        "ranks": io.parse_list(int),
        "cfls": io.parse_list(float),
        "workers": int,
        "weighted": io.parse_bool,
        "out_dir": str,
        "output": str,
    },
    "spectral": {
        "scheme": str,
        "cfls": io.parse_list(float),
        "n_theta": int,
        "out_dir": str,
        "output": str,
        "table": str,
    },
    "mode-test": {
        "nx": int,
        "steps": int,
        "n_moments": int,
        "cfl": float,
        "out_dir": str,
        "output": str,
    },
}

DEFAULTS = {
    "simulate": {"scheme": Variant.UNCONVENTIONAL, "rank": 10, "cfl": 1.0, "physical_flux": False},
    "sweep": {
        "schemes": [Variant.PS_DISCRETE, Variant.PS_STABILIZED, Variant.UNCONVENTIONAL],
        "ranks": [10, 15],
        "cfls": [0.25, 0.5, 0.75, 1.0],
        "workers": 1,
        "weighted": True,
    },
    "spectral": {"scheme": "all", "cfls": [0.3, 0.57735, 0.9, 1.0], "n_theta": 33},
    "mode-test": {"nx": 64, "steps": 20, "n_moments": 4, "cfl": 1.0},
}


class UsageError(Exception):
    pass


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=[k.value for k in ProblemKind])
    p.add_argument("--nx", type=int, help="number of cells")
    p.add_argument("--n-moments", type=int, help="N+1 expansion coefficients")
    p.add_argument("--end-time", type=float)
    p.add_argument("--x-left", type=float)
    p.add_argument("--x-right", type=float)
    p.add_argument("--sigma-s", type=float)
    p.add_argument("--sigma-a", type=float)
    p.add_argument("--delta", type=float, help="plane-source IC variance")
    p.add_argument("--boundary", choices=[b.value for b in Boundary])
    p.add_argument("--scattering", choices=[s.value for s in ScatteringMode])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlrastab", description="Low-rank kinetic solvers: runs, sweeps and stability checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="one run; trace and moment CSVs")
    _add_problem_flags(sim)
    sim.add_argument("--scheme", choices=[v.value for v in Variant])
    sim.add_argument("--rank", type=int)
    sim.add_argument("--cfl", type=float)
    sim.add_argument("--physical-flux", action="store_const", const=True, default=None)
    sim.add_argument("--trace-csv")
    sim.add_argument("--moments-csv")

    sw = sub.add_parser("sweep", help="grid of runs over scheme, rank and CFL")
    _add_problem_flags(sw)
    sw.add_argument("--schemes", help="comma separated")
    sw.add_argument("--ranks", help="comma separated")
    sw.add_argument("--cfls", help="comma separated")
    sw.add_argument("--workers", type=int)
    sw.add_argument("--unweighted", dest="weighted", action="store_const", const=False, default=None)
    sw.add_argument("--output")

    sp = sub.add_parser("spectral", help="amplification tables and CFL thresholds")
    sp.add_argument("--scheme", help="scheme name or 'all'")
    sp.add_argument("--cfls", help="comma separated CFL numbers for the table")
    sp.add_argument("--n-theta", type=int)
    sp.add_argument("--output", help="thresholds CSV")
    sp.add_argument("--table", help="amplification table CSV")

    mt = sub.add_parser("mode-test", help="Nyquist-mode blow-up of discretize-first splitting")
    mt.add_argument("--nx", type=int)
    mt.add_argument("--steps", type=int)
    mt.add_argument("--n-moments", type=int)
    mt.add_argument("--cfl", type=float)
    mt.add_argument("--output")

    for p in (sim, sw, sp, mt):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out-dir", help="directory for default output files")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    command = args.command
    schema = SCHEMAS[command]
    values = dict(DEFAULTS[command])
    if args.config:
        values.update(io.read_config(args.config, command, schema))
    for key, parse in schema.items():
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if isinstance(flag, str):
            try:
                flag = parse(flag)
            except ValueError as exc:
                raise UsageError(f"--{key.replace('_', '-')}: {exc}") from exc
        values[key] = flag
    return values


def problem_config(values: dict) -> ProblemConfig:
    kind = ProblemKind(values.get("problem", ProblemKind.PLANE_SOURCE))
    shared = ("nx", "end_time", "x_left", "x_right", "sigma_s", "sigma_a", "delta", "boundary")
    overrides = {k: values[k] for k in shared if k in values}
    if "n_moments" in values:
        overrides["N"] = values["n_moments"] - 1
    try:
        if kind is ProblemKind.PLANE_SOURCE:
            return ProblemConfig.plane_source(**overrides)
        return ProblemConfig.uncertain_advection(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _out_path(values: dict, key: str, default_name: str) -> Path:
    if values.get(key):
        return Path(values[key])
    return Path(values.get("out_dir") or ".") / default_name


def cmd_simulate(values: dict) -> int:
    cfg = problem_config(values)
    problem = build_problem(cfg)
    variant = Variant(values["scheme"])
    scattering = values.get("scattering", ScatteringMode.L_STEP_ONLY)
    rank = None if variant is Variant.FULL else values["rank"]
    if rank is not None and not 1 <= rank <= min(cfg.nx, cfg.N + 1):
        raise UsageError(f"rank {rank} outside [1, {min(cfg.nx, cfg.N + 1)}]")
    try:
        spec = SchemeSpec(variant, values["cfl"], cfg.end_time, rank, scattering)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    result = run(problem, spec)
    tag = f"{cfg.problem.value}_{variant.value}" + (f"_r{rank}" if rank else "")
    trace_path = io.write_trace_csv(_out_path(values, "trace_csv", f"trace_{tag}.csv"), result.trace)

    x = problem.grid.centers
    if problem.system.kind is SystemKind.SG:
        E, sd = diagnostics.expectation_and_sd(result.state)
        cols = {"expectation": E, "sd": sd}
    else:
        cols = {"phi": diagnostics.scalar_flux(result.state, values.get("physical_flux", False))}
    moments_path = io.write_moments_csv(_out_path(values, "moments_csv", f"moments_{tag}.csv"), x, cols)

    bound = diagnostics.step_bound(variant, spec.cfl, scattering, result.dt, problem.system.G)
    violations = diagnostics.validate_trace(result.trace, bound)
    status = "diverged" if result.diverged else "ok"
    print(
        f"{tag}: status={status} steps={result.trace.steps[-1]} dt={result.dt:.6g} "
        f"norm0={result.trace.norms[0]:.6g} normT={result.trace.norms[-1]:.6g}"
    )
    if result.diverged:
        print(f"divergence detected at step {result.divergence_step}")
    if bound is not None:
        print(f"trace check against per-step bound {bound:.12g}: {len(violations)} violations")
    print(f"wrote {trace_path}")
    print(f"wrote {moments_path}")
    return 0


def cmd_sweep(values: dict) -> int:
    cfg = problem_config(values)
    problem = build_problem(cfg)
    variants = [Variant(v) for v in values["schemes"]]
    ranks = values["ranks"]
    cap = min(cfg.nx, cfg.N + 1)
    if any(not 1 <= r <= cap for r in ranks):
        raise UsageError(f"ranks must lie in [1, {cap}], got {ranks}")
    if not values["cfls"] or any(c <= 0 for c in values["cfls"]):
        raise UsageError(f"cfls must be positive, got {values['cfls']}")
    records = cfl_sweep(
        problem,
        variants,
        ranks,
        values["cfls"],
        cfg.end_time,
        scattering=values.get("scattering", ScatteringMode.L_STEP_ONLY),
        weighted=values["weighted"],
        workers=values["workers"],
    )
    path = io.write_sweep_csv(_out_path(values, "output", f"sweep_{cfg.problem.value}.csv"), records)
    for r in records:
        print(f"{r.scheme.value:15s} r={r.rank:<3d} cfl={r.cfl:<6g} error={r.error:.6g} diverged={r.diverged}")
    print(f"wrote {path}")
    return 0


def cmd_spectral(values: dict) -> int:
    name = values["scheme"]
    if name == "all":
        schemes = list(spectral.SYMBOL_SCHEMES)
    else:
        try:
            schemes = [Variant(name)]
        except ValueError as exc:
            raise UsageError(f"unknown scheme {name!r}") from exc
        if schemes[0] not in spectral.SYMBOL_SCHEMES:
            raise UsageError(f"{name} has no closed-form amplification factor; use mode-test")

    rows = [("streaming", s.value, spectral.stability_threshold(s)) for s in schemes]
    if name == "all":
        rows += [
            ("scattering", m.value, spectral.scattering_threshold(m))
            for m in (ScatteringMode.FULL_SPLIT_3STEP, ScatteringMode.L_STEP_ONLY)
        ]
    path = io.write_csv(_out_path(values, "output", "thresholds.csv"), ("kind", "name", "threshold"), rows)

    theta = np.linspace(0.0, np.pi, values["n_theta"])
    table = (
        (s.value, c, float(th), float(spectral.amplification(s, c, th)))
        for s in schemes
        for c in values["cfls"]
        for th in theta
    )
    tpath = io.write_csv(_out_path(values, "table", "amplification.csv"), ("scheme", "cfl", "theta", "factor"), table)
    for kind, n, thr in rows:
        print(f"{kind:10s} {n:15s} threshold={thr:.6f}")
    print(f"wrote {path}")
    print(f"wrote {tpath}")
    return 0


def cmd_mode_test(values: dict) -> int:
    nx, steps, m = values["nx"], values["steps"], values["n_moments"]
    if nx % 2 or nx < 4:
        raise UsageError(f"--nx must be even and >= 4, got {nx}")
    if m < 2:
        raise UsageError(f"--n-moments must be >= 2, got {m}")
    report = spectral.mode_test(nx, steps, A=build_pn_flux(m - 1), cfl=values["cfl"])
    rows = ((k + 1, float(f), float(n)) for k, (f, n) in enumerate(zip(report.factors, report.norms[1:])))
    path = io.write_csv(_out_path(values, "output", f"mode_test_nx{nx}.csv"), ("step", "factor", "frob_norm"), rows)
    print(f"nx={nx} steps={steps}: per-step factor {report.factors.mean():.6f} "
          f"(min {report.factors.min():.12f}, max {report.factors.max():.12f})")
    print(f"total growth {report.total_growth:.9e} = 3^{steps} x {report.total_growth / 3.0**steps:.12f}")
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "spectral": cmd_spectral,
    "mode-test": cmd_mode_test,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values = resolve(args)
        return COMMANDS[args.command](values)
    except (io.ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
