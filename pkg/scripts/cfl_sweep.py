"""CFL study: error of each scheme against the full scheme on the same grid."""

import argparse
from pathlib import Path

from dlrastab.harness import io
from dlrastab.harness.problems import ProblemConfig, ProblemKind, build_problem
from dlrastab.harness.sweep import cfl_sweep
from dlrastab.integrators import Variant


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", choices=[k.value for k in ProblemKind], default="plane-source")
    ap.add_argument("--schemes", nargs="+", default=["ps-discrete", "ps-stabilized", "unconventional"])
    ap.add_argument("--ranks", type=int, nargs="+", default=[10, 15])
    ap.add_argument("--cfls", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    kind = ProblemKind(args.problem)
    cfg = ProblemConfig.plane_source() if kind is ProblemKind.PLANE_SOURCE else ProblemConfig.uncertain_advection()
    prob = build_problem(cfg)
    recs = cfl_sweep(prob, [Variant(s) for s in args.schemes], args.ranks, args.cfls, cfg.end_time, workers=args.workers)
    out = args.out or Path(f"results/sweep_{kind.value}.csv")
    io.write_sweep_csv(out, recs)
    for r in recs:
        err = "diverged" if r.diverged else f"{r.error:.4g}"
        print(f"{r.scheme.value:15s} r={r.rank:<3d} cfl={r.cfl:<5g} {err}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
