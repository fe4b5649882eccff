"""Uncertain advection with speed xi^3, xi ~ U[0.2, 1]: traces, mean and sd."""

import argparse
from pathlib import Path

from dlrastab.harness import io
from dlrastab.harness.diagnostics import expectation_and_sd, is_monotone
from dlrastab.harness.problems import ProblemConfig, build_problem
from dlrastab.integrators import SchemeSpec, Variant, run

SCHEMES = (Variant.PS_DISCRETE, Variant.PS_STABILIZED, Variant.UNCONVENTIONAL)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ranks", type=int, nargs="+", default=[5, 10])
    ap.add_argument("--cfl", type=float, default=1.0)
    ap.add_argument("--nx", type=int, default=2000)
    ap.add_argument("--out", type=Path, default=Path("results/uncertain_advection"))
    args = ap.parse_args()

    prob = build_problem(ProblemConfig.uncertain_advection(nx=args.nx))
    for r in args.ranks:
        for v in SCHEMES:
            res = run(prob, SchemeSpec(v, args.cfl, 1.0, r))
            tag = f"{v.value}_r{r}"
            io.write_trace_csv(args.out / f"trace_{tag}.csv", res.trace)
            n = res.trace.norms
            line = f"{tag:22s} monotone={is_monotone(n)} final/initial={n[-1] / n[0]:.4g} peak/initial={max(n) / n[0]:.4g}"
            if res.diverged:
                print(f"{line} diverged at step {res.divergence_step}")
                continue
            E, sd = expectation_and_sd(res.state)
            io.write_moments_csv(args.out / f"moments_{tag}.csv", prob.grid.centers, {"expectation": E, "sd": sd})
            print(line)


if __name__ == "__main__":
    main()
