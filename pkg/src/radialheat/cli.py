"""Command-line harness: bench, verify-counts, converge, simulate.

Exit code 0 on success; nonzero when a verification fails (op-count slopes,
convergence orders) or an error aborts the run.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .band_solvers import SOLVER_IDS
from .bench import (BenchScenario, ScenarioError, bench, convergence_study,
                    emit, manufactured_single_layer, manufactured_two_layer,
                    verify_op_counts)
from .config import load_config
from .mesh import build_mesh
from .time_stepper import StepConfig, TemperatureField, run


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _solver_list(text: str) -> tuple[str, ...]:
    solvers = tuple(tok.strip().upper() for tok in text.replace(",", " ").split())
    for s in solvers:
        if s not in SOLVER_IDS:
            raise argparse.ArgumentTypeError(
                f"unknown solver {s!r} (choose from {', '.join(SOLVER_IDS)})")
    return solvers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radialheat",
        description="Banded-solver benchmarks and simulations for radial "
                    "heat conduction in multilayer cylinders.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="time and verify the five solvers")
    p.add_argument("--n", type=_int_list, default=(10**3, 10**4, 10**5),
                   help="comma-separated problem sizes")
    p.add_argument("--k", type=int, default=11, help="number of contact rows")
    p.add_argument("--solvers", type=_solver_list, default=SOLVER_IDS)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--exact-cap", type=int, default=2 * 10**4,
                   help="largest N the exact solvers are scheduled for")
    p.add_argument("--allow-huge", action="store_true",
                   help="permit N beyond 1e7 (several GB of memory)")

    p = sub.add_parser("verify-counts",
                       help="check operation-count slopes against the "
                            "reference laws")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("converge",
                       help="manufactured-solution order verification")
    p.add_argument("--levels", type=int, default=4,
                   help="number of mesh refinements (factors 1,2,4,...)")
    p.add_argument("--t-final", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate", help="time-step a configured problem")
    p.add_argument("--config", required=True,
                   help="layer/material configuration file")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--u0", type=float, default=1.0,
                   help="uniform initial temperature")
    p.add_argument("--solver", default="NTDM",
                   choices=["NPDM", "MNPDM", "NTDM"])
    p.add_argument("--shift", default="td", choices=["none", "pd", "td"])
    p.add_argument("--picard-tol", type=float, default=1e-12)
    p.add_argument("--max-picard", type=int, default=100,
                   help="iteration cap; shifted modes solve a fixed point "
                        "and may need more iterations on stiff problems")
    p.add_argument("--out", default=None,
                   help="write the final profile as CSV (r,u)")
    return parser


def _cmd_bench(args) -> int:
    try:
        scenario = BenchScenario(
            n_values=args.n, k=args.k, solvers=args.solvers,
            repetitions=args.reps, seed=args.seed, exact_cap=args.exact_cap,
            allow_huge=args.allow_huge)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = bench(scenario)
    emit(rows, args.out, metadata={
        "seed": args.seed, "k": args.k, "n_values": list(args.n),
        "solvers": list(args.solvers), "repetitions": args.reps,
    } if args.out else None)
    return 0


def _cmd_verify_counts(args) -> int:
    report = verify_op_counts(seed=args.seed)
    for line in report.lines():
        print(line)
    print("operation-count verification:",
          "PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def _cmd_converge(args) -> int:
    factors = tuple(2**i for i in range(args.levels))
    ok = True
    for builder in (manufactured_single_layer, manufactured_two_layer):
        layers, materials, solution = builder()
        report = convergence_study(layers, materials, solution,
                                   cells_factors=factors,
                                   t_final=args.t_final, seed=args.seed)
        for line in report.lines():
            print(line)
        passed = (report.observed_order is not None
                  and report.observed_order >= 1.9)
        print("  second-order check:", "PASS" if passed else "FAIL")
        ok = ok and passed

    layers, materials, solution = manufactured_single_layer()
    control = convergence_study(layers, materials, solution,
                                cells_factors=factors, t_final=args.t_final,
                                randomize_steps=True, seed=args.seed)
    for line in control.lines():
        print(line)
    print("  (control: randomized steps void the piecewise-constant-step "
          "premise of the second-order claim)")
    return 0 if ok else 1


def _cmd_simulate(args) -> int:
    layers, materials = load_config(args.config)
    mesh = build_mesh(layers)
    cfg = StepConfig(tau=args.tau, solver_id=args.solver, shift_mode=args.shift)
    u0 = TemperatureField(np.full(mesh.n, args.u0, dtype=np.float64), 0.0)
    trajectory = run(mesh, materials, u0, cfg, args.steps)
    final = trajectory[-1]
    radii = mesh.nodes.tolist()
    values = final.values.tolist()
    print(f"simulated {args.steps} steps of tau={args.tau} "
          f"({args.solver}, shift={args.shift}); t={final.time:g}")
    print(f"  u range: [{min(values):.6g}, {max(values):.6g}]")
    if args.out:
        lines = ["r,u"] + [f"{r!r},{v!r}" for r, v in zip(radii, values)]
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"  wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "bench": _cmd_bench,
        "verify-counts": _cmd_verify_counts,
        "converge": _cmd_converge,
        "simulate": _cmd_simulate,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
