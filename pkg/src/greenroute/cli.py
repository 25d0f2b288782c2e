"""Command line interface.

Exit codes: 0 success / feasible, 1 infeasible or unsolved, 2 usage,
3 unreadable or unparsable input.  --seed falls back to the
GREENROUTE_SEED environment variable, then to 0.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass, fields

from . import encoding, files, instgen, model
from .exact import export_milp, solve_exact
from .sa import AnnealTrace, SAConfig, anneal

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class CompareRow:
    """One line of the solver comparison table."""

    instance: str
    n: int
    exact_objective: float | None
    exact_time_s: float
    exact_proven: bool
    sa_objective: float | None
    sa_time_s: float
    gap_pct: float | None
    time_decrease_pct: float | None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not a positive integer")
    return value


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("GREENROUTE_SEED", "0"))


def _write_convergence_plot(trace: AnnealTrace, path, title: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = trace.best_by_epoch()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(range(len(series)), series, drawstyle="steps-post")
    ax.set_xlabel("epoch")
    ax.set_ylabel("best objective")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_generate(args) -> int:
    spec = instgen.GenSpec(
        customers=args.customers,
        seed=_seed(args),
        area=args.area,
        demand_range=(args.demand_min, args.demand_max),
        window_width_range=(args.window_min, args.window_max),
        horizon=args.horizon,
        service_range=(args.service_min, args.service_max),
        fleet_size=args.fleet_size,
    )
    try:
        inst = instgen.generate(spec)
    except instgen.GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    files.write_instance(inst, args.out)
    print(f"wrote {args.out}: n={inst.n} fleet={inst.fleet_size} "
          f"capacity={inst.capacity:g} levels="
          f"{'/'.join(str(lv.avg) for lv in inst.speed_levels)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = files.load_instance(args.instance)
    out = args.out or args.instance + ".sol"
    if args.method == "sa":
        cfg = SAConfig(seed=_seed(args))
        started = time.perf_counter()
        result = anneal(inst, cfg)
        elapsed = time.perf_counter() - started
        if args.trace:
            result.trace.write_csv(args.trace)
        if result.status != "solved":
            print("unsolved: no feasible solution found", file=sys.stderr)
            return EXIT_INFEASIBLE
        files.write_solution(out, encoding.encode(result.solution, inst),
                             result.objective.total)
        print(f"wrote {out}: objective={result.objective.total:.6f} "
              f"time={elapsed:.2f}s")
        return EXIT_OK
    started = time.perf_counter()
    result = solve_exact(inst, time_budget=args.max_seconds)
    elapsed = time.perf_counter() - started
    status = "proven" if result.proven else "unproven"
    if result.solution is None:
        print(f"{result.status}: no solution ({status}, "
              f"{result.nodes_explored} nodes)", file=sys.stderr)
        return EXIT_INFEASIBLE
    files.write_solution(out, encoding.encode(result.solution, inst),
                         result.optimum.total, status=status)
    print(f"wrote {out}: objective={result.optimum.total:.6f} status={status} "
          f"nodes={result.nodes_explored} time={elapsed:.2f}s")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    inst = files.load_instance(args.instance)
    text, meta = files.read_solution(args.solution)
    try:
        sol = encoding.decode(text, inst)
    except encoding.SolutionParseError as exc:
        print(f"solution parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = model.check_feasibility(inst, sol)
    if model.STRUCTURE in report.families():
        for violation in report.violations:
            print(f"violation[{violation.constraint}]: {violation.message}")
        return EXIT_INFEASIBLE
    breakdown = model.evaluate(inst, sol)
    print(f"tare_term={breakdown.tare_term:.6f}")
    print(f"payload_term={breakdown.payload_term:.6f}")
    print(f"speed_term={breakdown.speed_term:.6f}")
    print(f"total={breakdown.total:.6f}")
    print(f"fuel={breakdown.fuel_proxy:.6f}")
    print(f"emission={breakdown.emission:.6f}")
    if "objective" in meta:
        print(f"file_objective={meta['objective']}")
    for r, tail, head in report.straddled_edges:
        print(f"note: route {r} edge ({tail}, {head}) arrives in a different "
              f"speed bracket than it departs")
    if report.ok:
        print("feasible")
        return EXIT_OK
    for violation in report.violations:
        print(f"violation[{violation.constraint}]: {violation.message}")
    return EXIT_INFEASIBLE


def cmd_export(args) -> int:
    inst = files.load_instance(args.instance)
    with open(args.out, "w") as fh:
        fh.write(export_milp(inst))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError:
        print(f"bad --sizes value: {args.sizes!r}", file=sys.stderr)
        return EXIT_USAGE
    if not sizes or any(s < 1 for s in sizes):
        print(f"bad --sizes value: {args.sizes!r}", file=sys.stderr)
        return EXIT_USAGE
    base_seed = _seed(args)
    os.makedirs(args.out_dir, exist_ok=True)
    rows: list[CompareRow] = []
    for n in sizes:
        for trial in range(args.trials):
            seed = base_seed * 10_000 + n * 100 + trial
            name = f"n{n}_s{seed}"
            try:
                inst = instgen.generate(instgen.GenSpec(customers=n, seed=seed))
            except instgen.GenerationError as exc:
                print(f"{name}: generation failed: {exc}", file=sys.stderr)
                continue
            started = time.perf_counter()
            exact = solve_exact(inst, time_budget=args.budget_exact)
            exact_time = time.perf_counter() - started
            started = time.perf_counter()
            sa_result = anneal(inst, SAConfig(seed=seed))
            sa_time = time.perf_counter() - started
            exact_obj = exact.optimum.total if exact.optimum else None
            sa_obj = sa_result.objective.total if sa_result.objective else None
            gap = None
            decrease = None
            if exact_obj and sa_obj is not None:
                gap = 100.0 * (sa_obj - exact_obj) / exact_obj
            if exact_time > 0:
                decrease = 100.0 * (exact_time - sa_time) / exact_time
            rows.append(CompareRow(name, n, exact_obj, exact_time,
                                   exact.proven, sa_obj, sa_time, gap, decrease))
            plot_path = os.path.join(args.out_dir, f"convergence_{name}.svg")
            if sa_result.status == "solved":
                _write_convergence_plot(sa_result.trace, plot_path, name)
            print(f"{name}: exact={exact_obj} ({'proven' if exact.proven else 'cut off'}, "
                  f"{exact_time:.2f}s) sa={sa_obj} ({sa_time:.2f}s) "
                  f"gap={f'{gap:.2f}%' if gap is not None else 'n/a'}")
    csv_path = os.path.join(args.out_dir, "compare.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f.name for f in fields(CompareRow)])
        for row in rows:
            writer.writerow([getattr(row, f.name) for f in fields(CompareRow)])
    proven_gaps = [r.gap_pct for r in rows if r.exact_proven and r.gap_pct is not None]
    if proven_gaps:
        print(f"mean gap over {len(proven_gaps)} proven rows: "
              f"{sum(proven_gaps) / len(proven_gaps):.2f}%")
    print(f"wrote {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenroute",
        description="Fuel- and emission-aware vehicle routing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance file")
    p.add_argument("--customers", type=_positive_int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--area", type=float, default=100.0)
    p.add_argument("--demand-min", type=int, default=1)
    p.add_argument("--demand-max", type=int, default=3)
    p.add_argument("--window-min", type=float, default=1.0)
    p.add_argument("--window-max", type=float, default=4.0)
    p.add_argument("--horizon", type=float, default=16.0)
    p.add_argument("--service-min", type=float, default=0.1)
    p.add_argument("--service-max", type=float, default=0.5)
    p.add_argument("--fleet-size", type=_positive_int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=("sa", "exact"), default="sa")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-seconds", type=float, default=1800.0,
                   help="time budget for the exact search")
    p.add_argument("--out")
    p.add_argument("--trace", help="write the annealing trace CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="score and check a solution file")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", help="write the MILP model in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("compare", help="run both solvers over random instances")
    p.add_argument("--sizes", required=True, help="comma-separated customer counts")
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget-exact", type=float, default=1800.0)
    p.add_argument("--out-dir", default="compare_out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (files.FileFormatError, model.ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
