"""Command-line interface.

Exit codes: 0 on success, 1 when a requested accuracy budget has no
finite parameters, 2 on input/output problems.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings

import numpy as np

from . import _backend
from .exact import reduce_exact
from .harness import (
    DEFAULT_DELTA,
    SweepConfig,
    builtin_example,
    emit_error_matrix,
    run_sweep,
    sample_matrix,
    table_grid,
)
from .params import (
    CompParams,
    LowParams,
    ParameterInfeasible,
    depth_estimate,
    params_for_budget,
    phi_optimal,
)
from .reduction import he_reduce, he_reduce_optimized, round_and_verify
from .simplicial import (
    BoundaryMatrix,
    build_boundary_matrix,
    diagrams_to_dict,
    extract_diagrams,
    load_filtration,
    load_matrix,
    save_filtration,
    save_matrix,
)
from .tracking import OpCounter


def _parse_tuple(text: str) -> tuple[int, int, int, int]:
    parts = [int(tok) for tok in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated integers d,d',m,t")
    return tuple(parts)  # type: ignore[return-value]


def _load_input(path: str) -> BoundaryMatrix:
    """Accept either a filtration JSON or a matrix file."""
    with open(path) as fh:
        head = fh.read(4096).lstrip()
    if head.startswith("{") and '"simplices"' in head:
        return build_boundary_matrix(load_filtration(path))
    return load_matrix(path)


def _resolve_params(args, n: int) -> tuple[LowParams, CompParams]:
    if args.params_from:
        if args.pl or args.pc:
            raise SystemExit("use either --pl/--pc or --params-from, not both")
        with open(args.params_from) as fh:
            entry = json.load(fh)
        if "pl" in entry and "pc" in entry:
            pl = LowParams(*entry["pl"])
            phi = entry.get("phi", phi_optimal(n, entry.get("delta", DEFAULT_DELTA)))
            pc = CompParams(*entry["pc"], phi=phi)
            return pl, pc
        resolved = params_for_budget(
            n,
            delta=entry["delta"],
            eta=entry["eta"],
            epsilon=entry.get("epsilon", 0.5),
            m=entry.get("m", 2),
        )
        return resolved.low, resolved.comp
    if not (args.pl and args.pc):
        raise SystemExit("--pl and --pc (or --params-from) are required")
    phi = args.phi if args.phi is not None else phi_optimal(n, args.delta)
    return LowParams(*args.pl), CompParams(*args.pc, phi=phi)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _cmd_example(args) -> int:
    filtration = builtin_example(args.name)
    if args.out:
        save_filtration(filtration, args.out)
    else:
        print(json.dumps(filtration.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_reduce(args) -> int:
    matrix = _load_input(args.input)
    reduced = reduce_exact(matrix.entries)
    if args.out:
        save_matrix(reduced, args.out, fmt=args.format, dims=matrix.dims, scales=matrix.scales)
    else:
        for row in reduced:
            print(" ".join(str(int(x)) for x in row))
    if args.diagrams:
        if matrix.dims is None or matrix.scales is None:
            raise SystemExit("--diagrams needs an input with dims and scales (a filtration)")
        diagrams = extract_diagrams(reduced, matrix.dims, matrix.scales)
        with open(args.diagrams, "w") as fh:
            json.dump(diagrams_to_dict(diagrams), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_he_reduce(args) -> int:
    matrix = _load_input(args.input)
    pl, pc = _resolve_params(args, matrix.n)
    counter = OpCounter(
        charge_constant_mult=not args.no_charge_constant_mult,
        level_budget=args.level_budget,
    )
    runner = he_reduce if args.variant == "basic" else he_reduce_optimized
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        approx = runner(
            matrix.entries, pl, pc, counter=counter, backend=args.backend, verify=args.verify
        )
    if args.out:
        rounded = approx.rounded()
        if np.isfinite(rounded).all() and np.abs(rounded).max() < 2**62:
            save_matrix(rounded.astype(np.int64), args.out, fmt="text")
        else:
            print(
                "rounded matrix not written: entries escaped the representable range",
                file=sys.stderr,
            )
    report = round_and_verify(approx, matrix.entries).as_dict()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(text, args.report)
    return 0


def _cmd_params(args) -> int:
    resolved = params_for_budget(args.n, args.delta, args.eta, args.epsilon, args.m)
    report = depth_estimate(args.n, resolved.low, resolved.comp)
    payload = {
        "low": {
            "d": resolved.low.d,
            "dprime": resolved.low.dprime,
            "m": resolved.low.m,
            "t": resolved.low.t,
            "alpha": resolved.budget.alpha_low,
        },
        "comp": {
            "d": resolved.comp.d,
            "dprime": resolved.comp.dprime,
            "m": resolved.comp.m,
            "t": resolved.comp.t,
            "phi": resolved.comp.phi,
            "alpha": resolved.budget.alpha_comp,
        },
        "depth": report.as_dict(),
    }
    if args.budget is not None:
        payload["level_budget"] = args.budget
        payload["fits_budget"] = report.total_depth <= args.budget
        payload["bootstraps_estimate"] = max(
            0, -(-report.total_depth // args.budget) - 1
        )
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_sweep(args) -> int:
    if args.grid:
        with open(args.grid) as fh:
            rows = json.load(fh)
        grid = []
        for row in rows:
            phi = row.get("phi", phi_optimal(args.n, row.get("delta", args.delta)))
            grid.append((LowParams(*row["pl"]), CompParams(*row["pc"], phi=phi)))
        grid = tuple(grid)
    else:
        grid = table_grid(args.n, args.delta)
    cfg = SweepConfig(
        n=args.n,
        trials=args.trials,
        seed=args.seed,
        grid=grid,
        density=args.density,
        variant=args.variant,
    )
    report = run_sweep(cfg, out_dir=args.out, jobs=args.jobs)
    if args.out is None:
        print(report.to_json(), end="")
    return 0


def _cmd_error_matrix(args) -> int:
    matrix = _load_input(args.input)
    pl, pc = _resolve_params(args, matrix.n)
    report = emit_error_matrix(
        matrix.entries, pl, pc, args.out, report_path=args.report, variant=args.variant
    )
    print(json.dumps({"max_error": report["max_error"], "out": args.out}, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    backends = ["pure"]
    if _backend.compiled_available():
        backends.append("compiled")
    pl = LowParams(*args.pl)
    pc = CompParams(*args.pc, phi=phi_optimal(args.n, args.delta))
    timings = {}
    for name in backends:
        start = time.perf_counter()
        for index in range(args.trials):
            matrix = sample_matrix(args.n, 0.5, args.seed, index)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                he_reduce_optimized(matrix, pl, pc, backend=name)
        timings[name] = (time.perf_counter() - start) / args.trials
    payload = {
        "n": args.n,
        "trials": args.trials,
        "seconds_per_reduction": timings,
        "active_backend": _backend.name(),
    }
    if "compiled" in timings:
        payload["speedup"] = timings["pure"] / timings["compiled"]
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _add_param_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pl", type=_parse_tuple, help="low tuple d,d',m,t")
    parser.add_argument("--pc", type=_parse_tuple, help="comparator tuple d,d',m,t")
    parser.add_argument("--phi", type=float, help="equality threshold (default: optimal)")
    parser.add_argument(
        "--delta",
        type=float,
        default=DEFAULT_DELTA,
        help="accuracy scale used to derive phi when not given (default %(default)s)",
    )
    parser.add_argument(
        "--params-from",
        help="JSON file with explicit tuples {pl, pc[, phi]} or a budget {delta, eta[, epsilon, m]}",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetda",
        description="Boundary-matrix reduction: exact, and with branch-free approximate circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="write a built-in example filtration")
    p.add_argument("name", choices=["square"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("reduce", help="exact reduction of a filtration or matrix file")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--diagrams", help="also write persistence diagrams (JSON)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("he-reduce", help="approximate reduction with tracked costs")
    p.add_argument("input")
    _add_param_options(p)
    p.add_argument("--variant", choices=["optimized", "basic"], default="optimized")
    p.add_argument("--verify", action="store_true", help="run the exact shadow in lockstep")
    p.add_argument("--out", help="write the rounded reduced matrix (text)")
    p.add_argument("--report", help="write the verification report JSON here instead of stdout")
    p.add_argument("--level-budget", type=int, help="bootstrap once this level is exceeded")
    p.add_argument("--no-charge-constant-mult", action="store_true")
    p.add_argument("--backend", choices=["pure", "compiled"])
    p.set_defaults(func=_cmd_he_reduce)

    p = sub.add_parser("params", help="derive parameter tuples from an accuracy budget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--budget", type=int, help="level budget to check the total depth against")
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("sweep", help="random-matrix accuracy sweep over a parameter grid")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--grid", help="JSON list of {pl, pc[, phi, delta]} entries")
    p.add_argument("--out", help="directory for report.json and report.csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--variant", choices=["optimized", "basic"], default="optimized")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("error-matrix", help="per-entry error dump against the exact reduction")
    p.add_argument("input")
    _add_param_options(p)
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--report", help="companion report path (default: <out>.report.json)")
    p.add_argument("--variant", choices=["optimized", "basic"], default="optimized")
    p.set_defaults(func=_cmd_error_matrix)

    p = sub.add_parser("bench", help="time the pure and compiled backends")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--pl", type=_parse_tuple, default=(3, 3, 2, 6))
    p.add_argument("--pc", type=_parse_tuple, default=(3, 3, 2, 12))
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterInfeasible as exc:
        print(f"infeasible parameters: {exc.reason}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
