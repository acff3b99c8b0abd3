"""Batch experiments: random-matrix accuracy sweeps, worked examples, error dumps.

Random matrices come from a counter-based generator (numpy's Philox,
keyed by (seed, trial index)), so a sweep is reproducible entry-for-entry
across platforms and across any trial-level parallelism.  Reports are
written with sorted keys and shortest-roundtrip float formatting, making
byte-identical output a testable property.
"""

from __future__ import annotations

import csv
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import reduce_exact
from .params import CompParams, LowParams, phi_optimal, reduction_counts
from .reduction import he_reduce, he_reduce_optimized, measure_circuit_depths, round_and_verify
from .simplicial import Filtration

__all__ = [
    "DEFAULT_DELTA",
    "SweepConfig",
    "PairResult",
    "SweepReport",
    "sample_matrix",
    "run_sweep",
    "emit_error_matrix",
    "builtin_example",
    "table_grid",
]

# Threshold scale used to derive phi when a parameter grid gives only the
# raw tuples; kept fixed so sweeps are comparable run to run.
DEFAULT_DELTA = 0.2


def sample_matrix(n: int, density: float, seed: int, index: int) -> np.ndarray:
    """Strictly upper-triangular 0/1 matrix, deterministic in (seed, index).

    Entry (i, j) with i < j is 1 with probability ``density``.  Draws come
    from a Philox counter-based stream keyed by the pair, so the same
    (seed, index) yields the same matrix on any platform and in any order.
    """
    if not (0.0 <= density <= 1.0):
        raise ValueError("density must lie in [0, 1]")
    key = (np.uint64(seed), np.uint64(index))
    gen = np.random.Generator(np.random.Philox(key=key))
    draws = gen.random((n, n))
    return np.triu((draws < density).astype(np.uint8), k=1)


@dataclass(frozen=True)
class SweepConfig:
    n: int
    trials: int
    seed: int
    grid: tuple[tuple[LowParams, CompParams], ...]
    density: float = 0.5
    variant: str = "optimized"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "density": self.density,
            "variant": self.variant,
            "grid": [
                {"pl": list(pl.as_tuple()), "pc": list(pc.as_tuple()), "phi": pc.phi}
                for pl, pc in self.grid
            ],
        }


@dataclass
class PairResult:
    pl: LowParams
    pc: CompParams
    trials: int
    within_half_n_rate: float
    within_half_rate: float
    mean_max_error: float
    worst_error: float
    depth: int
    mult_count: int
    add_count: int
    failures: int = 0
    first_failure: str | None = None

    def as_dict(self) -> dict:
        return {
            "pl": list(self.pl.as_tuple()),
            "pc": list(self.pc.as_tuple()),
            "phi": self.pc.phi,
            "trials": self.trials,
            "within_half_n_rate": self.within_half_n_rate,
            "within_half_rate": self.within_half_rate,
            "mean_max_error": self.mean_max_error,
            "worst_error": self.worst_error,
            "depth": self.depth,
            "mult_count": self.mult_count,
            "add_count": self.add_count,
            "failures": self.failures,
            "first_failure": self.first_failure,
        }


@dataclass
class SweepReport:
    config: SweepConfig
    results: list[PairResult] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"config": self.config.as_dict(), "results": [r.as_dict() for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def table_grid(n: int, delta: float = DEFAULT_DELTA) -> tuple[tuple[LowParams, CompParams], ...]:
    """Default sweep grid: the three tuple pairs studied at n = 10."""
    phi = phi_optimal(n, delta)
    rows = [
        ((3, 3, 2, 6), (3, 3, 2, 11)),
        ((3, 3, 2, 7), (3, 3, 2, 11)),
        ((3, 3, 2, 6), (3, 3, 2, 12)),
    ]
    return tuple(
        (LowParams(*pl), CompParams(*pc, phi=phi))
        for pl, pc in rows
    )


def _one_trial(args):
    """Run a single sampled-matrix trial; failures come back as records."""
    cfg_n, density, seed, index, pl, pc, variant = args
    try:
        matrix = sample_matrix(cfg_n, density, seed, index)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if variant == "optimized":
                approx = he_reduce_optimized(matrix, pl, pc)
            else:
                approx = he_reduce(matrix, pl, pc)
            report = round_and_verify(approx, matrix)
    except Exception as exc:
        return index, None, f"trial {index}: {exc}"
    return index, (report.max_error, report.within_half_n, report.within_half), None


def run_sweep(cfg: SweepConfig, *, out_dir: str | None = None, jobs: int = 1) -> SweepReport:
    """Reduce ``cfg.trials`` sampled matrices under every grid pair.

    Per-trial failures are recorded and never abort the sweep.  With
    ``jobs > 1`` trials run in a process pool; results are merged in
    trial order, so reports are identical to the sequential run.
    """
    report = SweepReport(config=cfg)
    for pl, pc in cfg.grid:
        tasks = [
            (cfg.n, cfg.density, cfg.seed, index, pl, pc, cfg.variant)
            for index in range(cfg.trials)
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_one_trial, tasks, chunksize=8))
            results.sort(key=lambda r: r[0])
        else:
            results = [_one_trial(task) for task in tasks]
        outcomes = [data for _, data, _ in results if data is not None]
        errors = [msg for _, data, msg in results if data is None]
        ok = len(outcomes)
        n_half_n = sum(1 for _, a, _ in outcomes if a)
        n_half = sum(1 for _, _, b in outcomes if b)
        err_sum = 0.0
        worst = 0.0
        for err, _, _ in outcomes:
            err_sum += err
            worst = max(worst, err)
        d_low, d_comp = measure_circuit_depths(cfg.n, pl, pc)
        mults, adds = reduction_counts(cfg.n, pl, pc, cfg.variant)
        report.results.append(
            PairResult(
                pl=pl,
                pc=pc,
                trials=ok,
                within_half_n_rate=(n_half_n / ok) if ok else 0.0,
                within_half_rate=(n_half / ok) if ok else 0.0,
                mean_max_error=(err_sum / ok) if ok else 0.0,
                worst_error=worst,
                depth=cfg.n * (cfg.n - 1) // 2 * (d_low + d_comp + 1),
                mult_count=mults,
                add_count=adds,
                failures=len(errors),
                first_failure=errors[0] if errors else None,
            )
        )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(report.to_json())
        _write_csv(report, os.path.join(out_dir, "report.csv"))
    return report


def _write_csv(report: SweepReport, path: str) -> None:
    columns = [
        "pl",
        "pc",
        "within_half_n_rate",
        "within_half_rate",
        "mean_max_error",
        "worst_error",
        "depth",
        "mult_count",
        "failures",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in report.results:
            writer.writerow(
                [
                    ",".join(map(str, r.pl.as_tuple())),
                    ",".join(map(str, r.pc.as_tuple())),
                    repr(r.within_half_n_rate),
                    repr(r.within_half_rate),
                    repr(r.mean_max_error),
                    repr(r.worst_error),
                    r.depth,
                    r.mult_count,
                    r.failures,
                ]
            )


def emit_error_matrix(delta, pl: LowParams, pc: CompParams, out_path: str, *,
                      report_path: str | None = None, variant: str = "optimized") -> dict:
    """Write per-entry |approx - exact| with flag columns, plus a companion report.

    CSV columns: row, col, abs_error, error_ge_half, value_gt_one.  The
    companion JSON carries the full verification report (duplicate-low
    and range flags included).  Returns the report dictionary.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if variant == "optimized":
            approx = he_reduce_optimized(delta, pl, pc)
        else:
            approx = he_reduce(delta, pl, pc)
    exact = reduce_exact(delta)
    errors = np.abs(approx.values - exact)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "col", "abs_error", "error_ge_half", "value_gt_one"])
        n = approx.n
        for i in range(n):
            for j in range(n):
                writer.writerow(
                    [
                        i,
                        j,
                        repr(float(errors[i, j])),
                        int(errors[i, j] >= 0.5),
                        int(approx.values[i, j] > 1.0),
                    ]
                )
    report = round_and_verify(approx, delta).as_dict()
    if report_path is None:
        base, _ = os.path.splitext(out_path)
        report_path = base + ".report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def builtin_example(name: str) -> Filtration:
    """Named example filtrations.

    ``square``: four points a, b, c, d with edges ab, ac, bc, cd, bd and
    triangles bcd, abc, ordered so that, with scale = complex index, the
    connected-component diagram contains (1, 3) and the loop diagram is
    {(8, 9), (5, 10)}.
    """
    if name != "square":
        raise ValueError(f"unknown example: {name!r}")
    a, b, c, d = 0, 1, 2, 3
    simplices = [
        (),
        (a,),
        (b,),
        (c,),
        (a, b),
        (a, c),
        (b, c),
        (d,),
        (c, d),
        (b, d),
        (b, c, d),
        (a, b, c),
    ]
    scales = [0.0] + [float(i) for i in range(len(simplices) - 1)]
    return Filtration(simplices=simplices, scales=scales)
