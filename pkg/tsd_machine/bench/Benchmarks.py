import csv
import logging
import math
import time
from pathlib import Path

from pydantic import BaseModel, Field
from tqdm.contrib.concurrent import thread_map

from tsd_machine.common.utils import fit_linear
from tsd_machine.machine import run_program
from tsd_machine.oracle import differential_check, generate_programs
from tsd_machine.tsd_types import BenchSpec, RunConfig

logger = logging.getLogger(__name__)

BENCH_FUEL = 200_000_000

# `run k` takes k steps and returns 0
_RUN_LOOP = "let run = rec r. λk. if k then (step; r (k - 1)) else 0 in\n"

_SM = "let sm = λi. λf. λx. let s = ref i in link s (f s x); deref s in\n"


def bench_program(spec: BenchSpec) -> str:
    """
    Program text of a benchmark shape. Every shape builds its cells with `rec`, so the
    term stays shallow while the dataflow graph grows with the size.
    For alt-sum the size is the number of steps taken by one alternating-sum automaton.
    """
    n, k = spec.size, spec.steps
    match spec.shape:
        case "chain":
            return ("let src = ref 0 in link src (deref src + 1);\n"
                    "let build = rec b. λn. λc. if n then b (n - 1) (let d = ref 0 in link d (deref c + 1); d)"
                    " else c in\n"
                    f"let last = build {n} src in\n"
                    f"{_RUN_LOOP}run {k}; peek (deref last)\n")
        case "field":
            return ("let mk = rec m. λn. if n then (let c = ref n in link c (deref c + 1); m (n - 1)) else 0 in\n"
                    f"mk {n};\n"
                    f"{_RUN_LOOP}run {k}\n")
        case "tree":
            depth = max(1, int(math.log2(n)))
            return ("let src = ref 1 in link src (deref src + 1);\n"
                    "let t = rec t. λd. if d then t (d - 1) + t (d - 1) else deref src in\n"
                    f"let top = ref 0 in link top (t {depth});\n"
                    f"{_RUN_LOOP}run {k}; peek (deref top)\n")
        case "fold":
            return ("let src = ref 0 in link src (deref src + 1);\n"
                    "let fold = rec f. λn. if n then (let c = ref 0 in link c (deref src + n); deref c + f (n - 1))"
                    " else 0 in\n"
                    f"let acc = ref 0 in link acc (fold {n});\n"
                    f"{_RUN_LOOP}run {k}; peek (deref acc)\n")
        case "map":
            return ("let src = ref 1 in link src (deref src + 1);\n"
                    "let g = λx. x * 2 + 1 in\n"
                    "let mk = rec m. λn. if n then (let c = ref 0 in link c (g (deref src)); m (n - 1)) else 0 in\n"
                    f"mk {n};\n"
                    f"{_RUN_LOOP}run {k}; peek (deref src)\n")
        case "alt-sum":
            return (_SM +
                    "let alt = sm 1 (λs. λi. 1 - deref s) 0 in\n"
                    "let total = sm 0 (λs. λi. i + deref s) alt in\n"
                    f"{_RUN_LOOP}run {n}; peek total\n")
    raise ValueError(f"unknown benchmark shape '{spec.shape}'")


class BenchRow(BaseModel):
    shape: str
    size: int
    total_transitions: int = Field(..., description="Main-token plus prop-token transitions.")
    propagation_transitions: int
    wall_seconds: float
    outcome: str = Field(..., description="final, stuck or fuel_exhausted.")


def measure(spec: BenchSpec, fuel: int = BENCH_FUEL) -> BenchRow:
    source = bench_program(spec)
    start = time.perf_counter()
    outcome = run_program(source, RunConfig(fuel=fuel))
    elapsed = time.perf_counter() - start
    kind = outcome.kind
    if kind != "final":
        logger.warning("%s size %d did not finish: %s", spec.shape, spec.size, kind)
    return BenchRow(shape=spec.shape, size=spec.size, total_transitions=outcome.steps + outcome.prop_transitions,
                    propagation_transitions=outcome.prop_transitions, wall_seconds=elapsed, outcome=kind)


def write_csv(rows: list[BenchRow], path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(BenchRow.model_fields))
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump())
    logger.info("wrote %d rows to %s", len(rows), path)


def run_benchmark(shape: str, sizes: list[int], steps: int = 1, csv_path: Path | None = None,
                  workers: int = 1) -> list[BenchRow]:
    """
    Measure one shape over several sizes, print the table and the linear fit of transitions against size.
    """
    specs = [BenchSpec(shape=shape, size=size, steps=steps) for size in sorted(sizes)]
    rows = thread_map(measure, specs, max_workers=workers, desc=f"Benchmarking {shape}", unit="size")

    print(f"{'size':>8} {'transitions':>12} {'propagation':>12} {'seconds':>9}  outcome")
    for row in rows:
        print(f"{row.size:>8} {row.total_transitions:>12} {row.propagation_transitions:>12} "
              f"{row.wall_seconds:>9.3f}  {row.outcome}")
    if len(rows) >= 2:
        slope, intercept, r2 = fit_linear([r.size for r in rows], [r.total_transitions for r in rows])
        print(f"transitions ~ {slope:.2f} * size + {intercept:.1f} (R² = {r2:.4f})")
        if any(r.propagation_transitions for r in rows):
            slope, intercept, r2 = fit_linear([r.size for r in rows], [r.propagation_transitions for r in rows])
            print(f"propagation ~ {slope:.2f} * size + {intercept:.1f} (R² = {r2:.4f})")

    if csv_path is not None:
        write_csv(rows, csv_path)
    return rows


def run_fuzz(count: int, seed: int = 0, max_depth: int = 6, max_cells: int = 8, workers: int = 1,
             recursive: bool = False) -> bool:
    """
    Compare the machine with the oracle on random programs.
    :param recursive: generate programs built around a recursive function
    :return: True if every program agreed
    """
    programs = generate_programs(count, seed, max_depth, max_cells, recursive)
    reports = thread_map(differential_check, programs, max_workers=workers, desc="Fuzzing", unit="program")
    disagreements = [report for report in reports if not report.agree]
    for report in disagreements:
        print(f"DISAGREE {report.program}\n\tmachine: {report.machine}\n\toracle: {report.oracle}")
        for mismatch in report.mismatches:
            print(f"\t{mismatch}")
    print(f"{count - len(disagreements)}/{count} programs agree (seed {seed})")
    return not disagreements
