"""Benchmark sweeps over generated grid-world instances.

Each run records the wall-clock time of one solver on one instance (instance
generation is excluded) and its approximation ratio against the exact
solver of the same instance.  Rows go to a CSV whose first line is the
schema marker ``# geoad-bench v1``; per-cell aggregates go to a sibling
``*_agg.csv``.
"""
from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .exceptions import SearchBudgetExceeded, SearchTimeout
from .instances import GenConfig, generate_instance
from .model import social_welfare
from .solvers import SolveOptions, get_solver

SCHEMA_LINE = "# geoad-bench v1"
DEFAULT_TIMEOUT_S = 1200.0


@dataclass(frozen=True)
class BenchRow:
    seed: int
    algorithm: str
    size: int          # |N| for single-path sweeps, |P_v| for multi-path ones
    lam: float
    mbar: int | None
    runtime_ms: float | None
    sw: float | None
    approx_ratio: float | None
    timed_out: bool


@dataclass(frozen=True)
class AggRow:
    algorithm: str
    size: int
    lam: float
    mbar: int | None
    runs: int
    timed_out: int
    mean_runtime_ms: float | None
    median_runtime_ms: float | None
    aar: float | None
    min_ratio: float | None


@dataclass(frozen=True)
class SingleSweep:
    cells: tuple[tuple[float, int], ...] = (
        (0.5, 10), (0.5, 20), (0.5, 30), (0.5, 40), (0.5, 50), (0.8, 10), (0.8, 20), (0.8, 30))
    seeds: tuple[int, ...] = tuple(range(50))
    mbars: tuple[int, ...] = (1, 2, 3)
    num_ads: int = 30
    timeout_s: float = DEFAULT_TIMEOUT_S


@dataclass(frozen=True)
class MultiSweep:
    path_counts: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
    lam: float = 0.5
    seeds: tuple[int, ...] = tuple(range(50))
    mbars: tuple[int, ...] = (1, 2, 3)
    num_ads: int = 30
    timeout_s: float = DEFAULT_TIMEOUT_S
    budget: int | None = None


def _timed(instance, name: str, opts: SolveOptions):
    start = time.perf_counter()
    try:
        plan = get_solver(name).run(instance, opts)
    except (SearchTimeout, SearchBudgetExceeded):
        return None, (time.perf_counter() - start) * 1e3
    return plan, (time.perf_counter() - start) * 1e3


def _run_instance(task) -> list[BenchRow]:
    kind, seed, size, lam, mbars, num_ads, timeout_s, budget = task
    if kind == "single":
        cfg = GenConfig(seed=seed, num_ads=num_ads, lam=lam, num_nodes=size)
        exact, approx, fixed = "fe", "fa", ()
    else:
        cfg = GenConfig(seed=seed, num_ads=num_ads, lam=lam, num_paths=size)
        exact, approx, fixed = "fem", "fam", ("fam-star",)
    instance = generate_instance(cfg)
    jobs = [(exact, None)] + [(approx, m) for m in mbars] + [(name, None) for name in fixed]
    results = []
    for name, m in jobs:
        opts = SolveOptions(mbar=m, deadline=time.monotonic() + timeout_s, budget=budget)
        plan, ms = _timed(instance, name, opts)
        sw = None if plan is None else social_welfare(instance, plan)
        results.append((name, m, ms, sw))
    best = results[0][3]
    rows = []
    for name, m, ms, sw in results:
        if sw is None or best is None:
            ratio = None
        else:
            ratio = 1.0 if best == 0 else sw / best
        rows.append(BenchRow(seed, name, size, lam, m, ms, sw, ratio, sw is None))
    return rows


def _algo_order(row: BenchRow):
    return (row.algorithm, -1 if row.mbar is None else row.mbar)


def _run_tasks(tasks, jobs: int) -> list[BenchRow]:
    if jobs <= 1:
        out = [r for t in tasks for r in _run_instance(t)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = [r for rows in pool.map(_run_instance, tasks) for r in rows]
    # deterministic order whatever the completion order
    return sorted(out, key=lambda r: (r.lam, r.size, r.seed) + _algo_order(r))


def bench_single_path(sweep: SingleSweep, jobs: int = 1) -> list[BenchRow]:
    tasks = [("single", s, n, lam, sweep.mbars, sweep.num_ads, sweep.timeout_s, None)
             for lam, n in sweep.cells for s in sweep.seeds]
    return _run_tasks(tasks, jobs)


def bench_multi_path(sweep: MultiSweep, jobs: int = 1) -> list[BenchRow]:
    tasks = [("multi", s, k, sweep.lam, sweep.mbars, sweep.num_ads, sweep.timeout_s, sweep.budget)
             for k in sweep.path_counts for s in sweep.seeds]
    return _run_tasks(tasks, jobs)


def aggregate(rows: list[BenchRow]) -> list[AggRow]:
    """One row per (algorithm, size, lambda, mbar).  Timed-out runs count in
    ``timed_out`` but not in the runtime or ratio statistics."""
    cells: dict[tuple, list[BenchRow]] = {}
    for r in rows:
        cells.setdefault((r.lam, r.size) + _algo_order(r), []).append(r)
    out = []
    for key in sorted(cells):
        group = cells[key]
        ok = [r for r in group if not r.timed_out]
        times = [r.runtime_ms for r in ok]
        ratios = [r.approx_ratio for r in ok if r.approx_ratio is not None]
        first = group[0]
        out.append(AggRow(
            algorithm=first.algorithm, size=first.size, lam=first.lam, mbar=first.mbar,
            runs=len(group), timed_out=len(group) - len(ok),
            mean_runtime_ms=statistics.fmean(times) if times else None,
            median_runtime_ms=statistics.median(times) if times else None,
            aar=statistics.fmean(ratios) if ratios else None,
            min_ratio=min(ratios) if ratios else None,
        ))
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path: Path, cls, rows) -> None:
    names = [f.name for f in fields(cls)]
    with open(path, "w", newline="") as fh:
        fh.write(SCHEMA_LINE + "\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        for r in rows:
            d = asdict(r)
            writer.writerow([_fmt(d[n]) for n in names])


def agg_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_agg" + path.suffix)


def write_csv(rows: list[BenchRow], path) -> tuple[Path, Path]:
    """Write the run rows to ``path`` and the aggregates next to it."""
    path = Path(path)
    _write(path, BenchRow, rows)
    agg = agg_path(path)
    _write(agg, AggRow, aggregate(rows))
    return path, agg


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA_LINE:
            raise ValueError(f"{path}: missing schema line {SCHEMA_LINE!r}")
        return list(csv.DictReader(fh))


def gnuplot_script(agg_csv, title: str) -> str:
    """A gnuplot script drawing mean runtime and AAR against size from an
    aggregate CSV, one line per algorithm and mbar."""
    agg_csv = Path(agg_csv)
    rows = read_csv(agg_csv)
    series = sorted({(r["algorithm"], r["mbar"], r["lam"]) for r in rows})
    col = {name: i + 1 for i, name in enumerate(f.name for f in fields(AggRow))}

    def plots(ycol):
        parts = []
        for alg, mbar, lam in series:
            label = alg + (f" m={mbar}" if mbar else "") + f" l={lam}"
            cond = (f'(strcol({col["algorithm"]}) eq "{alg}" && strcol({col["mbar"]}) eq "{mbar}" '
                    f'&& strcol({col["lam"]}) eq "{lam}")')
            parts.append(f'"{agg_csv.name}" every ::1 using {col["size"]}:({cond} ? ${ycol} : NaN) '
                         f'with linespoints title "{label}"')
        return ", \\\n     ".join(parts)

    return "\n".join([
        "set datafile separator ','",
        "set key outside",
        f"set title '{title}'",
        f"set output '{agg_csv.stem}.png'",
        "set terminal pngcairo size 1200,500",
        "set multiplot layout 1,2",
        "set xlabel 'size'",
        "set ylabel 'mean runtime (ms)'",
        "set logscale y",
        "plot " + plots(col["mean_runtime_ms"]),
        "unset logscale y",
        "set ylabel 'AAR'",
        "plot " + plots(col["aar"]),
        "unset multiplot",
        "",
    ])
