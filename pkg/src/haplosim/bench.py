"""Benchmark harness: count engine vs the naive individual-based simulator.

Runs both simulators over a (k, g, mu) parameter grid with a shared seed
derivation and reports per-cell median wall times and the speedup ratio
naive / engine.  Naive runs execute in a child process so a configured
timeout can abort them; a timed-out cell reports its speedup as a lower
bound.  Each cell also cross-checks the two simulators' mean final sizes
(within four standard errors) as a cheap correctness guard.
"""

from __future__ import annotations

import multiprocessing
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .engine import SimulationConfig, simulate
from .growth import ConstantGrowth, GrowthSchedule
from .mutation import MutationRates
from .oracle import naive_simulate

__all__ = ["BenchCell", "run_cell", "run_grid", "format_report"]


@dataclass(eq=False)
class BenchCell:
    k: int
    g: int
    mu: float
    r: int
    engine_times: list[float] = field(default_factory=list)
    naive_times: list[float] = field(default_factory=list)
    engine_finals: list[int] = field(default_factory=list)
    naive_finals: list[int] = field(default_factory=list)
    timed_out: bool = False
    timeout: float | None = None
    engine_only: bool = False

    @property
    def engine_median(self) -> float:
        return statistics.median(self.engine_times)

    @property
    def naive_median(self) -> float:
        """Median naive time; the timeout itself when every run timed out."""
        if self.naive_times:
            return statistics.median(self.naive_times)
        return float(self.timeout or 0.0)

    @property
    def speedup(self) -> float:
        """naive / engine median ratio (a lower bound when timed out)."""
        return self.naive_median / self.engine_median

    @property
    def sizes_consistent(self) -> bool | None:
        """Mean final sizes within 4 SE of each other; None when untestable."""
        if self.timed_out or len(self.engine_finals) < 2 or len(self.naive_finals) < 2:
            return None
        e = np.asarray(self.engine_finals, dtype=np.float64)
        n = np.asarray(self.naive_finals, dtype=np.float64)
        se = np.sqrt(e.var(ddof=1) / e.size + n.var(ddof=1) / n.size)
        if se == 0.0:
            return bool(e.mean() == n.mean())
        return bool(abs(e.mean() - n.mean()) <= 4.0 * se)


def _naive_timing_worker(config: SimulationConfig, replicate: int, queue) -> None:
    start = time.perf_counter()
    result = naive_simulate(config, replicate=replicate)
    queue.put((time.perf_counter() - start, int(result.sizes[-1])))


def _timed_naive_run(config: SimulationConfig, replicate: int, timeout: float | None):
    """Run one naive replicate in a child process; None on timeout."""
    ctx = multiprocessing.get_context("fork")
    queue = ctx.Queue()
    proc = ctx.Process(target=_naive_timing_worker, args=(config, replicate, queue))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return None
    return queue.get(timeout=30.0)


def run_cell(
    k: int,
    g: int,
    mu: float,
    r: int = 3,
    replicates: int = 10,
    seed: int = 1,
    timeout: float | None = None,
    schedule: GrowthSchedule | None = None,
    engine_only: bool = False,
) -> BenchCell:
    """Time both simulators (or just the count engine) on one combination."""
    if schedule is None:
        schedule = ConstantGrowth(1.0)
    config = SimulationConfig(
        k=k, g=g, r=r,
        rates=MutationRates.symmetric(r, mu),
        schedule=schedule,
        seed=seed,
    )
    cell = BenchCell(k=k, g=g, mu=mu, r=r, timeout=timeout, engine_only=engine_only)
    for rep in range(replicates):
        start = time.perf_counter()
        result = simulate(config, replicate=rep)
        cell.engine_times.append(time.perf_counter() - start)
        cell.engine_finals.append(int(result.sizes[-1]))
    if engine_only:
        return cell
    for rep in range(replicates):
        timing = _timed_naive_run(config, rep, timeout)
        if timing is None:
            cell.timed_out = True
            break
        elapsed, final = timing
        cell.naive_times.append(elapsed)
        cell.naive_finals.append(final)
    return cell


def run_grid(
    ks,
    gs,
    mus,
    r: int = 3,
    replicates: int = 10,
    seed: int = 1,
    timeout: float | None = None,
    schedule: GrowthSchedule | None = None,
    engine_only: bool = False,
    progress=None,
) -> list[BenchCell]:
    """Run every (k, g, mu) combination; `progress` gets one line per cell."""
    _warm_up(r)
    cells = []
    for k in ks:
        for g in gs:
            for mu in mus:
                cell = run_cell(
                    k, g, mu, r=r, replicates=replicates, seed=seed,
                    timeout=timeout, schedule=schedule, engine_only=engine_only,
                )
                cells.append(cell)
                if progress is not None:
                    progress(format_report([cell], header=False).rstrip())
    return cells


def _warm_up(r: int) -> None:
    """Trigger jit compilation and table setup outside the timed region."""
    config = SimulationConfig(
        k=50, g=3, r=r,
        rates=MutationRates.symmetric(r, 0.003),
        schedule=ConstantGrowth(1.0),
        seed=0,
    )
    simulate(config)


def format_report(cells: list[BenchCell], header: bool = True) -> str:
    """Plain-text grid report, one row per cell."""
    lines = []
    if header:
        lines.append(
            f"{'k':>8} {'g':>6} {'mu':>8} {'engine_s':>10} {'naive_s':>10} "
            f"{'speedup':>10} {'sizes_ok':>9}"
        )
    for cell in cells:
        if cell.engine_only:
            naive, speedup, ok_txt = "-", "-", "-"
        else:
            speedup = f"{cell.speedup:.1f}"
            naive = f"{cell.naive_median:.4f}"
            if cell.timed_out:
                speedup = f">={cell.speedup:.1f}"
                naive = f">{naive} (timeout)"
            ok = cell.sizes_consistent
            ok_txt = "-" if ok is None else ("yes" if ok else "NO")
        lines.append(
            f"{cell.k:>8} {cell.g:>6} {cell.mu:>8g} {cell.engine_median:>10.4f} "
            f"{naive:>10} {speedup:>10} {ok_txt:>9}"
        )
    return "\n".join(lines) + "\n"
