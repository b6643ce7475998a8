"""Command-line front end.

Subcommands:

  simulate   run the simulator and write sizes, expected sizes, haplotype
             tables, snapshots, and a rerunnable manifest
  stats      post-process table files: top / xtab / drift
  bench      engine-vs-naive timing grid

Every flag of ``simulate`` can also be given as a ``key=value`` line in a
config file (``--config FILE``); explicit flags override file values.  The
manifest written next to each run uses the same format, so
``haplosim simulate --config <manifest> --out NEW`` reproduces a run.

Exit codes: 0 success, 2 usage, 3 I/O or malformed input file, 4 invalid
numeric or configuration values.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import format_report, run_grid
from .engine import SimulationConfig, SimulationResult, simulate
from .errors import InvalidParameterError, TableFormatError
from .growth import parse_growth
from .io import (
    ensure_dir,
    format_genlist,
    parse_genlist,
    read_config_file,
    read_count_table,
    read_snapshots,
    write_count_table,
    write_manifest,
    write_series,
    write_snapshots,
)
from .mutation import DEFAULT_TABLE_CAP, MutationRates
from .oracle import naive_simulate
from .stats import allele_trajectory, contingency, top_k

__all__ = ["main"]

_SIMULATE_KEYS = (
    "k", "g", "r", "mu", "delta", "omega", "growth", "seed", "save",
    "engine", "replicates", "jobs", "table_cap", "init",
)


class _UsageError(Exception):
    """Missing or conflicting flags; maps to exit code 2."""


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"bad numeric list {text!r}: {exc}") from exc


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"bad integer list {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haplosim",
        description="Forward-time Fisher-Wright simulation on haplotype counts.",
    )
    parser.add_argument("--version", action="version", version=f"haplosim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation and write result files")
    sim.add_argument("--config", help="key=value file supplying any of the flags below")
    sim.add_argument("--k", type=int, help="initial population size")
    sim.add_argument("--g", type=int, help="number of generations to evolve")
    sim.add_argument("--r", type=int, help="number of loci")
    sim.add_argument("--mu", type=float, help="per-locus mutation rate, split evenly up/down")
    sim.add_argument("--delta", help="comma-separated per-locus downward rates")
    sim.add_argument("--omega", help="comma-separated per-locus upward rates")
    sim.add_argument("--growth", help="growth spec, e.g. constant:1.001 (default constant:1.0)")
    sim.add_argument("--seed", type=int, help="64-bit seed (default 0)")
    sim.add_argument("--save", help="generations to snapshot: indices and A:B:S ranges")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--engine", choices=("fast", "naive"), help="simulator to run (default fast)")
    sim.add_argument("--replicates", type=int, help="number of replicate runs (default 1)")
    sim.add_argument("--jobs", type=int, help="concurrent replicate workers (default 1)")
    sim.add_argument("--table-cap", dest="table_cap", type=int,
                     help=f"extended-table row cap (default {DEFAULT_TABLE_CAP})")
    sim.add_argument("--init", help="initial population table file (CSV, same schema as outputs)")
    sim.set_defaults(func=cmd_simulate)

    stats = sub.add_parser("stats", help="analyze haplotype table files")
    stats_sub = stats.add_subparsers(dest="stats_command", required=True)

    top = stats_sub.add_parser("top", help="most frequent haplotypes")
    top.add_argument("--k", type=int, required=True, help="number of rows to report")
    top.add_argument("--out", help="write CSV here instead of stdout")
    top.add_argument("table", help="haplotype table file")
    top.set_defaults(func=cmd_stats_top)

    xtab = stats_sub.add_parser("xtab", help="allele contingency table for two loci")
    xtab.add_argument("--a", type=int, required=True, help="first locus (1-based)")
    xtab.add_argument("--b", type=int, required=True, help="second locus (1-based)")
    xtab.add_argument("--out", help="write CSV here instead of stdout")
    xtab.add_argument("table", help="haplotype table file")
    xtab.set_defaults(func=cmd_stats_xtab)

    drift = stats_sub.add_parser("drift", help="allele-frequency series from snapshots")
    drift.add_argument("--locus", type=int, required=True, help="locus (1-based)")
    drift.add_argument("--alim", type=int, required=True, help="allele window half-width")
    drift.add_argument("--out", help="write CSV here instead of stdout")
    drift.add_argument("snapshots", help="snapshot directory of a simulate run")
    drift.set_defaults(func=cmd_stats_drift)

    bench = sub.add_parser("bench", help="time the count engine against the naive simulator")
    bench.add_argument("--k", required=True, help="comma-separated initial sizes")
    bench.add_argument("--g", required=True, help="comma-separated generation counts")
    bench.add_argument("--mu", required=True, help="comma-separated mutation rates")
    bench.add_argument("--r", type=int, default=3, help="number of loci (default 3)")
    bench.add_argument("--replicates", type=int, default=10, help="runs per cell (default 10)")
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--growth", default="constant:1.0", help="growth spec (default constant:1.0)")
    bench.add_argument("--timeout", type=float, default=None,
                       help="per-run naive timeout in seconds; exceeded cells report a lower bound")
    bench.add_argument("--engine-only", action="store_true",
                       help="time only the count engine (e.g. for locus-count sweeps)")
    bench.add_argument("--out", help="write the report here as well as stdout")
    bench.set_defaults(func=cmd_bench)
    return parser


# -- simulate ---------------------------------------------------------------


def _resolve_settings(args) -> dict[str, str]:
    settings: dict[str, str] = {}
    if args.config:
        file_values = read_config_file(args.config)
        unknown = set(file_values) - set(_SIMULATE_KEYS)
        if unknown:
            raise InvalidParameterError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        settings.update(file_values)
    for key in _SIMULATE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)
    return settings


def _config_from_settings(settings: dict[str, str]) -> tuple[SimulationConfig, dict]:
    required = ("g", "r") if "init" in settings else ("k", "g", "r")
    missing = [key for key in required if key not in settings]
    if missing:
        raise _UsageError(f"missing required settings: {', '.join(missing)}")
    k = int(settings["k"]) if "k" in settings else 0
    g = int(settings["g"])
    r = int(settings["r"])

    has_mu = "mu" in settings
    has_dw = "delta" in settings or "omega" in settings
    if has_mu and has_dw:
        raise _UsageError("give either mu or delta/omega, not both")
    if has_dw and not ("delta" in settings and "omega" in settings):
        raise _UsageError("delta and omega must be given together")
    if has_mu:
        rates = MutationRates.symmetric(r, float(settings["mu"]))
    elif has_dw:
        delta = _parse_float_list(settings["delta"])
        omega = _parse_float_list(settings["omega"])
        if len(delta) != r or len(omega) != r:
            raise InvalidParameterError(f"delta and omega must list {r} rates")
        rates = MutationRates(np.array(delta), np.array(omega))
    else:
        rates = MutationRates.symmetric(r, 0.0)

    schedule = parse_growth(settings.get("growth", "constant:1.0"))
    save = parse_genlist(settings.get("save", ""), g=g)
    seed = int(settings.get("seed", "0"))
    table_cap = int(settings.get("table_cap", str(DEFAULT_TABLE_CAP)))

    initial_population = None
    init_path = settings.get("init")
    if init_path:
        table, table_r = read_count_table(init_path)
        if table_r != r:
            raise InvalidParameterError(
                f"init file has {table_r} loci but r = {r}"
            )
        initial_population = table
        file_total = sum(c for _, c in table)
        if "k" in settings and k != file_total:
            raise InvalidParameterError(
                f"k = {k} disagrees with init file total {file_total}"
            )
        k = file_total

    config = SimulationConfig(
        k=k, g=g, r=r, rates=rates, schedule=schedule,
        save_generations=save, seed=seed, table_cap=table_cap,
        initial_population=initial_population,
    )
    meta = {
        "engine": settings.get("engine", "fast"),
        "replicates": int(settings.get("replicates", "1")),
        "jobs": int(settings.get("jobs", "1")),
        "init": str(Path(init_path).resolve()) if init_path else None,
    }
    if meta["engine"] not in ("fast", "naive"):
        raise InvalidParameterError(f"engine must be fast or naive, got {meta['engine']!r}")
    if meta["replicates"] < 1 or meta["jobs"] < 1:
        raise InvalidParameterError("replicates and jobs must be >= 1")
    return config, meta


def _manifest_entries(config: SimulationConfig, meta: dict) -> dict:
    return {
        "k": config.k,
        "g": config.g,
        "r": config.r,
        "delta": ",".join(repr(float(v)) for v in config.rates.delta),
        "omega": ",".join(repr(float(v)) for v in config.rates.omega),
        "growth": config.schedule.to_spec(),
        "seed": config.seed,
        "save": format_genlist(config.save_generations) or None,
        "table_cap": config.table_cap,
        "engine": meta["engine"],
        "replicates": meta["replicates"],
        "jobs": meta["jobs"],
        "init": meta["init"],
    }


def _write_run_outputs(out_dir: Path, config: SimulationConfig, result: SimulationResult) -> None:
    write_series(out_dir / "sizes.csv", [int(v) for v in result.sizes])
    write_series(out_dir / "expected_sizes.csv", [float(v) for v in result.expected_sizes])
    write_count_table(out_dir / "haplotypes.csv", result.final_haplotypes, config.r)
    if config.save_generations:
        write_snapshots(out_dir / "snapshots", result.intermediates, config.r)


def _summary_lines(result: SimulationResult, label: str = "") -> list[str]:
    prefix = f"{label}: " if label else ""
    lines = [
        f"{prefix}final size: {int(result.sizes[-1])}",
        f"{prefix}distinct haplotypes: {len(result.final_haplotypes)}",
    ]
    if result.extinct_at is not None:
        lines.append(f"{prefix}extinct at generation: {result.extinct_at}")
    if not result.expected_sizes_exact:
        lines.append(f"{prefix}expected sizes: approximate (size-dependent growth)")
    return lines


def _run_replicate(config: SimulationConfig, engine_name: str, replicate: int, out_dir: str) -> dict:
    run = simulate if engine_name == "fast" else naive_simulate
    result = run(config, replicate=replicate)
    rep_dir = ensure_dir(Path(out_dir))
    _write_run_outputs(rep_dir, config, result)
    return {
        "replicate": replicate,
        "final": int(result.sizes[-1]),
        "distinct": len(result.final_haplotypes),
        "extinct_at": result.extinct_at,
    }


def cmd_simulate(args) -> int:
    settings = _resolve_settings(args)
    config, meta = _config_from_settings(settings)
    out_dir = ensure_dir(args.out)

    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    write_manifest(
        out_dir / "manifest.txt",
        _manifest_entries(config, meta),
        comments=[f"haplosim {__version__}", f"written {stamp}"],
    )

    runner = simulate if meta["engine"] == "fast" else naive_simulate
    if meta["replicates"] == 1:
        result = runner(config, replicate=0)
        _write_run_outputs(out_dir, config, result)
        for line in _summary_lines(result):
            print(line)
        print(f"wrote: {out_dir}")
        return 0

    progress_path = out_dir / "progress.log"
    jobs = min(meta["jobs"], meta["replicates"])
    summaries = []
    if jobs == 1:
        with open(progress_path, "a") as log:
            for rep in range(meta["replicates"]):
                summary = _run_replicate(config, meta["engine"], rep, str(out_dir / f"rep_{rep}"))
                summaries.append(summary)
                log.write(f"{time.strftime('%H:%M:%S')} replicate {rep} done\n")
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(
                    _run_replicate, config, meta["engine"], rep, str(out_dir / f"rep_{rep}")
                ): rep
                for rep in range(meta["replicates"])
            }
            with open(progress_path, "a") as log:
                for future in concurrent.futures.as_completed(futures):
                    summaries.append(future.result())
                    log.write(
                        f"{time.strftime('%H:%M:%S')} replicate {futures[future]} done\n"
                    )
    summaries.sort(key=lambda s: s["replicate"])
    for summary in summaries:
        extinct = (
            f", extinct at {summary['extinct_at']}" if summary["extinct_at"] is not None else ""
        )
        print(
            f"replicate {summary['replicate']}: final size {summary['final']}, "
            f"distinct {summary['distinct']}{extinct}"
        )
    print(f"wrote: {out_dir}")
    return 0


# -- stats --------------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_stats_top(args) -> int:
    table, r = read_count_table(args.table)
    rows = top_k(table, args.k)
    header = ",".join(f"Locus{j + 1}" for j in range(r)) + ",N"
    body = "".join(",".join(str(v) for v in h) + f",{c}\n" for h, c in rows)
    _emit(header + "\n" + body, args.out)
    return 0


def cmd_stats_xtab(args) -> int:
    table, r = read_count_table(args.table)
    if args.a < 1 or args.b < 1:
        raise InvalidParameterError("locus flags are 1-based")
    xt = contingency(table, args.a - 1, args.b - 1)
    lines = ["," + ",".join(str(v) for v in xt.col_alleles)]
    for allele, row in zip(xt.row_alleles, xt.matrix):
        lines.append(f"{allele}," + ",".join(str(v) for v in row))
    lines.append(f"total,{xt.grand_total}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_stats_drift(args) -> int:
    snapshots = read_snapshots(args.snapshots)
    if args.locus < 1:
        raise InvalidParameterError("locus flag is 1-based")
    gens, freqs, labels = allele_trajectory(snapshots, args.locus - 1, args.alim)
    lines = ["generation," + ",".join(labels)]
    for g, row in zip(gens, freqs):
        lines.append(f"{g}," + ",".join(repr(float(v)) for v in row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- bench --------------------------------------------------------------------


def cmd_bench(args) -> int:
    ks = _parse_int_list(args.k)
    gs = _parse_int_list(args.g)
    mus = _parse_float_list(args.mu)
    if not ks or not gs or not mus:
        raise InvalidParameterError("bench needs at least one k, g, and mu")
    cells = run_grid(
        ks, gs, mus,
        r=args.r,
        replicates=args.replicates,
        seed=args.seed,
        timeout=args.timeout,
        schedule=parse_growth(args.growth),
        engine_only=args.engine_only,
        progress=print,
    )
    report = format_report(cells)
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(report)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except TableFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
