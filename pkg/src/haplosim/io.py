"""File formats shared by the command line and tests.

Haplotype tables are comma-separated with header ``Locus1,...,LocusR,N`` and
lexicographically sorted rows.  Size series are two-column
``generation,value`` files covering generations 0..g.  Snapshots live one
table per saved generation (``gen_<i>.csv``) next to an index file.  Run
manifests are plain ``key=value`` lines (with ``#`` comments for metadata),
the same format accepted by ``--config``, so a manifest reruns a simulation
as-is.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .engine import CountTable
from .errors import InvalidParameterError, TableFormatError

__all__ = [
    "write_count_table",
    "read_count_table",
    "write_series",
    "write_snapshots",
    "read_snapshots",
    "write_manifest",
    "read_config_file",
    "parse_genlist",
    "format_genlist",
]

SNAPSHOT_INDEX = "snapshots_index.csv"


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_count_table(path, table: CountTable, r: int) -> None:
    """Write a sorted haplotype count table (header only when empty)."""
    path = Path(path)
    header = ",".join(f"Locus{j + 1}" for j in range(r)) + ",N"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for hap, count in sorted(table):
            fh.write(",".join(str(v) for v in hap) + f",{count}\n")


def read_count_table(path) -> tuple[CountTable, int]:
    """Parse a haplotype count table; returns (rows, locus count)."""
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TableFormatError(path, 1, "empty file, expected a Locus1,...,N header")
    header = [c.strip() for c in lines[0].split(",")]
    if len(header) < 2 or header[-1] != "N" or any(
        c != f"Locus{j + 1}" for j, c in enumerate(header[:-1])
    ):
        raise TableFormatError(path, 1, f"bad header {lines[0]!r}, expected Locus1,...,N")
    r = len(header) - 1
    table: CountTable = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != r + 1:
            raise TableFormatError(path, line_no, f"expected {r + 1} columns, got {len(cells)}")
        try:
            hap = tuple(int(c) for c in cells[:-1])
            count = int(cells[-1])
        except ValueError as exc:
            raise TableFormatError(path, line_no, f"non-integer cell: {exc}") from exc
        if count < 1:
            raise TableFormatError(path, line_no, f"count must be >= 1, got {count}")
        table.append((hap, count))
    return table, r


def write_series(path, values) -> None:
    """Write a generation,value series for generations 0..g."""
    with open(path, "w", newline="") as fh:
        fh.write("generation,value\n")
        for i, v in enumerate(values):
            fh.write(f"{i},{_format_value(v)}\n")


def write_snapshots(out_dir, intermediates: dict[int, CountTable], r: int) -> None:
    """Write one table per saved generation plus the index file."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / SNAPSHOT_INDEX, "w", newline="") as fh:
        fh.write("generation,file\n")
        for g in sorted(intermediates):
            name = f"gen_{g}.csv"
            write_count_table(out_dir / name, intermediates[g], r)
            fh.write(f"{g},{name}\n")


def read_snapshots(snap_dir) -> dict[int, CountTable]:
    """Load a snapshot directory back into {generation: table}."""
    snap_dir = Path(snap_dir)
    index = snap_dir / SNAPSHOT_INDEX
    out: dict[int, CountTable] = {}
    if index.exists():
        with open(index) as fh:
            lines = fh.read().splitlines()
        for line_no, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                gen_txt, name = line.split(",", 1)
                g = int(gen_txt)
            except ValueError as exc:
                raise TableFormatError(index, line_no, f"bad index row: {exc}") from exc
            out[g], _ = read_count_table(snap_dir / name.strip())
        return out
    for path in sorted(snap_dir.glob("gen_*.csv")):
        try:
            g = int(path.stem.split("_", 1)[1])
        except ValueError:
            continue
        out[g], _ = read_count_table(path)
    if not out:
        raise InvalidParameterError(f"no snapshots found in {snap_dir}")
    return out


def write_manifest(path, entries: dict, comments: list[str] | None = None) -> None:
    """Write key=value lines, preceded by '#' metadata comments."""
    with open(path, "w", newline="") as fh:
        for comment in comments or []:
            fh.write(f"# {comment}\n")
        for key, value in entries.items():
            if value is None:
                continue
            fh.write(f"{key}={_format_value(value)}\n")


def read_config_file(path) -> dict[str, str]:
    """Read key=value lines; '#' comments and blank lines are skipped."""
    path = Path(path)
    out: dict[str, str] = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise TableFormatError(path, line_no, f"expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def parse_genlist(text: str, g: int | None = None) -> tuple[int, ...]:
    """Parse a generation list: comma-separated indices and A:B:S ranges.

    ``A:B:S`` covers A, A+S, ... up to and including B (step defaults to 1
    for ``A:B``).  Pass `g` to validate entries against 1..g.
    """
    gens: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                pieces = [int(p) for p in part.split(":")]
                if len(pieces) == 2:
                    start, stop, step = pieces[0], pieces[1], 1
                elif len(pieces) == 3:
                    start, stop, step = pieces
                else:
                    raise ValueError("ranges are A:B or A:B:S")
                if step < 1:
                    raise ValueError("range step must be >= 1")
                gens.update(range(start, stop + 1, step))
            else:
                gens.add(int(part))
        except ValueError as exc:
            raise InvalidParameterError(f"bad generation list entry {part!r}: {exc}") from exc
    if g is not None and gens and not all(1 <= x <= g for x in gens):
        raise InvalidParameterError(f"generation list entries must lie in 1..{g}")
    return tuple(sorted(gens))


def format_genlist(gens) -> str:
    return ",".join(str(g) for g in gens)


def files_equal(path_a, path_b) -> bool:
    """Byte-level file comparison (used by determinism checks)."""
    a = Path(path_a).read_bytes()
    b = Path(path_b).read_bytes()
    return a == b


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise OSError(f"output directory {path} is not writable")
    return path
