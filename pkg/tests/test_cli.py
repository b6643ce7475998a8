from pathlib import Path

import pytest

from haplosim.cli import main
from haplosim.io import read_count_table


def run_cli(*argv):
    return main(list(argv))


def simulate_args(out, **overrides):
    flags = {
        "k": "500", "g": "20", "r": "3", "mu": "0.003",
        "growth": "constant:1.001", "seed": "1", "save": "5,10:20:5",
    }
    if "g" in overrides and "save" not in overrides:
        flags["save"] = ""
    flags.update({k: str(v) for k, v in overrides.items()})
    argv = ["simulate"]
    for key, value in flags.items():
        argv += [f"--{key}", value]
    return argv + ["--out", str(out)]


def data_files(out_dir):
    out_dir = Path(out_dir)
    files = ["sizes.csv", "expected_sizes.csv", "haplotypes.csv"]
    found = [out_dir / name for name in files if (out_dir / name).exists()]
    snaps = out_dir / "snapshots"
    if snaps.exists():
        found += sorted(snaps.iterdir())
    return found


class TestSimulate:
    def test_writes_outputs_and_summary(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert run_cli(*simulate_args(out)) == 0
        printed = capsys.readouterr().out
        assert "final size:" in printed and "distinct haplotypes:" in printed
        for name in ("sizes.csv", "expected_sizes.csv", "haplotypes.csv", "manifest.txt"):
            assert (out / name).exists()
        assert (out / "snapshots" / "gen_5.csv").exists()
        assert (out / "snapshots" / "snapshots_index.csv").exists()
        table, r = read_count_table(out / "haplotypes.csv")
        assert r == 3
        sizes = (out / "sizes.csv").read_text().splitlines()
        assert len(sizes) == 22  # header + generations 0..20

    def test_empty_start_reports_extinction(self, tmp_path, capsys):
        out = tmp_path / "empty"
        assert run_cli(*simulate_args(out, k=0)) == 0
        assert "extinct at generation: 1" in capsys.readouterr().out
        assert (out / "haplotypes.csv").read_text() == "Locus1,Locus2,Locus3,N\n"

    def test_manifest_rerun_is_byte_identical(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        assert run_cli(*simulate_args(first)) == 0
        assert run_cli("simulate", "--config", str(first / "manifest.txt"),
                       "--out", str(second)) == 0
        files_a = data_files(first)
        assert files_a
        for path_a in files_a:
            path_b = Path(str(path_a).replace(str(first), str(second)))
            assert path_b.exists()
            assert path_a.read_bytes() == path_b.read_bytes()

    def test_cli_flags_override_config_file(self, tmp_path):
        first = tmp_path / "a"
        assert run_cli(*simulate_args(first, seed=1)) == 0
        reseeded = tmp_path / "b"
        assert run_cli("simulate", "--config", str(first / "manifest.txt"),
                       "--seed", "2", "--out", str(reseeded)) == 0
        assert (first / "sizes.csv").read_text() != (reseeded / "sizes.csv").read_text()

    def test_naive_engine_selectable(self, tmp_path):
        out = tmp_path / "naive"
        assert run_cli(*simulate_args(out, k=50, g=3, engine="naive")) == 0
        assert (out / "haplotypes.csv").exists()

    def test_init_file_round_trip(self, tmp_path):
        seed_run = tmp_path / "seed_run"
        assert run_cli(*simulate_args(seed_run, mu="0.0")) == 0
        resumed = tmp_path / "resumed"
        argv = ["simulate", "--g", "5", "--r", "3", "--mu", "0.0",
                "--init", str(seed_run / "haplotypes.csv"),
                "--seed", "4", "--out", str(resumed)]
        assert run_cli(*argv) == 0
        table, _ = read_count_table(resumed / "haplotypes.csv")
        assert {h for h, _ in table} <= {(0, 0, 0)}

    def test_replicates_write_subdirectories(self, tmp_path):
        out = tmp_path / "reps"
        assert run_cli(*simulate_args(out, replicates=3, jobs=1, g=5)) == 0
        for rep in range(3):
            assert (out / f"rep_{rep}" / "sizes.csv").exists()
        assert (out / "progress.log").exists()

    def test_parallel_jobs_match_serial(self, tmp_path):
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        assert run_cli(*simulate_args(serial, replicates=3, jobs=1, g=5)) == 0
        assert run_cli(*simulate_args(parallel, replicates=3, jobs=3, g=5)) == 0
        for rep in range(3):
            a = (serial / f"rep_{rep}" / "sizes.csv").read_bytes()
            b = (parallel / f"rep_{rep}" / "sizes.csv").read_bytes()
            assert a == b


class TestExitCodes:
    def test_usage_error_missing_required(self, tmp_path, capsys):
        code = run_cli("simulate", "--g", "5", "--out", str(tmp_path / "x"))
        assert code == 2
        assert "missing required settings" in capsys.readouterr().err

    def test_usage_error_conflicting_rates(self, tmp_path):
        argv = simulate_args(tmp_path / "x") + ["--delta", "0.1,0.1,0.1", "--omega", "0.1,0.1,0.1"]
        assert run_cli(*argv) == 2

    def test_config_error_bad_value(self, tmp_path):
        assert run_cli(*simulate_args(tmp_path / "x", mu="1.2")) == 4
        assert run_cli(*simulate_args(tmp_path / "x", growth="warp:9")) == 4
        assert run_cli(*simulate_args(tmp_path / "x", save="999")) == 4

    def test_io_error_missing_table(self, tmp_path):
        assert run_cli("stats", "top", "--k", "3", str(tmp_path / "none.csv")) == 3

    def test_io_error_malformed_table(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("Locus1,N\noops,1\n")
        assert run_cli("stats", "top", "--k", "3", str(bad)) == 3
        assert ":2:" in capsys.readouterr().err  # line number reported

    def test_argparse_usage_exit(self):
        with pytest.raises(SystemExit) as err:
            run_cli("simulate")  # --out is required
        assert err.value.code == 2


class TestStatsCommands:
    @pytest.fixture()
    def run_dir(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli(*simulate_args(out, k=2000, g=10, mu=0.05, save="2,4,6,8,10")) == 0
        return out

    def test_top(self, run_dir, capsys):
        assert run_cli("stats", "top", "--k", "5", str(run_dir / "haplotypes.csv")) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "Locus1,Locus2,Locus3,N"
        counts = [int(line.split(",")[-1]) for line in lines[1:]]
        assert counts == sorted(counts, reverse=True)
        assert len(counts) <= 5

    def test_xtab_grand_total(self, run_dir, capsys):
        table, _ = read_count_table(run_dir / "haplotypes.csv")
        total = sum(c for _, c in table)
        assert run_cli("stats", "xtab", "--a", "1", "--b", "2",
                       str(run_dir / "haplotypes.csv")) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[-1] == f"total,{total}"
        cells = sum(
            int(v) for line in out[1:-1] for v in line.split(",")[1:]
        )
        assert cells == total

    def test_drift_rows_normalized(self, run_dir, capsys):
        assert run_cli("stats", "drift", "--locus", "1", "--alim", "2",
                       str(run_dir / "snapshots")) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "generation,-2,-1,0,1,2,other"
        assert len(lines) == 6  # five snapshots
        for line in lines[1:]:
            values = [float(v) for v in line.split(",")[1:]]
            assert len(values) == 6
            assert sum(values) == pytest.approx(1.0, abs=1e-12)

    def test_out_flag_writes_file(self, run_dir, tmp_path):
        target = tmp_path / "top.csv"
        assert run_cli("stats", "top", "--k", "3", "--out", str(target),
                       str(run_dir / "haplotypes.csv")) == 0
        assert target.exists()


class TestBench:
    def test_tiny_grid_smoke(self, tmp_path, capsys):
        report_file = tmp_path / "bench.csv"
        code = run_cli(
            "bench", "--k", "200", "--g", "4", "--mu", "0.003",
            "--replicates", "2", "--seed", "3", "--out", str(report_file),
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "speedup" in out
        assert report_file.exists()
        body = report_file.read_text().splitlines()
        assert len(body) == 2  # header + one cell
        assert "NO" not in body[1]  # size cross-check did not fail
