import pytest

from haplosim import InvalidParameterError, TableFormatError
from haplosim.io import (
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


class TestCountTable:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "table.csv"
        rows = [((0, -2, 5), 3), ((1, 0, 0), 12)]
        write_count_table(path, rows, 3)
        back, r = read_count_table(path)
        assert back == rows
        assert r == 3

    def test_rows_written_sorted(self, tmp_path):
        path = tmp_path / "table.csv"
        write_count_table(path, [((5,), 1), ((-1,), 2)], 1)
        assert path.read_text() == "Locus1,N\n-1,2\n5,1\n"

    def test_empty_table_header_only(self, tmp_path):
        path = tmp_path / "table.csv"
        write_count_table(path, [], 2)
        assert path.read_text() == "Locus1,Locus2,N\n"
        back, r = read_count_table(path)
        assert back == [] and r == 2

    def test_parse_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("Locus1,N\n1,2\nx,3\n")
        with pytest.raises(TableFormatError) as err:
            read_count_table(path)
        assert err.value.line_no == 3

        path.write_text("Locus1,N\n1\n")
        with pytest.raises(TableFormatError) as err:
            read_count_table(path)
        assert err.value.line_no == 2

        path.write_text("wrong,header\n")
        with pytest.raises(TableFormatError) as err:
            read_count_table(path)
        assert err.value.line_no == 1

        path.write_text("Locus1,N\n1,0\n")
        with pytest.raises(TableFormatError):
            read_count_table(path)


class TestSeries:
    def test_generations_from_zero(self, tmp_path):
        path = tmp_path / "sizes.csv"
        write_series(path, [10, 11, 9])
        assert path.read_text() == "generation,value\n0,10\n1,11\n2,9\n"

    def test_float_values_round_trip_exactly(self, tmp_path):
        path = tmp_path / "expected.csv"
        values = [10.0, 10.512448324347459, 1 / 3]
        write_series(path, values)
        lines = path.read_text().splitlines()[1:]
        parsed = [float(line.split(",")[1]) for line in lines]
        assert parsed == values


class TestSnapshots:
    def test_write_read_round_trip(self, tmp_path):
        snaps = {5: [((0, 1), 2)], 10: [], 15: [((1, 1), 7), ((2, 0), 1)]}
        write_snapshots(tmp_path / "snaps", snaps, 2)
        back = read_snapshots(tmp_path / "snaps")
        assert back == snaps

    def test_missing_dir(self, tmp_path):
        with pytest.raises((OSError, InvalidParameterError)):
            read_snapshots(tmp_path / "nope")


class TestManifest:
    def test_round_trip_skips_comments_and_none(self, tmp_path):
        path = tmp_path / "manifest.txt"
        write_manifest(path, {"k": 5, "alpha": 1.25, "init": None, "flag": True},
                       comments=["tool 0.1", "written sometime"])
        text = path.read_text()
        assert text.startswith("# tool 0.1\n")
        values = read_config_file(path)
        assert values == {"k": "5", "alpha": "1.25", "flag": "true"}

    def test_bad_line(self, tmp_path):
        path = tmp_path / "conf.txt"
        path.write_text("k=5\nnot a pair\n")
        with pytest.raises(TableFormatError) as err:
            read_config_file(path)
        assert err.value.line_no == 2


class TestGenlist:
    def test_indices_and_ranges(self):
        assert parse_genlist("1,5,10") == (1, 5, 10)
        assert parse_genlist("100:500:100") == (100, 200, 300, 400, 500)
        assert parse_genlist("3:6") == (3, 4, 5, 6)
        assert parse_genlist("5,1:3,5") == (1, 2, 3, 5)
        assert parse_genlist("") == ()

    def test_range_validation(self):
        with pytest.raises(InvalidParameterError):
            parse_genlist("1:10:0")
        with pytest.raises(InvalidParameterError):
            parse_genlist("a,b")
        with pytest.raises(InvalidParameterError):
            parse_genlist("1:2:3:4")
        with pytest.raises(InvalidParameterError):
            parse_genlist("5,11", g=10)

    def test_format_round_trip(self):
        gens = parse_genlist("2,4,8")
        assert parse_genlist(format_genlist(gens)) == gens
