"""The command-line surface: outputs, caching, exit codes."""

import csv
import io
import json

import pytest

from fplrs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEnumerate:
    def test_table_n4(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--n", "4")
        assert code == 0
        data = json.loads(out)
        assert data["n"] == 4 and data["sign"] == "+"
        assert len(data["counts"]) == 14
        assert sum(int(v) for v in data["counts"].values()) == 42

    def test_single_key_at_n1(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--n", "1")
        assert code == 0
        assert json.loads(out)["counts"] == {"()": "1"}

    def test_cap_exit_code(self, capsys):
        code, _, err = run(capsys, "enumerate", "--n", "8")
        assert code == 3
        assert "allow-large" in err

    def test_threads_do_not_change_output(self, capsys):
        _, serial, _ = run(capsys, "enumerate", "--n", "4")
        _, parallel, _ = run(capsys, "enumerate", "--n", "4", "--threads", "2")
        assert serial == parallel

    def test_cache_round_trip(self, capsys, tmp_path):
        args = ("enumerate", "--n", "3", "--cache-dir", str(tmp_path))
        code1, out1, _ = run(capsys, *args)
        stored = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        assert stored, "cache must be populated"
        code2, out2, _ = run(capsys, *args)
        assert (code1, code2) == (0, 0)
        assert out1 == out2
        assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == stored

    def test_out_file_written_atomically(self, capsys, tmp_path):
        target = tmp_path / "table.json"
        code, out, _ = run(capsys, "enumerate", "--n", "2", "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["counts"] == {"(())": "1", "()()": "1"}
        assert not list(tmp_path.glob("*.tmp"))

    def test_corrupted_cache_is_recomputed(self, capsys, tmp_path):
        args = ("enumerate", "--n", "2", "--cache-dir", str(tmp_path))
        _, out1, _ = run(capsys, *args)
        for p in tmp_path.glob("*.json"):
            p.write_text(p.read_text() + " ")
        _, out2, _ = run(capsys, *args)
        assert out1 == out2


class TestGroundstate:
    def test_small_vector(self, capsys):
        code, out, err = run(capsys, "groundstate", "--n", "2")
        assert code == 0
        data = json.loads(out)
        assert data["entries"] == {"()()": "1", "(())": "1"}
        assert "sum 2" in err and "product formula 2" in err

    def test_sum_matches_formula_n3(self, capsys):
        code, out, err = run(capsys, "groundstate", "--n", "3")
        assert code == 0
        values = [int(v) for v in json.loads(out)["entries"].values()]
        assert sum(values) == 7


class TestVerify:
    def test_rs_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "rs", "--n-max", "3")
        assert code == 0
        assert "OK" in out and "FAIL" not in out

    def test_identities_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "identities", "--n-max", "3")
        assert code == 0

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "verify", "tl", "--n-max", "2", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["suite", "check", "status", "detail"]
        assert all(row[2] == "pass" for row in rows[1:])

    def test_unknown_suite_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "nonsense"])
        assert info.value.code == 2


class TestOrbitReport:
    def test_csv_rows_all_zero(self, capsys):
        code, out, _ = run(capsys, "orbit-report", "--n", "3")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["orbit_id", "period", "link_class", "plaquette", "sum"]
        body = rows[1:]
        assert body and all(r[4] == "0" for r in body)
        periods = {int(r[0]): int(r[1]) for r in body}
        assert sum(periods.values()) == 7


class TestUsage:
    def test_missing_required_n(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["enumerate"])
        assert info.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0


class TestReportContract:
    def test_any_failing_line_flips_the_exit_code(self, capsys):
        from fplrs.cli import CheckLine, _report

        good = CheckLine("demo", "fine", True)
        bad = CheckLine("demo", "broken", False, "witness")
        assert _report([good], "text", None) == 0
        assert _report([good, bad], "text", None) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out and "witness" in out
