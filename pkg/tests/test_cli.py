"""CLI surface: flags, exit codes, file formats, report round trips."""

import io
import json

import numpy as np
import pytest

from rangewalk.cli import (
    CsvFormatError,
    read_trajectory_csv,
    run_command,
    write_trajectory_csv,
)
from rangewalk.generators import gen_spiral2d, gen_zigzag


def run(argv):
    return run_command(argv)


class TestTrajectoryCsv:
    def test_write_read_roundtrip_1d(self):
        stream, _ = gen_zigzag(0.5, 20)
        buf = io.StringIO()
        write_trajectory_csv(stream, 20, buf)
        text = buf.getvalue()
        assert text.startswith("n,x1\n0,0\n1,1\n")
        assert "\r" not in text
        arr = read_trajectory_csv(io.StringIO(text))
        stream2, _ = gen_zigzag(0.5, 20)
        assert np.array_equal(arr, stream2.path_array(20))

    def test_write_read_roundtrip_2d(self):
        buf = io.StringIO()
        write_trajectory_csv(gen_spiral2d(9), 9, buf)
        assert buf.getvalue().splitlines()[0] == "n,x1,x2"
        arr = read_trajectory_csv(io.StringIO(buf.getvalue()))
        assert arr.shape == (10, 2)
        assert arr[1].tolist() == [1, 0]

    def test_bad_header(self):
        with pytest.raises(CsvFormatError, match="line 1"):
            read_trajectory_csv(io.StringIO("t,x\n0,0\n"))

    def test_non_integer_field_reports_line(self):
        with pytest.raises(CsvFormatError, match="line 3"):
            read_trajectory_csv(io.StringIO("n,x1\n0,0\n1,oops\n"))

    def test_wrong_index_reports_line(self):
        with pytest.raises(CsvFormatError, match="line 4"):
            read_trajectory_csv(io.StringIO("n,x1\n0,0\n1,1\n5,2\n"))

    def test_wrong_field_count_reports_line(self):
        with pytest.raises(CsvFormatError, match="line 2"):
            read_trajectory_csv(io.StringIO("n,x1\n0,0,7\n"))


class TestGenerate:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "t.csv"
        assert run(["generate", "--gen", "zigzag", "--ell", "0.5", "--steps", "20", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,x1"
        assert len(lines) == 22
        assert lines[-1] == "20,2"

    def test_flag_validation_names_the_flag(self, capsys):
        assert run(["generate", "--gen", "srw", "--p", "1.5", "--steps", "5", "--seed", "1"]) == 2
        assert "--p" in capsys.readouterr().err

    def test_steps_required(self, capsys):
        assert run(["generate", "--gen", "srw", "--p", "0.5", "--seed", "1"]) == 2
        assert "--steps" in capsys.readouterr().err

    def test_unknown_flag_is_an_error(self, capsys):
        assert run(["generate", "--gen", "srw", "--p", ".5", "--steps", "5", "--frobnicate"]) == 2


class TestAnalyze:
    def test_spec_example_last_tau(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        run(["generate", "--gen", "zigzag", "--ell", "0.5", "--steps", "20", "--out", str(out)])
        assert run(["analyze", "--in", str(out), "--m", "1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        final_row = json.loads(lines[-3])
        assert final_row["last_tau"] == 18
        assert final_row["tau_count"] == 4

    def test_roundtrip_is_byte_identical(self, tmp_path):
        csv_path = tmp_path / "t.csv"
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run(["generate", "--gen", "srw", "--p", "0.6", "--steps", "500", "--seed", "5", "--out", str(csv_path)])
        assert run([
            "analyze", "--in", str(csv_path),
            "--gen", "srw", "--p", "0.6", "--steps", "500", "--seed", "5",
            "--out", str(a),
        ]) == 0
        assert run([
            "analyze", "--gen", "srw", "--p", "0.6", "--steps", "500", "--seed", "5",
            "--out", str(b),
        ]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_report_embeds_config_and_seed(self, tmp_path):
        out = tmp_path / "r.jsonl"
        run(["analyze", "--gen", "srw", "--p", "0.6", "--steps", "100", "--seed", "5", "--out", str(out)])
        prov = json.loads(out.read_text().splitlines()[-1])["provenance"]
        assert prov["seed"] == 5
        assert prov["params"]["p"] == 0.6

    def test_plot_data_tsv(self, capsys):
        assert run(["analyze", "--gen", "zigzag", "--ell", "0.5", "--steps", "16", "--plot-data"]) == 0
        rows = [line.split("\t") for line in capsys.readouterr().out.strip().splitlines()]
        assert all(len(r) == 3 for r in rows)
        series = {r[2] for r in rows}
        assert series == {"x_over_n", "M_over_n", "r_over_n"}

    def test_checkpoints_arith(self, capsys):
        assert run(["analyze", "--gen", "zigzag", "--ell", "0.5", "--steps", "12",
                    "--checkpoints", "arith:4"]) == 0
        ns = [json.loads(l)["n"] for l in capsys.readouterr().out.strip().splitlines()[:-2]]
        assert ns == [4, 8, 12]

    def test_violating_csv_is_an_io_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("n,x1\n0,0\n1,1\n2,6\n")
        assert run(["analyze", "--in", str(bad), "--m", "1"]) == 2
        assert "step 1" in capsys.readouterr().err

    def test_missing_input(self, capsys):
        assert run(["analyze", "--in", "/nonexistent/file.csv", "--m", "1"]) == 2

    def test_needs_source(self, capsys):
        assert run(["analyze", "--steps", "10"]) == 2


class TestMc:
    def test_json_report_with_verdicts(self, capsys):
        assert run([
            "mc", "--gen", "srw", "--p", "0.7", "--steps", "20000",
            "--trials", "50", "--seed", "42", "--json", "--workers", "2",
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["spec"]["trials"] == 50
        assert doc["per_metric"]["range_speed"]["theory"] == pytest.approx(0.4)
        assert doc["verdicts"]["range_speed"]["pass"]
        assert doc["verdicts"]["cross_range_walk"]["pass"]
        assert doc["tol"] == 0.02

    def test_failing_tolerance_exits_one(self, capsys):
        assert run([
            "mc", "--gen", "srw", "--p", "0.7", "--steps", "1000",
            "--trials", "10", "--seed", "1", "--tol", "1e-12", "--json",
        ]) == 1

    def test_workers_do_not_change_the_report(self, capsys):
        argv = ["mc", "--gen", "srw", "--p", "0.6", "--steps", "3000",
                "--trials", "20", "--seed", "9", "--json"]
        assert run(argv + ["--workers", "1"]) == 0
        serial = capsys.readouterr().out
        assert run(argv + ["--workers", "4"]) == 0
        pooled = capsys.readouterr().out
        assert serial == pooled

    def test_metric_selection(self, capsys):
        assert run([
            "mc", "--gen", "birth-death", "--preset", "symmetric", "--steps", "1000",
            "--trials", "5", "--seed", "3", "--metric", "max_speed,no_return", "--json",
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc["per_metric"]) == {"max_speed", "no_return"}
        assert "verdicts" not in doc  # no theory for birth-death

    def test_seed_required(self, capsys):
        assert run(["mc", "--gen", "srw", "--p", "0.5", "--steps", "10", "--trials", "2"]) == 2
        assert "--seed" in capsys.readouterr().err

    def test_report_written_to_file(self, tmp_path):
        out = tmp_path / "mc.json"
        assert run([
            "mc", "--gen", "srw", "--p", "1.0", "--steps", "100",
            "--trials", "2", "--seed", "1", "--out", str(out),
        ]) == 0
        doc = json.loads(out.read_text())
        assert doc["per_metric"]["range_speed"]["mean"] == pytest.approx(1.01)


class TestVerify:
    def test_spec_example_invocation(self, capsys):
        assert run([
            "verify", "--suite", "maximal-range",
            "--paths", "100", "--len", "200", "--m", "3", "--seed", "7",
        ]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_every_suite_prints_per_property_lines(self, capsys):
        assert run(["verify", "--suite", "sandwich", "--paths", "50", "--len", "100"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert all(line.startswith("PASS: ") for line in lines)

    def test_unknown_suite_is_usage_error(self, capsys):
        assert run(["verify", "--suite", "nonsense"]) == 2


class TestTopLevel:
    def test_unknown_subcommand(self):
        assert run(["explode"]) == 2

    def test_no_subcommand(self):
        assert run([]) == 2
