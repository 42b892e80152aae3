"""Tests for the command-line interface and its exit-code contract."""

import json
import subprocess
import sys

import pytest

from etaforms.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExpand:
    def test_hauptmodul_expansion_text(self, capsys):
        code, out, _ = run_cli(capsys, "expand", "--level", "6", "--weight", "0",
                               "--m", "1", "--terms", "4", "--no-cache-dir")
        assert code == 0
        assert out.strip() == "q^-1 + 6q + 4q^2 - 3q^3"

    def test_weight2_cusp_space(self, capsys):
        code, out, _ = run_cli(capsys, "expand", "--level", "6", "--weight", "2",
                               "--space", "S", "--m", "1", "--terms", "4", "--no-cache-dir")
        assert code == 0
        assert out.strip() == "q^-1 - 6q - 8q^2 + 9q^3"

    def test_unsupported_level_is_usage_error(self, capsys):
        code = main(["expand", "--level", "7", "--weight", "0", "--m", "1", "--no-cache-dir"])
        capsys.readouterr()
        assert code == 2

    def test_index_below_range_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "expand", "--level", "6", "--weight", "2",
                               "--m", "-5", "--no-cache-dir")
        assert code == 2
        assert "below minimal pole order" in err

    def test_small_prec_rejected(self, capsys):
        code, _, _ = run_cli(capsys, "expand", "--level", "6", "--weight", "0",
                             "--m", "1", "--prec", "8", "--no-cache-dir")
        assert code == 2

    def test_json_output_round_trips(self, capsys):
        code, out, _ = run_cli(capsys, "expand", "--level", "12", "--weight", "0",
                               "--m", "1", "--terms", "3", "--format", "json",
                               "--no-cache-dir")
        assert code == 0
        doc = json.loads(out)
        assert doc["command"] == "expand"
        assert doc["coeffs"]["valuation"] == -1
        assert doc["coeffs"]["coeffs"][0] == "1"
        assert doc["summary"]["pass"] is True


class TestVerify:
    def test_duality_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "duality", "--level", "6",
                               "--weight", "0", "--window", "6", "--no-cache-dir")
        assert code == 0
        assert "pass" in out

    def test_uplemma(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "uplemma", "--level", "12",
                             "--mmax", "6", "--zero-window", "20", "--no-cache-dir")
        assert code == 0

    def test_genfun(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "genfun", "--level", "10",
                             "--weight", "4", "--mmax", "4", "--no-cache-dir")
        assert code == 0

    def test_al(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "al", "--level", "6", "--p", "3",
                             "--rset", "1", "--amax", "1", "--no-cache-dir")
        assert code == 0

    def test_insufficient_precision_exit_four(self, capsys):
        code, _, err = run_cli(capsys, "verify", "genfun", "--level", "6",
                               "--weight", "0", "--mmax", "40", "--zprec", "20",
                               "--no-cache-dir")
        assert code == 4
        assert "precision" in err


class TestScan:
    def test_small_scan(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                               "--amax", "2", "--bmax", "2", "--ncap", "40",
                               "--no-cache-dir")
        assert code == 0
        assert "congruence-scan: pass" in out

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                               "--amax", "1", "--bmax", "1", "--ncap", "20",
                               "--format", "csv", "--no-cache-dir")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "N,p,a,b,r,s,m,n,coeff,valuation,bound,status"
        assert all(line.startswith("6,2,") for line in lines[1:])

    def test_report_file(self, capsys, tmp_path):
        path = tmp_path / "rows.csv"
        code, _, _ = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                             "--amax", "1", "--bmax", "1", "--ncap", "20",
                             "--report", str(path), "--no-cache-dir")
        assert code == 0
        assert path.read_text().startswith("N,p,a,b,r,s")

        jpath = tmp_path / "rows.json"
        code, _, _ = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                             "--amax", "1", "--bmax", "1", "--ncap", "20",
                             "--report", str(jpath), "--no-cache-dir")
        doc = json.loads(jpath.read_text())
        assert doc["command"] == "scan" and doc["summary"]["failures"] == 0

    def test_bad_residue_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                             "--rset", "2", "--ncap", "20", "--no-cache-dir")
        assert code == 2

    def test_require_weak_filters_rows(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--level", "18", "--p", "2",
                               "--amax", "2", "--bmax", "2", "--ncap", "40",
                               "--require-weak", "--format", "csv", "--no-cache-dir")
        assert code == 0
        lines = out.strip().splitlines()[1:]
        assert lines
        # only residues r with 3 not dividing r remain
        assert all(int(line.split(",")[4]) % 3 != 0 for line in lines)

    def test_require_weak_rejected_for_strong_only_pair(self, capsys):
        code, _, err = run_cli(capsys, "scan", "--level", "6", "--p", "2",
                               "--amax", "1", "--bmax", "1", "--ncap", "20",
                               "--require-weak", "--no-cache-dir")
        assert code == 2
        assert "no weak congruence case" in err


class TestValidateAndCache:
    def test_validate(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "--level", "18", "--no-cache-dir")
        assert code == 0
        assert "overall: pass" in out

    def test_cache_info_and_clear(self, capsys, tmp_path):
        cache_dir = str(tmp_path / "cache")
        code, _, _ = run_cli(capsys, "expand", "--level", "6", "--weight", "0",
                             "--m", "1", "--cache-dir", cache_dir)
        assert code == 0
        code, out, _ = run_cli(capsys, "cache", "info", "--cache-dir", cache_dir)
        assert code == 0 and "families: 1" in out
        code, out, _ = run_cli(capsys, "cache", "clear", "--cache-dir", cache_dir)
        assert code == 0 and "removed 1" in out

    def test_warm_and_cold_outputs_identical(self, capsys, tmp_path):
        cache_dir = str(tmp_path / "cache")
        argv = ["expand", "--level", "6", "--weight", "0", "--m", "2",
                "--terms", "5", "--format", "json", "--cache-dir", cache_dir]
        code, cold, _ = run_cli(capsys, *argv)
        assert code == 0
        code, warm, _ = run_cli(capsys, *argv)
        assert code == 0
        assert cold == warm


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "etaforms.cli", "expand", "--level", "6",
         "--weight", "0", "--m", "1", "--terms", "4", "--no-cache-dir"],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout.strip() == "q^-1 + 6q + 4q^2 - 3q^3"
