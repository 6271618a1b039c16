"""Command-line interface: outputs, file formats, and exit codes."""
import math

import pytest

from u2metrics.cli import main
from u2metrics.catalog import catalog_get
from u2metrics.metricfile import emit_metric


def _write_metric(tmp_path, name, params=None, fname="metric.txt"):
    path = tmp_path / fname
    path.write_text(emit_metric(catalog_get(name, params)))
    return str(path)


class TestCatalogCommands:
    def test_list(self, capsys):
        assert main(["catalog", "list"]) == 0
        out = capsys.readouterr().out
        assert "taub-nut" in out and "eguchi-hanson" in out

    def test_emit_to_file_and_classify(self, tmp_path, capsys):
        out_file = tmp_path / "tn.txt"
        rc = main(["catalog", "emit", "taub-nut", "--param", "m=2", "--out", str(out_file)])
        assert rc == 0
        rc = main(["classify", str(out_file)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "ricci_flat yes" in text
        assert "hyperkahler_Iplus yes" in text

    def test_emit_unknown_name_exits_1(self, capsys):
        assert main(["catalog", "emit", "nope"]) == 1
        assert capsys.readouterr().err != ""

    def test_emit_bad_param_exits_1(self):
        assert main(["catalog", "emit", "taub-nut", "--param", "m=-1"]) == 1


class TestClassifyCommand:
    def test_non_extremal_profile(self, tmp_path, capsys):
        path = tmp_path / "m.txt"
        path.write_text(
            "name off\ndomain -1 1 open open\nF term 0 1\nF term 3 1\nC exp C0=1 eps=-1\n"
        )
        assert main(["classify", str(path)]) == 0
        out = capsys.readouterr().out
        assert "conformally_extremal no" in out

    def test_bt_predicate_with_t(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "taub-bolt")
        assert main(["classify", path, "--t", "1.0"]) == 0
        assert "bt_flat yes" in capsys.readouterr().out

    def test_malformed_file_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("name x\nnot-a-directive\n")
        assert main(["classify", str(path)]) == 2
        assert "line 2" in capsys.readouterr().err


class TestCurvatureCommand:
    def test_tsv_output(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "taub-nut")
        assert main(["curvature", path, "--grid", "0.5:2.0:5"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0].startswith("#")
        assert "u2metrics=" in lines[0]
        assert "\t" in lines[0] and "\t" in lines[1]
        assert len(lines) == 6

    def test_out_file_written_atomically(self, tmp_path):
        path = _write_metric(tmp_path, "taub-nut")
        out_file = tmp_path / "curv.tsv"
        assert main(["curvature", path, "--grid", "0.5:2.0:5", "--out", str(out_file)]) == 0
        content = out_file.read_text()
        assert content.endswith("\n")
        assert len(content.strip().splitlines()) == 6

    def test_grid_outside_domain_exits_3(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "taub-nut")  # domain (0, inf)
        assert main(["curvature", path, "--grid=-2.0:-1.0:3"]) == 3
        assert capsys.readouterr().err != ""

    def test_bad_grid_syntax_exits_1(self, tmp_path):
        path = _write_metric(tmp_path, "taub-nut")
        assert main(["curvature", path, "--grid", "nope"]) == 1


class TestEndsCommand:
    def test_reports_bolt_and_ends(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "eguchi-hanson")
        assert main(["ends", path]) == 0
        out = capsys.readouterr().out
        assert "bolt" in out
        assert "ALE" in out


class TestTransformCommand:
    def test_roundtrip_is_identity(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "modified-taub-nut-2")
        original = open(path).read()
        assert main(["transform", path]) == 0
        once = capsys.readouterr().out
        partner = tmp_path / "partner.txt"
        partner.write_text(once)
        assert main(["transform", str(partner)]) == 0
        twice = capsys.readouterr().out
        assert "eps=+1" in once
        assert twice == original

    def test_non_kahler_exits_3(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "taub-bolt")
        assert main(["transform", path]) != 0


class TestBtCommands:
    def test_residuals_tsv(self, tmp_path, capsys):
        path = _write_metric(tmp_path, "taub-bolt")
        rc = main(["bt", "residuals", path, "--t", "1", "--s", "const:0", "--grid=-1.0:-0.3:5"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("#")
        for line in lines[1:]:
            cols = [float(v) for v in line.split("\t")]
            assert max(abs(v) for v in cols[1:]) < 1e-6

    def test_integrate_from_state_file(self, tmp_path, capsys):
        state = tmp_path / "seed.txt"
        state.write_text(
            "z 0.0\nF 1.3\nF1d 0.4\nF2d -0.2\nF3d 0.1\nC 1.0\nC1d 0.3\ns 0.5\nK 0.0\n"
        )
        out_file = tmp_path / "traj.tsv"
        rc = main(
            ["bt", "integrate", "--t", "1", "--init", str(state), "--span", "0:0.4", "--out", str(out_file)]
        )
        assert rc == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0].startswith("#")
        assert len(lines) > 5

    def test_search(self, capsys):
        assert main(["bt", "search", "--t", "1", "--trials", "6", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "extremality_residual" in out

    def test_missing_state_key_exits_2(self, tmp_path, capsys):
        state = tmp_path / "seed.txt"
        state.write_text("z 0.0\nF 1.3\n")
        assert main(["bt", "integrate", "--t", "1", "--init", str(state), "--span", "0:0.4"]) == 2
        assert "missing fields" in capsys.readouterr().err


class TestRootsCommand:
    def test_page_constants(self, capsys):
        assert main(["roots", "page"]) == 0
        out = capsys.readouterr().out
        assert "0.281701557908" in out
        assert "0.579058676041" in out


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_file_exits_nonzero(self, capsys):
        assert main(["classify", "/no/such/file.txt"]) in (1, 2)
