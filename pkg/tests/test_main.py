"""main.py（CLI）のテスト"""

import json

import numpy as np
import pytest

import main as cli
from errors import NumericalIntegrityError
from exporter import read_table
from lattice import Grid1D


@pytest.fixture
def wave_file(tmp_path):
    grid = Grid1D(-6.0, 6.0, 385)
    p = grid.points
    path = tmp_path / "narrow_gaussian.txt"
    np.savetxt(path, np.column_stack([p, np.exp(-4 * p**2)]), fmt="%.17g", header="p re")
    return path


class TestExitCodes:
    """終了コードのテスト"""

    def test_argparse_error_exits_with_two(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["scan", "--axis", "z"])
        assert excinfo.value.code == 2

    def test_usage_error(self):
        assert cli.main(["scan", "--scenario", "NO_SUCH"]) == 2
        assert cli.main(["scan"]) == 2

    def test_missing_wave_file(self, tmp_path):
        assert cli.main(["scan", "--wave-file", str(tmp_path / "none.txt")]) == 4

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["scan", "--scenario", "TM_CW", "--config", str(tmp_path / "none.conf")]) == 4

    def test_export_error(self, tmp_path):
        out = tmp_path / "missing" / "scan.csv"
        assert cli.main(["scan", "--scenario", "TM_CW", "--mu-n", "9", "--delta-n", "9", "--out", str(out)]) == 4

    def test_numerical_error(self, monkeypatch):
        def fail(*args, **kwargs):
            raise NumericalIntegrityError("差が大きすぎます")

        monkeypatch.setattr(cli, "oracle_check_state", fail)
        assert cli.main(["oracle-check", "--scenario", "TM_CW", "--points", "1"]) == 3

    def test_mixture_oracle_check_rejected(self):
        assert cli.main(["oracle-check", "--scenario", "TM_CAT_DEPHASED"]) == 2


class TestCommands:
    """サブコマンドのテスト"""

    def test_scan_to_stdout(self, capsys):
        assert cli.main(["scan", "--scenario", "TM_CAT", "--mu-n", "9", "--delta-n", "17"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "mu,delta,pi_W,I"
        assert len(lines) == 9 * 17 + 1

    def test_wigner_json(self, tmp_path):
        out = tmp_path / "w.json"
        argv = ["wigner", "--scenario", "TM_CW", "--mu-n", "9", "--delta-n", "9", "--format", "json", "--out", str(out)]
        assert cli.main(argv) == 0
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["meta"]["scenario"] == "TM_CW"
        assert len(document["rows"]) == 81

    def test_wigner_dephased_mixture(self, tmp_path):
        out = tmp_path / "mixed.csv"
        assert cli.main(["wigner", "--scenario", "TM_CAT_DEPHASED", "--mu-n", "9", "--delta-n", "9", "--out", str(out)]) == 0
        frame = read_table(out)
        np.testing.assert_allclose(frame["I"], 0.5 - 0.5 * frame["pi_W"], atol=1e-15)

    def test_scan_wave_file(self, wave_file, tmp_path):
        out = tmp_path / "scan.csv"
        argv = ["scan", "--wave-file", str(wave_file), "--axis", "y", "--mu-n", "17", "--delta-n", "17", "--out", str(out)]
        assert cli.main(argv) == 0
        frame = read_table(out)
        assert len(frame) == 17 * 17
        assert frame["I"].max() <= 0.5 + 1e-9

    def test_maximize_summary(self, capsys):
        argv = ["maximize", "--scenario", "TM_CAT", "--mu-min", "-2", "--mu-max", "2", "--mu-n", "17", "--delta-n", "65"]
        assert cli.main(argv) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["refined"]["max_I"] >= summary["coarse"]["max_I"]
        assert summary["refined"]["max_I"] >= 0.9

    @pytest.mark.integration
    def test_panel_output_is_byte_identical(self, tmp_path):
        """同じパネルを2回出力すると同一のファイル"""
        first, second = tmp_path / "d1.csv", tmp_path / "d2.csv"
        assert cli.main(["panel", "--id", "d", "--out", str(first)]) == 0
        assert cli.main(["panel", "--id", "d", "--workers", "2", "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert len(read_table(first)) == 129 * 129

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "run.conf"
        config.write_text("scenario = TM_CW\nmu_n = 9\ndelta_n = 9\nformat = json\n", encoding="utf-8")
        assert cli.main(["scan", "--config", str(config)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["meta"]["grids"]["mu"]["n"] == 9
