import math
import subprocess
import sys

import pytest

from ma_ris_sim import cli, performance as perf


def run(tmp_path, *argv, config_text=None):
    args = list(argv)
    if config_text is not None:
        p = tmp_path / "run.cfg"
        p.write_text(config_text)
        args += ["--config", str(p)]
    return cli.main(args)


class TestConfig:
    def test_empty_is_default(self, tmp_path, cfg):
        p = tmp_path / "empty.cfg"
        p.write_text("")
        assert cli.load_config(p) == cfg
        assert cli.load_config(None) == cfg

    def test_single_override(self, cfg):
        c = cli.config_from_values(cli.parse_config_text("tx_power_dbm = -20\n"))
        assert c.tx_power == pytest.approx(perf.dbm_to_watts(-20))
        c = cli.config_from_values(cli.parse_config_text("# comment\n  y_s_m = 7  # inline\n"))
        assert c.y_s == 7.0
        assert c.tx == cfg.tx and c.hpbw == cfg.hpbw

    def test_hpbw_guard(self):
        with pytest.raises(cli.ConfigError, match=r"hpbw_deg must be in \(0, 90\)"):
            cli.parse_config_text("hpbw_deg = 200")

    def test_unknown_key_and_line_numbers(self):
        with pytest.raises(cli.ConfigError, match="line 2: unknown key 'colour'"):
            cli.parse_config_text("seed = 1\ncolour = red\n")
        with pytest.raises(cli.ConfigError, match="line 1: expected"):
            cli.parse_config_text("just words")
        with pytest.raises(cli.ConfigError, match="line 3: cannot parse"):
            cli.parse_config_text("\n\nseed = x")

    def test_ranges(self):
        v = cli.parse_config_text("pt_range_dbm = -20:0:10\nn_range = 2,4,8\nys_range_m = 1:5:2")
        assert v["pt_range_dbm"] == (-20.0, -10.0, 0.0)
        assert v["n_range"] == (2, 4, 8)
        assert v["ys_range_m"] == (1.0, 3.0, 5.0)

    def test_grid_consistency(self):
        with pytest.raises(cli.ConfigError):
            cli.config_from_values(cli.parse_config_text("n_elements = 12\nn_x = 5\nn_y = 2"))
        c = cli.config_from_values(cli.parse_config_text("n_elements = 12"))
        assert c.n_x * c.n_y >= 12
        c = cli.config_from_values(cli.parse_config_text("element_dx_m = 0.01\nelement_dy_m = 0.02"))
        assert c.element_dims == (0.01, 0.02)


class TestFormatting:
    def test_fmt(self):
        assert cli.fmt(0.1) == "0.1"
        assert cli.fmt(-0.0) == "0.0"
        assert cli.fmt(1e-300) == "1e-300"
        assert cli.fmt(-math.inf) == "-inf"
        assert cli.fmt(21) == "21"
        assert cli.fmt(None) == ""
        assert float(cli.fmt(2 / 3)) == 2 / 3


class TestRun:
    def test_sweep_power_structure(self, tmp_path):
        out = tmp_path / "power"
        assert run(tmp_path, "sweep-power", "--output", str(out), "--quiet",
                   config_text="pt_range_dbm = -30,-20,-10\n") == 0
        lines = (tmp_path / "power.csv").read_text().splitlines()
        assert lines[0] == "p_t_dbm,variant,n_eff,p_r_dbm,gamma_db,log10_p_out"
        assert len(lines) == 1 + 4 * 3
        assert {ln.split(",")[1] for ln in lines[1:]} == {"MA-1D", "MA-2D", "FPA-1D", "FPA-2D"}
        manifest = (tmp_path / "power.manifest").read_text()
        for key in ("tool_version", "config_digest", "seed", "prng", "timestamp", "experiment"):
            assert f"{key} = " in manifest

    def test_csv_suffix_stripped(self, tmp_path):
        assert run(tmp_path, "sweep-snr", "--output", str(tmp_path / "snr.csv"), "--quiet") == 0
        assert (tmp_path / "snr.csv").exists() and (tmp_path / "snr.manifest").exists()

    @pytest.mark.parametrize("exp", ["sweep-elements", "sweep-position", "compare"])
    def test_other_experiments(self, tmp_path, exp):
        cfg = "n_range = 1:25\n"
        assert run(tmp_path, exp, "--output", str(tmp_path / exp), "--quiet", config_text=cfg) == 0
        text = (tmp_path / f"{exp}.csv").read_text()
        assert text.endswith("\n") and "\r" not in text

    def test_outage_check_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for stem in (a, b):
            assert cli.main(["outage-check", "--output", str(stem), "--trials", "20000",
                             "--seed", "42", "--quiet"]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert "seed = 42" in (tmp_path / "a.manifest").read_text()

    def test_digest_tracks_config(self, tmp_path):
        def digest(text):
            run(tmp_path, "sweep-snr", "--output", str(tmp_path / "d"), "--quiet", config_text=text)
            line = [ln for ln in (tmp_path / "d.manifest").read_text().splitlines()
                    if ln.startswith("config_digest")]
            return line[0]
        assert digest("seed = 1\n") == digest("seed = 1\n")
        assert digest("seed = 1\n") != digest("seed = 2\n")

    def test_bad_config_exit(self, tmp_path, capsys):
        assert run(tmp_path, "sweep-power", "--output", str(tmp_path / "x"),
                   config_text="hpbw_deg = 200\n") == 1
        assert "hpbw_deg must be in (0, 90)" in capsys.readouterr().err

    def test_unknown_experiment(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep-everything", "--output", "x"])
        assert exc.value.code == 2

    def test_bad_trials(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            cli.main(["outage-check", "--output", str(tmp_path / "x"), "--trials", "10"])
        assert exc.value.code == 2

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert cli.main(["sweep-snr", "--output", str(blocker / "sub" / "x"), "--quiet"]) == 1

    def test_console_script(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "ma_ris_sim.cli", "bogus"], capture_output=True, text=True)
        assert res.returncode == 2
        assert "usage:" in res.stderr
