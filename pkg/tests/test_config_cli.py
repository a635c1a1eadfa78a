"""Configuration ingestion and the command-line interface."""

import csv
import json
import subprocess
import sys

import pytest

from vmmecap.cli import main
from vmmecap.config import config_digest, deep_merge, load_config
from vmmecap.defaults import paper_defaults
from vmmecap.errors import ConfigError


class TestConfig:
    def test_defaults_build(self):
        cfg = load_config()
        assert len(cfg.mix.apps) == 3
        assert cfg.queue.mu_fe == 120000.0
        assert cfg.geom.mean_speed_mps == pytest.approx(2.1)
        assert cfg.mmpp.lambda2 == 0.065

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("queue:\n  mu_fee: 1000\n")
        with pytest.raises(ConfigError, match="queue.mu_fee"):
            load_config(str(p))

    def test_deep_merge_override(self, tmp_path):
        p = tmp_path / "ok.yaml"
        p.write_text("queue:\n  mu_sdb: 50000\nscenario:\n  t_i_s: 5\n")
        cfg = load_config(str(p))
        assert cfg.queue.mu_sdb == 50000.0
        assert cfg.queue.mu_fe == 120000.0  # untouched sibling survives
        assert cfg.scenario["t_i_s"] == 5

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/no/such/file.yaml")

    def test_digest_stable_and_sensitive(self):
        a = config_digest(paper_defaults())
        b = config_digest(paper_defaults())
        assert a == b
        mutated = deep_merge(paper_defaults(), {"queue": {"m": 2}})
        assert config_digest(mutated) != a

    def test_bad_value_reported_as_config_error(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("mmpp:\n  p: 1.5\n")
        with pytest.raises(ConfigError):
            load_config(str(p))

    def test_distribution_override(self, tmp_path):
        p = tmp_path / "ok.yaml"
        p.write_text("geometry:\n  speed_dist: {kind: constant, value: 3.0}\n")
        cfg = load_config(str(p))
        assert cfg.geom.mean_speed_mps == pytest.approx(3.0)


def run_cli(args, tmp_path, fmt="csv"):
    out = tmp_path / "out.txt"
    code = main(args + ["--out", str(out), "--format", fmt])
    return code, out.read_text()


class TestCli:
    def test_rates_reference_row(self, tmp_path):
        code, text = run_cli(["rates", "--ti", "10"], tmp_path)
        assert code == 0
        rows = [r for r in csv.reader(text.splitlines()) if not r[0].startswith("#")]
        header, row = rows[0], rows[1]
        vals = dict(zip(header, row))
        assert float(vals["lam_u_sr_per_s"]) == pytest.approx(0.0045394, rel=1e-4)
        assert float(vals["lam_s_sr_per_s"]) == pytest.approx(0.0116909, rel=1e-4)

    def test_rates_ti_zero_mtc_limit(self, tmp_path):
        code, text = run_cli(["rates", "--ti", "0"], tmp_path)
        rows = [r for r in csv.reader(text.splitlines()) if not r[0].startswith("#")]
        vals = dict(zip(rows[0], rows[1]))
        assert float(vals["lam_s_sr_per_s"]) == pytest.approx(0.0214825, rel=1e-4)

    def test_rates_sweep_monotone(self, tmp_path):
        code, text = run_cli(["rates", "--ti", "1:30:5"], tmp_path)
        rows = [r for r in csv.reader(text.splitlines()) if not r[0].startswith("#")]
        idx = rows[0].index("lam_u_sr_per_s")
        col = [float(r[idx]) for r in rows[1:]]
        assert all(b <= a for a, b in zip(col, col[1:]))

    def test_dimension_reference(self, tmp_path):
        code, text = run_cli(["dimension", "--users", "20000"], tmp_path, fmt="json")
        assert code == 0
        row = json.loads(text)["rows"][0]
        assert row["m_min"] == 1
        assert row["t_mean_us"] < 1000.0

    def test_capacity_row(self, tmp_path):
        code, text = run_cli(["capacity", "--m", "10,12"], tmp_path, fmt="json")
        rows = json.loads(text)["rows"]
        assert rows[0]["n_u_max"] == pytest.approx(978021, abs=3)
        assert rows[1]["n_u_max"] >= rows[0]["n_u_max"]

    def test_scalability_reference_row(self, tmp_path):
        code, text = run_cli(["scalability", "--kmax", "2"], tmp_path, fmt="json")
        rows = json.loads(text)["rows"]
        assert rows[0]["psi"] == 1.0
        assert rows[0]["class"] == "positive"
        assert rows[1]["psi"] == pytest.approx(1.1829, abs=2e-3)

    def test_simulate_deterministic_output(self, tmp_path):
        args = ["simulate", "--users", "50", "--mtcd-ratio", "1",
                "--duration-s", "1500", "--seed", "9"]
        _, a = run_cli(args, tmp_path, fmt="json")
        _, b = run_cli(args, tmp_path, fmt="json")
        assert a == b

    def test_config_error_exit_code(self, tmp_path):
        code = main(["rates", "--config", "/no/such/file.yaml"])
        assert code == 2

    def test_unknown_key_exit_code(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("nonsense: 1\n")
        assert main(["rates", "--config", str(p)]) == 2

    def test_infeasible_exit_code(self, tmp_path):
        # DB-saturating population: dimensioning has no solution
        assert main(["dimension", "--users", "30000000", "--out",
                     str(tmp_path / "x")]) == 3

    def test_digest_in_header(self, tmp_path):
        _, text = run_cli(["rates", "--ti", "10"], tmp_path)
        assert "config_digest" in text
        assert "tool_version" in text

    def test_console_script_installed(self):
        proc = subprocess.run([sys.executable, "-m", "vmmecap.cli", "--version"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
