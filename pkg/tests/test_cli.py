import csv
import json
import math

import numpy as np
import pytest

from sktap.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, theory_payload
from sktap.config import parse_config_text
from sktap.harness import ConfigError, cell_keys, theory_value
from sktap.scalar_theory import ModelParams, solve_q, state_evolution

SMALL = """\
[model]
beta = 0.5
h = 0.7

[simulation]
n_grid = 200, 400
K = 5
replicas = 8
master_seed = 5
jobs = 1

[checks]
enabled = overlaps, effective, xi_mhat
"""


class TestConfigFile:
    def test_parse(self):
        cfg, out = parse_config_text(SMALL + "\n[output]\ndirectory = here\n")
        assert cfg.n_grid == (200, 400) and cfg.K == 5 and cfg.master_seed == 5
        assert cfg.enabled_checks == ("overlaps", "effective", "xi_mhat")
        assert out == "here"

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError, match=r":7: unknown key 'replica'"):
            parse_config_text("[model]\nbeta = 0.5\nh = 0.7\n\n[simulation]\nK = 4\nreplica = 3\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config_text("[model]\nbeta = 0.5\nh = 0.7\n[extras]\nx = 1\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="simulation.K"):
            parse_config_text("[model]\nbeta = 0.5\nh = 0.7\n[simulation]\nK = four\n")

    def test_missing_model(self):
        with pytest.raises(ConfigError, match="model.h"):
            parse_config_text("[model]\nbeta = 0.5\n")

    def test_replicas_zero(self):
        with pytest.raises(ConfigError, match="replicas"):
            parse_config_text(SMALL.replace("replicas = 8", "replicas = 0"))

    def test_nonpositive_field(self):
        with pytest.raises(ConfigError, match="h"):
            parse_config_text(SMALL.replace("h = 0.7", "h = 0"))

    def test_jobs_default(self):
        cfg, _ = parse_config_text(SMALL.replace("jobs = 1\n", ""))
        assert cfg.jobs >= 1


class TestTheoryCommand:
    def test_beta_zero(self, capsys):
        assert main(["theory", "--beta", "0", "--h", "0.7", "--K", "2", "--format", "json"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["q"] == pytest.approx(math.tanh(0.7) ** 2, abs=1e-14)
        assert out["at_gap"] == 0.0

    def test_table_rows_obey_chain(self, capsys):
        assert main(["theory", "--beta", "0.5", "--h", "0.7", "--K", "10", "--format", "csv"]) == EXIT_OK
        lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
        rows = list(csv.DictReader(lines))
        assert len(rows) == 10
        for r in rows:
            # Gamma_{k-1}^2 < rho_k < q in gap form
            assert float(r["q_minus_rho"]) > 0
        for prev, r in zip(rows, rows[1:]):
            assert float(r["q_minus_rho"]) < float(prev["q_minus_Gamma_sq"])

    def test_above_at(self, capsys):
        assert main(["theory", "--beta", "2", "--h", "0.1", "--K", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "violated" in out and "psi_interior_fixed_point" in out

    def test_round_trips_17_digits(self):
        p = theory_payload(0.5, 0.7, 4, 80)
        for r in p["rows"]:
            assert float(format(r["rho"], ".17g")) == r["rho"]

    def test_nonpositive_field_is_usage_error(self, capsys):
        assert main(["theory", "--beta", "1", "--h", "0"]) == EXIT_USAGE
        assert "h > 0" in capsys.readouterr().err

    def test_missing_args(self):
        assert main(["theory", "--h", "0.5"]) == EXIT_USAGE
        assert main([]) == EXIT_USAGE

    def test_writes_file(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["theory", "--beta", "0.5", "--h", "0.7", "--K", "3", "--format", "json", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["K"] == 3


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    cfg = d / "small.ini"
    cfg.write_text(SMALL)
    code = main(["simulate", "--config", str(cfg), "--out", str(d / "out")])
    csvs = sorted((d / "out").glob("*.csv"))
    return d, cfg, code, csvs


class TestSimulateVerify:
    def test_outputs(self, simulated):
        d, _, code, csvs = simulated
        assert code == EXIT_OK
        assert len(csvs) == 1
        stem = csvs[0].name[: -len(".csv")]
        assert stem.startswith("report_") and stem.endswith("_seed5")
        summary = json.loads((d / "out" / f"{stem}.json").read_text())
        manifest = json.loads((d / "out" / f"{stem}.manifest.json").read_text())
        assert summary["passed"] is True and summary["master_seed"] == 5
        assert "started" in manifest and "finished" in manifest
        assert manifest["config"]["n_grid"] == [200, 400]
        assert "started" not in summary

    def test_rerun_is_byte_identical(self, simulated, tmp_path):
        d, cfg, _, csvs = simulated
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
        again = tmp_path / csvs[0].name
        assert again.read_bytes() == csvs[0].read_bytes()

    def test_env_var_output_dir(self, simulated, tmp_path, monkeypatch):
        _, cfg, _, csvs = simulated
        monkeypatch.setenv("SKTAP_OUT_DIR", str(tmp_path / "env"))
        assert main(["simulate", "--config", str(cfg), "--seed", "6"]) == EXIT_OK
        assert len(list((tmp_path / "env").glob("*_seed6.csv"))) == 1

    def test_verify_untouched(self, simulated, capsys):
        assert main(["verify", str(simulated[3][0])]) == EXIT_OK
        assert "reproduced" in capsys.readouterr().out

    def test_verify_perturbed_theory(self, simulated, tmp_path):
        src = simulated[3][0]
        dst = tmp_path / src.name
        for suffix in (".json", ".manifest.json"):
            name = src.name[: -len(".csv")] + suffix
            (tmp_path / name).write_text((src.parent / name).read_text())
        rows = list(csv.reader(src.open()))
        rows[5][6] = repr(float(rows[5][6]) + 0.1)
        with dst.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
        assert main(["verify", str(dst)]) == EXIT_FAIL

    def test_verify_order_doubling(self, simulated):
        src = simulated[3][0]
        assert main(["verify", str(src), "--order", "160"]) == EXIT_OK
        p = ModelParams(0.5, 0.7)
        cols = []
        for order in (80, 160):
            th = solve_q(p, order=order)
            se = state_evolution(th, p, 5, order=order)
            cols.append(np.array([theory_value(*key, se, th, p) for key in cell_keys(5)]))
        assert np.abs(cols[0] - cols[1]).max() < 1e-10

    def test_verify_missing(self, tmp_path):
        assert main(["verify", str(tmp_path / "nope.csv")]) == EXIT_USAGE

    def test_verify_corrupt(self, simulated, tmp_path):
        src = simulated[3][0]
        dst = tmp_path / src.name
        man = src.name[: -len(".csv")] + ".manifest.json"
        (tmp_path / man).write_text((src.parent / man).read_text())
        dst.write_text("garbage\n")
        assert main(["verify", str(dst)]) == EXIT_USAGE

    def test_bad_config_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text(SMALL.replace("K = 5", "K = 5\nkay = 3"))
        assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_USAGE
        assert "kay" in capsys.readouterr().err

    def test_failing_check_exit_code(self, tmp_path):
        cfg = tmp_path / "strict.ini"
        # an impossibly tight band makes the overlap check fail
        cfg.write_text(SMALL + "stderr_mult = 0\nabs_floor = 0\n")
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_FAIL
