import json

import numpy as np

from bruteforce import srw_pmf
from erwlab import cli, stats, walk


def run(*argv):
    return cli.main([str(a) for a in argv])


class TestOracleCommand:
    def test_srw_pmf_matches_closed_form(self, tmp_path):
        # binomial pmf to 1e-12 in total variation
        assert run("oracle", "--p", 0.5, "--q", 0.5, "--n", 100,
                   "--out-dir", tmp_path) == 0
        lines = (tmp_path / "pmf.csv").read_text().splitlines()
        assert lines[1] == "s,prob"
        emitted = {}
        for line in lines[2:]:
            s, pr = line.split(",")
            emitted[int(s)] = float(pr)
        assert stats.tv_distance(emitted, srw_pmf(100)) <= 1e-12

    def test_moments_json(self, tmp_path):
        assert run("oracle", "--p", 0.75, "--q", 0.7, "--n", 64,
                   "--out-dir", tmp_path) == 0
        m = json.loads((tmp_path / "moments.json").read_text())
        assert m["martingale_identity_error"] <= 1e-10
        assert m["mass_defect"] <= 1e-12
        assert m["second"] > 0 and m["fourth"] > 0
        assert m["meta"]["version"].startswith("erwlab-")

    def test_bad_params(self, tmp_path):
        assert run("oracle", "--p", 1.5, "--q", 0.5, "--n", 4,
                   "--out-dir", tmp_path) == 2


class TestSimulateCommand:
    def test_dump_round_trip(self, tmp_path):
        assert run("simulate", "--p", 0.75, "--q", 0.2, "--horizon", 123,
                   "--n-paths", 40, "--seed", 99, "--out-dir", tmp_path) == 0
        header, inc = cli.read_dump(tmp_path / "paths.bin")
        assert header == {"p": 0.75, "q": 0.2, "horizon": 123, "n_paths": 40, "seed": 99}
        pm = walk.WalkParams(p=0.75, q=0.2, horizon=123, master_seed=99)
        ref = walk.simulate_markov(pm, 40)
        assert np.array_equal(inc, ref.increments())

    def test_scaled_csv(self, tmp_path):
        assert run("simulate", "--p", 0.3, "--q", 0.5, "--horizon", 40,
                   "--n-paths", 5, "--seed", 1, "--scale", "diffusive",
                   "--scale-n", 20, "--grid", 0.0, 1.0, 2.0,
                   "--out-dir", tmp_path) == 0
        lines = (tmp_path / "scaled.csv").read_text().splitlines()
        assert lines[0] == "path_id,t,value"
        assert len(lines) == 1 + 5 * 3

    def test_regime_violation_is_config_error(self, tmp_path):
        rc = run("simulate", "--p", 0.9, "--q", 0.5, "--horizon", 40,
                 "--n-paths", 5, "--scale", "diffusive", "--scale-n", 20,
                 "--grid", 0.0, 1.0, "--out-dir", tmp_path)
        assert rc == 2


class TestTestCommand:
    def test_single_experiment_smoke(self, tmp_path):
        assert run("test", "--experiment", "clt-diffusive", "--preset", "smoke",
                   "--out-dir", tmp_path) == 0
        reports = cli.load_reports(tmp_path)
        assert len(reports) == 1 and reports[0].passed
        assert (tmp_path / "clt_diffusive.csv").exists()
        assert (tmp_path / "config.json").exists()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = {"experiment": "clt-diffusive", "preset": "smoke", "seed": 5,
               "out_dir": str(tmp_path / "from_file")}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "flag_wins"
        assert run("test", "--config", cfg_path, "--out-dir", out) == 0
        echoed = json.loads((out / "config.json").read_text())
        assert echoed["config"]["seed"] == 5
        assert echoed["config"]["out_dir"] == str(out)

    def test_unknown_config_key(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"experiment": "coeff", "bogus": 1}))
        assert run("test", "--config", cfg_path, "--out-dir", tmp_path) == 2

    def test_regime_gate_in_config(self, tmp_path):
        assert run("test", "--experiment", "clt-diffusive", "--preset", "smoke",
                   "--p", 0.9, "--out-dir", tmp_path) == 2

    def test_overrides_rejected_for_all(self, tmp_path):
        assert run("test", "--experiment", "all", "--preset", "smoke",
                   "--p", 0.5, "--out-dir", tmp_path) == 2

    def test_failing_check_returns_one(self, tmp_path):
        # 30 paths cannot resolve an 11-atom pmf to TV 0.03
        rc = run("test", "--experiment", "mode-equiv", "--preset", "smoke",
                 "--n-paths", 30, "--seed", 0, "--out-dir", tmp_path)
        assert rc == 1
        reports = cli.load_reports(tmp_path)
        assert any(not r.passed for r in reports)

    def test_reports_carry_meta(self, tmp_path):
        assert run("test", "--experiment", "coeff", "--preset", "smoke",
                   "--seed", 77, "--out-dir", tmp_path) == 0
        first = json.loads((tmp_path / "reports.jsonl").read_text().splitlines()[0])
        assert first["kind"] == "meta"
        assert first["seed"] == 77
        assert "config_hash" in first and first["version"].startswith("erwlab-")
        summary = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary[0].startswith("# erwlab-")
        assert "seed=77" in summary[0]

    def test_byte_determinism_same_out_dir(self, tmp_path):
        out = tmp_path / "o"
        run("test", "--experiment", "fclt-critical", "--preset", "smoke",
            "--out-dir", out)
        snap = {f.name: f.read_bytes() for f in out.iterdir() if f.suffix != ".txt"}
        run("test", "--experiment", "fclt-critical", "--preset", "smoke",
            "--out-dir", out)
        for f in sorted(out.iterdir()):
            if f.suffix == ".txt":
                continue
            assert f.read_bytes() == snap[f.name], f.name

    def test_env_fallback_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ERW_OUT_DIR", str(tmp_path / "env_out"))
        monkeypatch.chdir(tmp_path)
        assert run("test", "--experiment", "coeff", "--preset", "smoke") == 0
        assert (tmp_path / "env_out" / "reports.jsonl").exists()


class TestVerifyCoeffAndReport:
    def test_verify_coeff(self, tmp_path):
        assert run("verify-coeff", "--preset", "smoke", "--out-dir", tmp_path) == 0
        assert (tmp_path / "ratio_gap_curve.csv").exists()
        assert (tmp_path / "log_clock_gap_curve.csv").exists()

    def test_report_round_trip(self, tmp_path, capsys):
        run("verify-coeff", "--preset", "smoke", "--out-dir", tmp_path)
        capsys.readouterr()
        assert run("report", "--out-dir", tmp_path) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out

    def test_report_missing_dir(self, tmp_path):
        assert run("report", "--out-dir", tmp_path / "nope") == 2


class TestParser:
    def test_unknown_experiment(self):
        assert run("test", "--experiment", "nope") == 2

    def test_threads_flag(self, tmp_path):
        assert run("test", "--experiment", "coeff", "--preset", "smoke",
                   "--threads", 1, "--out-dir", tmp_path) == 0
