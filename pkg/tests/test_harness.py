import json

import pytest

from polystab import cli, harness
from polystab.errors import ConfigError


class TestConfig:
    def test_missing_seed_pointer(self):
        with pytest.raises(ConfigError) as err:
            harness.load_config({"kind": "rates"})
        assert err.value.pointer == "/seed"

    def test_bad_kind(self):
        with pytest.raises(ConfigError):
            harness.load_config({"kind": "nope", "seed": 0})

    def test_ladder_needs_dims(self):
        with pytest.raises(ConfigError) as err:
            harness.load_config(
                {"kind": "decay", "seed": 0, "model": {"family": "borichev_tomilov"}}
            )
        assert err.value.pointer == "/model/dims"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            harness.load_config({"kind": "rates", "seed": 0, "bogus": 1})

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "rates", "seed": 3, "beta": 1.0}))
        cfg = harness.load_config(path)
        assert cfg["seed"] == 3


class TestRuns:
    def test_rates_example(self, tmp_path):
        rep = harness.run(
            {"kind": "rates", "seed": 1, "beta": 1.0, "p": 2.0, "rho": 0.0},
            out_dir=tmp_path,
        )
        assert rep.passed
        assert rep.checks[0].measured["tau_main"] == 1.0
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "rate_table.json").exists()

    def test_sweep_diag_passes(self, tmp_path):
        cfg = {
            "kind": "sweep",
            "seed": 1,
            "model": {"family": "diagonal", "params": {"eigs": [[-1, 0], [-2, 0]]}},
        }
        rep = harness.run(cfg, out_dir=tmp_path)
        assert rep.passed
        fit = rep.checks[0]
        assert fit.measured["beta_hat"] == 0.0
        assert (tmp_path / "sweep-diagonal.csv").exists()
        assert (tmp_path / "sweep-diagonal.svg").exists()

    def test_threshold_override_fails(self, tmp_path):
        cfg = {
            "kind": "sweep",
            "seed": 1,
            "model": {"family": "diagonal", "params": {"eigs": [[-1, 0]]}},
            "thresholds": {"half_plane_max_ratio": 0.5},
        }
        rep = harness.run(cfg, out_dir=tmp_path)
        assert not rep.passed

    def test_every_record_has_anchor_or_plumbing(self, tmp_path):
        cfg = {
            "kind": "funcspace",
            "seed": 2,
            "trial_count": 4,
            "resolutions": [512, 1024],
        }
        rep = harness.run(cfg, out_dir=tmp_path)
        known = set(harness.ANCHORS.values()) | {"plumbing"}
        assert all(c.anchor in known for c in rep.checks)

    def test_report_json_structure(self, tmp_path):
        rep = harness.run(
            {"kind": "rates", "seed": 1, "beta": 2.0, "p": 1.5, "rho": 1.0},
            out_dir=tmp_path,
        )
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["verdict"] == "pass"
        assert doc["environment"]["package"] == "polystab"
        assert all("anchor" in c for c in doc["checks"])

    def test_sweep_determinism(self, tmp_path):
        cfg = {
            "kind": "sweep",
            "seed": 5,
            "model": {"family": "borichev_tomilov", "dim": 24},
        }
        harness.run(cfg, out_dir=tmp_path / "a")
        harness.run(cfg, out_dir=tmp_path / "b")
        assert (tmp_path / "a/report.json").read_bytes() == (
            tmp_path / "b/report.json"
        ).read_bytes()


class TestZooCatalog:
    def test_families_listed(self):
        catalog = harness.list_zoo()
        assert "borichev_tomilov" in catalog
        assert "jordan_growth" in catalog
        assert "Wrobel" in catalog
        assert "damped_wave" in catalog
        assert "damped wave" in catalog


class TestCli:
    def test_zoo_exit_zero(self, capsys):
        assert cli.main(["zoo"]) == 0
        assert "borichev_tomilov" in capsys.readouterr().out

    def test_rates_cli(self, tmp_path, capsys):
        code = cli.main(
            ["rates", "--beta", "1", "--p", "2", "--rho", "0",
             "--out", str(tmp_path)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert '"tau_main": 1.0' in out

    def test_config_error_exit_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"kind": "rates"}))
        assert cli.main(["run", str(bad)]) == 2

    def test_failing_check_exit_one(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "kind": "sweep",
                    "seed": 1,
                    "model": {"family": "diagonal", "params": {"eigs": [[-1, 0]]}},
                    "thresholds": {"half_plane_max_ratio": 0.5},
                }
            )
        )
        assert cli.main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 1

    def test_sweep_subcommand(self, tmp_path):
        code = cli.main(
            ["sweep", "--family", "borichev_tomilov", "--param", "alpha=1.0",
             "--dim", "16", "--out", str(tmp_path), "--no-plots"]
        )
        assert code == 0
