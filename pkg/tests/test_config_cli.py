import pytest

from hybridccz.cli import main
from hybridccz.config import (GHZ_TO_RAD, MHZ_TO_RAD, ConfigError, RunConfig,
                              check_against_table1)


class TestConfigDefaults:
    def test_defaults_reproduce_published_parameters(self):
        cfg = RunConfig()
        model = cfg.device_model()
        assert model.det.delta1 / GHZ_TO_RAD == pytest.approx(0.7, rel=1e-12)
        assert model.couplings.g2 / MHZ_TO_RAD == pytest.approx(85.1, rel=1e-3)
        assert model.couplings.g1_tprime / MHZ_TO_RAD == pytest.approx(67.7, rel=1e-3)
        assert model.rates.kappa1 == pytest.approx(1e5)
        assert model.rates.gamma_gg_prime == pytest.approx(1.0 / 80e-6)
        assert model.rates.gamma_eg_prime == pytest.approx(1.0 / 20e-6)
        assert model.rates.gamma_g_phi == pytest.approx(1.0 / 5e-6)
        assert cfg.alpha == 0.5
        assert cfg.k == 5

    def test_table_check_passes_on_defaults(self):
        report = check_against_table1(RunConfig().device_model())
        assert all(ok for (_, _, _, _, ok) in report)

    def test_experiment_model_drops_unwanted_by_default(self):
        cfg = RunConfig()
        model = cfg.experiment_model(kappa_inv_us=10.0, g12_ratio=0.1)
        assert model.couplings.g1_prime == 0.0
        assert model.couplings.g12 == pytest.approx(0.1 * model.couplings.g1)
        full = cfg.experiment_model(include_unwanted=True)
        assert full.couplings.g1_prime > 0.0


class TestConfigParsing:
    def test_round_trip_is_exact(self):
        cfg = RunConfig()
        cfg.alpha = 0.7300000000000001
        cfg.g2_mhz = 85.1
        text = cfg.dumps()
        again = RunConfig.loads(text)
        assert again == cfg
        assert again.dumps() == text

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            RunConfig.loads("alpha = 0.5\nk = 5\nnonsense = 1\n")

    def test_bad_value_reports_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            RunConfig.loads("alpha = 0.5\nk = five\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            RunConfig.loads("alpha = 0.5\nalpha = 0.6\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            RunConfig.loads("alpha 0.5\n")

    def test_comments_and_blanks_ignored(self):
        cfg = RunConfig.loads("# comment\n\nalpha = 0.75  # trailing\n")
        assert cfg.alpha == 0.75

    def test_inf_lifetime_disables_channel(self):
        cfg = RunConfig.loads("kappa_inv_us = inf\n")
        assert cfg.rates().kappa1 == 0.0

    def test_auto_only_where_allowed(self):
        with pytest.raises(ConfigError, match="line 1"):
            RunConfig.loads("alpha = auto\n")

    def test_regime_violation_surfaces_as_config_error(self):
        with pytest.raises(ConfigError, match="delta2"):
            RunConfig.loads("omega_c2_ghz = 12.0\n").device_model()


class TestCli:
    def test_params_ok(self, capsys):
        assert main(["params"]) == 0
        out = capsys.readouterr().out
        assert "t_gate" in out and "Q1" in out

    def test_params_check_table(self, capsys):
        assert main(["params", "--check-table1"]) == 0
        assert "within 0.5%" in capsys.readouterr().out

    def test_config_error_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("omega_c2_ghz = 12.0\n")  # delta2 = 0
        code = main(["--config", str(bad), "params"])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("error: config:")
        assert err.count("\n") == 1

    def test_missing_config_file_exits_2(self, capsys):
        assert main(["--config", "/nonexistent.cfg", "params"]) == 2

    def test_truth_table_identity_at_zero_time(self, capsys, tmp_path):
        csv = tmp_path / "tt.csv"
        code = main(["truth-table", "--encoding", "fock", "--engine", "ideal",
                     "--gate-time-us", "0", "--csv", str(csv)])
        assert code == 0
        body = csv.read_text().splitlines()
        assert body[0] == "basis,target_phase,overlap,phase_error_deg,leakage"
        assert len(body) == 9
        for line in body[1:]:
            fields = line.split(",")
            assert float(fields[2]) == pytest.approx(1.0, abs=1e-12)

    def test_truth_table_ideal_cat(self, capsys):
        code = main(["truth-table", "--encoding", "cat", "--engine", "ideal"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("+1") >= 7 and "-1" in out

    def test_ghz_ideal_engine(self, capsys):
        code = main(["ghz", "--kappa-inv", "inf", "--g12-ratio", "0",
                     "--engine", "ideal"])
        assert code == 0
        out = capsys.readouterr().out
        line = [l for l in out.splitlines() if l.startswith("fidelity")][0]
        assert float(line.split("=")[1]) == pytest.approx(1.0, abs=1e-9)

    def test_validate_effective_cli(self, capsys):
        code = main(["validate-effective", "--scale", "0.25"])
        assert code == 0
        out = capsys.readouterr().out
        assert "infidelity" in out

    def test_sweep_requires_valid_ratio(self, capsys, tmp_path):
        code = main(["sweep", "--kappa-inv", "10", "--g12-ratio", "2.0",
                     "--out", str(tmp_path / "s.csv")])
        assert code == 2

    def test_seed_override(self):
        cfg = RunConfig()
        assert cfg.seed == 12345
