import json
import math

import numpy as np
import pytest

from conftest import dbw
from rfso import cli
from rfso.errors import ConfigError
from rfso.outage import end_to_end_outage


def preset(name="fig2a"):
    return cli.preset_text(name)


def edited(text, section, key, value):
    """Replace ``key = ...`` inside ``[section]`` of an INI text."""
    out, current, done = [], None, False
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("["):
            current = s[1:-1]
        elif current == section and s.split("=")[0].strip() == key:
            line = f"{key} = {value}" if value is not None else ""
            done = True
        out.append(line)
    assert done, (section, key)
    return "\n".join(out) + "\n"


@pytest.fixture
def cfg_file(tmp_path):
    def make(text, name="run.cfg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


class TestParse:
    def test_fig2a_defaults(self):
        cfg = cli.parse_config_text(preset())
        s = cfg.scenario
        assert s.num_users == 3
        assert s.gamma_th == pytest.approx(dbw(3))
        assert s.p_a == pytest.approx(dbw(20))
        assert s.ostbc.rate == 0.5 and s.ostbc.noise_power == 1.0
        for p in s.profiles:
            assert p.max_power == pytest.approx(dbw(27))
            assert (p.sr.m, p.sp.m, p.sr.var, p.sp.var) == (1.5, 1.5, 1.0, 1.0)
            assert (p.sr.tx_antennas, p.sr.rx_antennas, p.sp.rx_antennas) == (3, 2, 2)
        assert s.fso.detection == 2 and s.fso.avg_snr == pytest.approx(1000.0)
        assert s.fso.malaga.alpha == 2.296 and s.fso.pointing.zeta == 0.8863
        assert cfg.sweep.grid() == [0, 5, 10, 15, 20, 25, 30]

    def test_fig2b_gamma_gamma(self):
        m = cli.parse_config_text(preset("fig2b")).scenario.fso.malaga
        assert (m.alpha, m.beta, m.omega_prime, m.rho) == (8, 4, 1.0, 1.0)
        assert m.guarded == ("xi",)

    def test_fig2c(self):
        s = cli.parse_config_text(preset("fig2c")).scenario
        assert all(p.sr.m == 2.5 and p.sp.m == 2.5 for p in s.profiles)
        assert s.p_a == pytest.approx(100.0)

    def test_from_path(self, cfg_file):
        assert cli.parse_config(cfg_file(preset())).scenario == cli.parse_config_text(
            preset()).scenario

    def test_rho_out_of_range(self):
        with pytest.raises(ConfigError) as err:
            cli.parse_config_text(edited(preset(), "fso.malaga", "rho", "1.5"))
        assert "rho" in str(err.value)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            cli.parse_config_text(preset() + "\n[ostbc.extra]\nfoo = 1\n")
        assert "ostbc.extra" in str(err.value)
        with pytest.raises(ConfigError):
            cli.parse_config_text(preset().replace("noise_power = 1", "noise_power = 1\nfoo = 2"))

    def test_missing_key(self):
        with pytest.raises(ConfigError) as err:
            cli.parse_config_text(edited(preset(), "fso.pointing", "zeta", None))
        assert "zeta" in str(err.value)

    def test_non_integer_shape(self):
        text = edited(preset(), "users.2", "m_sr", "1.25")
        with pytest.raises(ConfigError) as err:
            cli.parse_config_text(text)
        assert err.value.field == "users.2.m_sr"
        text = edited(text, "scenario", "p_a_dBW", "20\nquadrature_fallback = yes")
        assert cli.parse_config_text(text).scenario.allow_quadrature

    def test_bad_sweep(self):
        with pytest.raises(ConfigError):
            cli.parse_config_text(edited(preset(), "sweep", "step", "0"))


class TestHash:
    def test_stable_under_formatting(self):
        a = cli.parse_config_text(preset()).resolved
        noisy = "# extra comment\n" + preset().replace("alpha = 2.296", "alpha   =   2.2960")
        assert cli.config_hash(a) == cli.config_hash(cli.parse_config_text(noisy).resolved)

    @pytest.mark.parametrize("section,key,value", [
        ("fso.malaga", "alpha", "2.3"), ("scenario", "gamma_th_dB", "4"),
        ("users.3", "var_sp", "2"), ("fso", "detection", "heterodyne")])
    def test_changes_with_content(self, section, key, value):
        a = cli.config_hash(cli.parse_config_text(preset()).resolved)
        b = cli.config_hash(cli.parse_config_text(edited(preset(), section, key, value)).resolved)
        assert a != b

    def test_ignores_seed_and_output(self):
        a = cli.config_hash(cli.parse_config_text(preset()).resolved)
        b = cli.config_hash(cli.parse_config_text(edited(preset(), "mc", "seed", "7")).resolved)
        assert a == b


class TestSweep:
    def test_analytic_only(self):
        cfg = cli.parse_config_text(preset())
        recs = cli.run_outage_sweep(cfg.scenario, cfg.sweep)
        assert [r.swept_value_dB for r in recs] == cfg.sweep.grid()
        for r in recs:
            assert r.mc_outage is None and r.mc_stderr is None and r.error is None
            assert 0 <= r.floor_rd_inf <= r.analytic_outage <= 1
        rows = list(cli.read_records(cli.records_to_csv(recs), "csv"))
        assert rows[0]["mc_outage"] is None
        header = cli.records_to_csv(recs).splitlines()[0].split(",")
        assert header[:6] == ["swept_value_dB", "analytic_outage", "mc_outage", "mc_stderr",
                              "floor_rd_inf", "floor_pa_inf"]

    def test_analytic_values(self):
        cfg = cli.parse_config_text(preset())
        recs = cli.run_outage_sweep(cfg.scenario, cfg.sweep)
        s = cfg.scenario.replace(p_a=dbw(10))
        assert recs[2].analytic_outage == end_to_end_outage(s)

    def test_csv_json_identical(self):
        cfg = cli.parse_config_text(preset())
        sweep = cli.SweepSpec("p_a_dBW", 0, 10, 5, trials=20_000)
        recs = cli.run_outage_sweep(cfg.scenario, sweep, seed=4)
        a = cli.read_records(cli.records_to_csv(recs), "csv")
        b = cli.read_records(cli.records_to_json(recs, "h", 4), "json")
        assert a == b

    def test_worker_pool_ordering(self):
        cfg = cli.parse_config_text(preset())
        sweep = cli.SweepSpec("p_a_dBW", 0, 15, 5, trials=20_000)
        one = cli.run_outage_sweep(cfg.scenario, sweep, 3, workers=1)
        many = cli.run_outage_sweep(cfg.scenario, sweep, 3, workers=4)
        assert [r.row() for r in one] == [r.row() for r in many]

    def test_avg_snr_floor_ordering(self):
        cfg = cli.parse_config_text(preset())
        r30 = cli.run_outage_sweep(cfg.scenario, cfg.sweep)
        r40 = cli.run_outage_sweep(cfg.scenario.replace(avg_snr=dbw(40)), cfg.sweep)
        assert all(b.floor_pa_inf < a.floor_pa_inf for a, b in zip(r30, r40))

    def test_heterodyne_not_worse(self):
        cfg = cli.parse_config_text(preset())
        imdd = cli.run_outage_sweep(cfg.scenario, cfg.sweep)
        het = cli.run_outage_sweep(cfg.scenario.replace(detection=1), cfg.sweep)
        assert all(h.analytic_outage <= i.analytic_outage for h, i in zip(het, imdd))

    @pytest.mark.parametrize("variable", ["avg_snr_dB", "gamma_th_dB"])
    def test_other_variables(self, variable):
        cfg = cli.parse_config_text(preset())
        recs = cli.run_outage_sweep(cfg.scenario, cli.SweepSpec(variable, 0, 20, 10))
        vals = [r.analytic_outage for r in recs]
        assert (np.diff(vals) <= 0).all() if variable == "avg_snr_dB" else (np.diff(vals) >= 0).all()


class TestSelect:
    def test_builtin_variants(self):
        cfg = cli.parse_config_text(preset("fig2c"))
        table = dict(cli.run_selection_study(cfg.scenario, trials=100_000, seed=2019))
        assert list(table) == ["all_equal", "sr2_doubled", "sp2_doubled", "sr2_sp2_doubled"]
        np.testing.assert_allclose(table["all_equal"].frequencies, 1 / 3, atol=0.01)
        f = table["sr2_doubled"].frequencies
        assert f[1] == pytest.approx(0.84, abs=0.02)
        assert f[0] == pytest.approx(0.08, abs=0.01) and f[2] == pytest.approx(0.08, abs=0.01)
        assert table["sp2_doubled"].frequencies[1] == pytest.approx(0.03, abs=0.01)
        np.testing.assert_allclose(table["sr2_sp2_doubled"].frequencies, 1 / 3, atol=0.03)

    def test_user_variant(self):
        text = preset("fig2c") + "\n[variants.strong3]\nvar_sr = 1, 1, 4\n"
        cfg = cli.parse_config_text(text)
        table = dict(cli.run_selection_study(cfg.scenario, cfg.variants, 20_000, 1))
        assert table["strong3"].frequencies[2] > 0.9


class TestValidate:
    def test_passes(self):
        cfg = cli.parse_config_text(preset())
        rep = cli.run_validate(cfg.scenario, 200_000, seed=1)
        assert rep.passed, rep.text()
        assert {c.name for c in rep.checks} >= {"gain_cdf", "zeta_cdf", "beta_star_cdf",
                                               "malaga_cdf", "fso_snr_cdf", "end_to_end_outage"}

    def test_negative_control(self):
        cfg = cli.parse_config_text(preset())
        rep = cli.run_validate(cfg.scenario, 50_000, seed=1, corrupt=True)
        assert not rep.passed
        assert "FAIL" in rep.text()

    def test_minimum_trials(self):
        cfg = cli.parse_config_text(preset())
        with pytest.raises(ConfigError):
            cli.run_validate(cfg.scenario, 9_999)

    def test_threshold(self):
        assert cli.ks_threshold(10 ** 6) == pytest.approx(0.005, abs=1e-4)
        assert cli.ks_threshold(10 ** 4) == pytest.approx(0.0195)


class TestMain:
    def test_sweep_writes_output_and_sidecar(self, tmp_path):
        out = tmp_path / "a.csv"
        assert cli.main(["sweep", "--preset", "fig2a", "--output", str(out)]) == 0
        rows = cli.read_records(out.read_text(), "csv")
        assert len(rows) == 7
        side = json.loads((tmp_path / "a.csv.run.json").read_text())
        assert side["seed"] == 2019 and side["config"]["fso.malaga"]["alpha"] == 2.296
        assert len(side["config_hash"]) == 16

    def test_json_and_detection(self, tmp_path):
        out = tmp_path / "a.json"
        assert cli.main(["sweep", "--preset", "fig2a", "--format", "json", "--detection",
                         "heterodyne", "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert set(doc) == {"config_hash", "seed", "records"}
        s = cli.parse_config_text(preset()).scenario.replace(detection=1, p_a=1.0)
        assert doc["records"][0]["analytic_outage"] == end_to_end_outage(s)

    def test_stdout(self, capsys):
        assert cli.main(["sweep", "--preset", "fig2a"]) == 0
        assert capsys.readouterr().out.startswith("swept_value_dB,")

    def test_config_error_exit(self, cfg_file, capsys):
        path = cfg_file(edited(preset(), "fso.malaga", "rho", "1.5"))
        assert cli.main(["sweep", "--config", path]) == cli.EXIT_CONFIG
        assert "rho" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.main(["sweep", "--config", str(tmp_path / "none.cfg")]) == cli.EXIT_CONFIG

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep"])
        assert exc.value.code == 2

    def test_select(self, tmp_path):
        out = tmp_path / "sel.json"
        assert cli.main(["select", "--preset", "fig2c", "--trials", "20000", "--format",
                         "json", "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert [v["name"] for v in doc["variants"]][:2] == ["all_equal", "sr2_doubled"]
        assert all(sum(v["counts"]) == 20000 for v in doc["variants"])

    def test_validate_byte_identical(self, tmp_path):
        outs = []
        for i, w in enumerate((1, 4)):
            out = tmp_path / f"v{i}.txt"
            code = cli.main(["validate", "--preset", "fig2a", "--trials", "100000", "--seed", "5",
                             "--workers", str(w), "--output", str(out)])
            assert code == cli.EXIT_OK
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_validate_negative_control(self, tmp_path):
        out = tmp_path / "neg.txt"
        code = cli.main(["validate", "--preset", "fig2a", "--trials", "50000",
                         "--negative-control", "--output", str(out)])
        assert code == cli.EXIT_VALIDATION
        assert out.read_text().rstrip().endswith("RESULT FAIL")

    def test_numerical_error_exit(self, cfg_file, monkeypatch):
        from rfso.errors import NumericalError

        def boom(*a, **k):
            raise NumericalError("overflow")
        monkeypatch.setattr(cli, "floor_pa_infinity", boom)
        assert cli.main(["sweep", "--preset", "fig2a"]) == cli.EXIT_NUMERICAL
