import math

import numpy as np
import pytest

from conftest import dbw, make_scenario
from rfso.errors import ConfigError
from rfso.fso import snr_cdf
from rfso.montecarlo import RngConfig, draw, sample_relay_snr, simulate_outage
from rfso.outage import (
    ScenarioConfig,
    combine_hops,
    end_to_end_outage,
    floor_pa_infinity,
    floor_rd_infinity,
    fso_outage,
    rf_outage,
)
from rfso.rflink import RfLinkParams, SuTxProfile, snr_star_cdf


class TestCombine:
    def test_both_perfect(self):
        assert combine_hops(0.0, 0.0) == 0.0

    def test_rf_certain(self):
        assert combine_hops(1.0, 0.3) == 1.0

    def test_huge_threshold(self, scenario):
        assert end_to_end_outage(scenario.replace(gamma_th=1e12)) == pytest.approx(1.0, abs=1e-9)


class TestScenario:
    def test_rejects_bad_threshold(self, scenario):
        with pytest.raises(ConfigError):
            scenario.replace(gamma_th=0.0)

    def test_rejects_empty(self, scenario):
        with pytest.raises(ConfigError):
            scenario.replace(profiles=())

    def test_non_integer_shape_names_field(self, scenario):
        prof = SuTxProfile(RfLinkParams(1.25, 1, 3, 2), RfLinkParams(1.25, 1, 3, 2), 500.0)
        with pytest.raises(ConfigError) as err:
            scenario.replace(profiles=(scenario.profiles[0], prof))
        assert err.value.field == "users.2.m_sr"
        ok = scenario.replace(profiles=(prof,), allow_quadrature=True)
        assert 0.0 <= end_to_end_outage(ok) <= 1.0

    def test_replace_fso_fields(self, scenario):
        s = scenario.replace(avg_snr=5.0, detection=1)
        assert s.fso.avg_snr == 5.0 and s.fso.detection == 1
        assert s.fso.malaga == scenario.fso.malaga


class TestEndToEnd:
    @pytest.mark.parametrize("r", [1, 2])
    def test_against_monte_carlo(self, r):
        s = make_scenario(p_a_dbw=15.0, detection=r)
        est = simulate_outage(s, 10 ** 6, RngConfig(21, stream=(r,)))
        assert abs(end_to_end_outage(s) - est.estimate) <= 3 * est.stderr

    @pytest.mark.parametrize("p_a_dbw", [0.0, 5.0, 15.0])
    def test_union_bounds(self, p_a_dbw):
        s = make_scenario(p_a_dbw=p_a_dbw)
        f_rf, f_fso, out = rf_outage(s), fso_outage(s), end_to_end_outage(s)
        assert max(f_rf, f_fso) <= out <= f_rf + f_fso
        assert 0.0 <= out <= 1.0

    def test_nonincreasing_in_pa(self):
        vals = [end_to_end_outage(make_scenario(p_a_dbw=p)) for p in np.arange(-10, 31, 2.5)]
        assert np.all(np.diff(vals) <= 1e-12)

    def test_nonincreasing_in_avg_snr(self):
        vals = [end_to_end_outage(make_scenario(p_a_dbw=5.0, avg_snr_db=g))
                for g in np.arange(0, 51, 5)]
        assert np.all(np.diff(vals) <= 1e-12)

    def test_nondecreasing_in_threshold(self):
        vals = [end_to_end_outage(make_scenario(p_a_dbw=5.0, gamma_th_db=g))
                for g in np.arange(-5, 21, 2.5)]
        assert np.all(np.diff(vals) >= -1e-12)

    def test_more_users_help(self):
        for p in (0.0, 5.0, 10.0, 20.0):
            assert end_to_end_outage(make_scenario(3, p)) <= end_to_end_outage(make_scenario(1, p))


class TestFloors:
    def test_rd_floor_definition(self, scenario):
        assert floor_rd_infinity(scenario) == snr_star_cdf(
            scenario.gamma_th, scenario.profiles, scenario.p_a, scenario.ostbc)

    # only meaningful where the RF hop dominates: at 80 dB the IM/DD hop still
    # contributes ~1.5e-3 of outage, which swamps floors far below that
    @pytest.mark.parametrize("r", [1, 2])
    @pytest.mark.parametrize("p_a_dbw", [-10.0, 0.0])
    def test_rd_floor_limit(self, p_a_dbw, r):
        s = make_scenario(p_a_dbw=p_a_dbw, detection=r, avg_snr_db=80.0)
        floor = floor_rd_infinity(s)
        out = end_to_end_outage(s)
        assert floor <= out and (out - floor) / floor < 1e-4

    def test_rd_floor_approached_heterodyne(self):
        s = make_scenario(p_a_dbw=5.0, detection=1, avg_snr_db=80.0)
        assert end_to_end_outage(s) == pytest.approx(floor_rd_infinity(s), rel=1e-4)

    def test_rd_floor_independent_of_detection(self):
        s = make_scenario(p_a_dbw=5.0)
        assert floor_rd_infinity(s.replace(detection=1)) == floor_rd_infinity(s)

    def test_rd_floor_against_monte_carlo(self):
        s = make_scenario(p_a_dbw=20.0, gamma_th_db=25.0)
        relay = draw(lambda g, n: sample_relay_snr(s.profiles, s.p_a, s.ostbc, g, n)[0],
                     10 ** 6, RngConfig(31))
        p = np.mean(relay <= s.gamma_th)
        se = math.sqrt(p * (1 - p) / relay.size)
        assert abs(floor_rd_infinity(s) - p) <= 3 * se

    @pytest.mark.parametrize("r", [1, 2])
    def test_pa_floor_limit(self, r):
        s = make_scenario(p_a_dbw=60.0, detection=r, avg_snr_db=30.0)
        assert end_to_end_outage(s) == pytest.approx(floor_pa_infinity(s), rel=1e-4)

    def test_pa_floor_falls_with_avg_snr(self):
        lo = floor_pa_infinity(make_scenario(avg_snr_db=30.0))
        hi = floor_pa_infinity(make_scenario(avg_snr_db=40.0))
        assert hi < lo

    def test_pa_floor_fso_dominated(self):
        s3, s1 = make_scenario(3, 60.0), make_scenario(1, 60.0)
        bound = abs(fso_outage(s3) - fso_outage(s1)) + rf_outage(s1) + rf_outage(s3)
        assert abs(floor_pa_infinity(s3) - floor_pa_infinity(s1)) <= bound
        assert floor_pa_infinity(s3) == pytest.approx(snr_cdf(s3.gamma_th, s3.fso), rel=1e-6)
