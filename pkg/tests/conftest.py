import pytest

from rfso.fso import FsoLinkParams, MalagaParams, PointingParams, special_case_params
from rfso.outage import ScenarioConfig
from rfso.rflink import OstbcParams, RfLinkParams, SuTxProfile


def dbw(x):
    return 10.0 ** (x / 10.0)


def make_profiles(m=1.5, var_sr=(1.0, 1.0, 1.0), var_sp=(1.0, 1.0, 1.0), p_max_dbw=27.0,
                  n_s=3, n_r=2, n_p=2):
    return tuple(
        SuTxProfile(RfLinkParams(m, a, n_s, n_r), RfLinkParams(m, b, n_s, n_p), dbw(p_max_dbw))
        for a, b in zip(var_sr, var_sp)
    )


def fig2a_malaga():
    return MalagaParams(2.296, 2, 0.0872, 1.085, rho=0.596)


def figure_malaga_sets():
    """Malaga parameterisations of the bundled presets."""
    return {
        "fig2a": fig2a_malaga(),
        "gamma_gamma": special_case_params("gamma_gamma", 8, 4),
        "k_distribution": special_case_params("k_distribution", 8, 4),
    }


def make_fso(malaga=None, zeta=0.8863, detection=2, avg_snr_db=30.0, a0=1.0):
    return FsoLinkParams(malaga or fig2a_malaga(), PointingParams(zeta, a0), detection,
                         dbw(avg_snr_db))


def make_scenario(k=3, p_a_dbw=15.0, detection=2, avg_snr_db=30.0, m=1.5, gamma_th_db=3.0,
                  malaga=None, zeta=0.8863):
    return ScenarioConfig(
        make_profiles(m, (1.0,) * k, (1.0,) * k),
        dbw(p_a_dbw),
        OstbcParams(0.5, 4, 1.0),
        make_fso(malaga, zeta, detection, avg_snr_db),
        dbw(gamma_th_db),
    )


@pytest.fixture
def scenario():
    return make_scenario()


@pytest.fixture
def default_profile():
    return make_profiles()[0]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
