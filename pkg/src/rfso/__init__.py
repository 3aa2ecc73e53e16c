"""
Outage analysis of opportunistically scheduled underlay cognitive
MIMO-OSTBC RF / Malaga-turbulence FSO decode-and-forward links.

Submodules
----------
specfun     incomplete gamma, erf, Bessel K and a Mellin-Barnes Meijer-G
rflink      Nakagami-m MIMO gains, underlay power policy, selection CDFs
fso         Malaga turbulence, pointing errors, FSO SNR CDF
outage      end-to-end outage and asymptotic floors
montecarlo  seeded block-parallel Monte Carlo oracle
cli         ``rfso`` command line (sweep, select, validate)
"""

from .errors import CapabilityError, ConfigError, DomainError, NumericalError, RfsoError
from .fso import (
    FsoLinkParams,
    MalagaParams,
    PointingParams,
    average_snr_scale,
    channel_pdf,
    derive_malaga_constants,
    snr_cdf,
    special_case_params,
    turbulence_pdf,
)
from .outage import ScenarioConfig, end_to_end_outage, floor_pa_infinity, floor_rd_infinity
from .rflink import OstbcParams, RfLinkParams, SuTxProfile, beta_star_cdf, snr_star_cdf, zeta_cdf

__version__ = "0.1.0"
