"""
End-to-end outage of the decode-and-forward RF/FSO link and its floors.

The per-symbol SNRs are identically distributed across the B symbols of an
OSTBC block, so the block average of the per-symbol outage equals a single
per-symbol evaluation. RF and FSO hops are independent.
"""

import math
from dataclasses import dataclass, replace

from .errors import ConfigError
from .fso import FsoLinkParams, snr_cdf
from .rflink import (
    OstbcParams,
    SuTxProfile,
    snr_scale,
    snr_star_cdf,
    snr_star_cdf_pa_infinity,
)

__all__ = [
    "ScenarioConfig",
    "combine_hops",
    "rf_outage",
    "fso_outage",
    "end_to_end_outage",
    "floor_rd_infinity",
    "floor_pa_infinity",
]


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Full experiment description.

    Parameters
    ----------
    profiles : tuple of SuTxProfile
        The K candidate secondary transmitters.
    p_a : float
        Interference threshold at the PU-RX, watts.
    ostbc : OstbcParams
    fso : FsoLinkParams
    gamma_th : float
        Linear SNR outage threshold.
    allow_quadrature : bool
        Allow the numerical RF CDF for non-integer S->R gain shapes.
    """

    profiles: tuple
    p_a: float
    ostbc: OstbcParams
    fso: FsoLinkParams
    gamma_th: float
    allow_quadrature: bool = False

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if not self.profiles:
            raise ConfigError("users", "at least one SU-TX is required")
        if not all(isinstance(p, SuTxProfile) for p in self.profiles):
            raise ConfigError("users", "profiles must be SuTxProfile records")
        snr_scale(self.profiles, self.ostbc)  # checks a common N_S
        if not (math.isfinite(self.p_a) and self.p_a > 0):
            raise ConfigError("p_a", f"must be positive, got {self.p_a}")
        if not (math.isfinite(self.gamma_th) and self.gamma_th > 0):
            raise ConfigError("gamma_th", f"must be positive, got {self.gamma_th}")
        if not isinstance(self.fso, FsoLinkParams):
            raise ConfigError("fso", "expected FsoLinkParams")
        if not self.allow_quadrature:
            for k, prof in enumerate(self.profiles, start=1):
                tau1 = prof.sr.shape
                if abs(tau1 - round(tau1)) > 1e-9:
                    raise ConfigError(
                        f"users.{k}.m_sr",
                        f"m_sr * N_S * N_R = {tau1} is not an integer; enable "
                        "quadrature_fallback to use the numerical RF CDF")

    @property
    def num_users(self):
        return len(self.profiles)

    def replace(self, **changes):
        """Copy with fields replaced; ``avg_snr``/``detection`` update the FSO hop."""
        fso_changes = {k: changes.pop(k) for k in ("avg_snr", "detection") if k in changes}
        if fso_changes:
            changes["fso"] = replace(changes.get("fso", self.fso), **fso_changes)
        return replace(self, **changes)


def combine_hops(f_rf, f_fso):
    """Outage of the min of two independent SNRs: ``1 - (1 - F_RF)(1 - F_FSO)``."""
    return 1.0 - (1.0 - f_rf) * (1.0 - f_fso)


def rf_outage(s):
    """``Pr(gamma*_SR <= gamma_th)``."""
    return snr_star_cdf(s.gamma_th, s.profiles, s.p_a, s.ostbc, s.allow_quadrature)


def fso_outage(s):
    """``Pr(gamma_RD <= gamma_th)``."""
    return snr_cdf(s.gamma_th, s.fso)


def end_to_end_outage(s):
    """Exact end-to-end outage probability of scenario ``s``."""
    return combine_hops(rf_outage(s), fso_outage(s))


def floor_rd_infinity(s):
    """Outage floor as the FSO average SNR grows without bound (RF hop only)."""
    return rf_outage(s)


def floor_pa_infinity(s):
    """Outage floor as the interference threshold grows without bound."""
    f_rf = snr_star_cdf_pa_infinity(s.gamma_th, s.profiles, s.ostbc)
    return combine_hops(f_rf, fso_outage(s))
