"""
Statistics of the secondary-user MIMO-OSTBC RF hop.

Each SU-TX -> relay and SU-TX -> PU-RX MIMO channel has i.i.d. Nakagami-m
entries, so its squared Frobenius norm is Gamma distributed with shape
``m * N_S * N`` and scale ``var / m``. The selected SU-TX maximises

    min(P_M * G_SR, P_A * G_SR / G_SP)

i.e. its SNR at the relay after the underlay power policy.

All powers are linear (watts). dB conversion lives in :mod:`rfso.cli`.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import CapabilityError, ConfigError, DomainError
from .specfun import log_upper_inc_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma

__all__ = [
    "RfLinkParams",
    "SuTxProfile",
    "OstbcParams",
    "gain_cdf",
    "gain_pdf",
    "transmit_power",
    "selection_metric",
    "zeta_cdf",
    "beta_star_cdf",
    "snr_star_cdf",
    "snr_star_cdf_pa_infinity",
    "snr_scale",
]


@dataclass(frozen=True)
class RfLinkParams:
    """
    Nakagami-m MIMO link.

    Parameters
    ----------
    m : float
        Nakagami severity, at least 0.5.
    var : float
        Per-entry channel variance (average power gain).
    tx_antennas : int
        Transmit antennas N_S.
    rx_antennas : int
        Receive antennas (N_R towards the relay, N_P towards the PU-RX).
    """

    m: float
    var: float
    tx_antennas: int
    rx_antennas: int

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise ConfigError("m", f"Nakagami severity must be >= 0.5, got {self.m}")
        if not (math.isfinite(self.var) and self.var > 0):
            raise ConfigError("var", f"channel variance must be positive, got {self.var}")
        for name in ("tx_antennas", "rx_antennas"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(name, f"must be a positive integer, got {v}")

    @property
    def shape(self):
        """Gamma shape of the Frobenius-norm gain, ``m * N_S * N``."""
        return self.m * self.tx_antennas * self.rx_antennas

    @property
    def scale(self):
        """Gamma scale of the Frobenius-norm gain, ``var / m``."""
        return self.var / self.m

    @property
    def rate(self):
        return self.m / self.var


@dataclass(frozen=True)
class SuTxProfile:
    """One secondary transmitter: its link to the relay, its cross link to
    the primary receiver and its maximum power in watts."""

    sr: RfLinkParams
    sp: RfLinkParams
    max_power: float

    def __post_init__(self):
        if self.sr.tx_antennas != self.sp.tx_antennas:
            raise ConfigError("tx_antennas", "S->R and S->PU links must share N_S")
        if not (math.isfinite(self.max_power) and self.max_power > 0):
            raise ConfigError("max_power", f"must be positive, got {self.max_power}")

    @property
    def tx_antennas(self):
        return self.sr.tx_antennas


@dataclass(frozen=True)
class OstbcParams:
    """OSTBC rate ``R_c = B / T``, block symbols ``B`` and noise-plus-PU
    interference power at the relay."""

    rate: float
    block_symbols: int = 1
    noise_power: float = 1.0

    def __post_init__(self):
        if not (0 < self.rate <= 1):
            raise ConfigError("rate", f"OSTBC rate must lie in (0, 1], got {self.rate}")
        if int(self.block_symbols) != self.block_symbols or self.block_symbols < 1:
            raise ConfigError("block_symbols", "must be a positive integer")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ConfigError("noise_power", "must be positive")


def _as_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("CDF argument must be non-negative")
    return x


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def gain_cdf(x, link):
    """CDF of the squared Frobenius norm ``||H||_F^2`` of ``link``."""
    x = _as_x(x)
    return _out(reg_lower_inc_gamma(link.shape, x * link.rate))


def gain_pdf(x, link):
    """Gamma density of ``||H||_F^2``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("gain_pdf requires x > 0")
    k, r = link.shape, link.rate
    logp = k * math.log(r) - special.gammaln(k) + (k - 1) * np.log(x) - r * x
    return _out(np.exp(logp))


def transmit_power(gain_sp, p_max, p_a):
    """
    Underlay power policy ``min(p_max, p_a / gain_sp)``.

    A zero cross-link gain leaves the interference constraint vacuous and
    the transmitter uses ``p_max``.
    """
    if p_max <= 0 or p_a <= 0:
        raise DomainError("p_max and p_a must be positive")
    g = np.asarray(gain_sp, dtype=float)
    capped = np.divide(p_a, g, out=np.full(g.shape, np.inf), where=g > 0)
    return _out(np.minimum(p_max, capped))


def selection_metric(gain_sr, gain_sp, p_max, p_a):
    """Per-user scheduling metric ``min(P_M G_SR, P_A G_SR / G_SP)``."""
    return gain_sr * transmit_power(gain_sp, p_max, p_a)


def _is_integer(v, tol=1e-9):
    return abs(v - round(v)) <= tol and round(v) >= 1


def zeta_cdf(x, profile, p_a, allow_quadrature=False):
    """
    CDF of one user's metric ``min(P_M G_SR, P_A G_SR / G_SP)``.

    Parameters
    ----------
    x : float or array_like
        Non-negative metric value(s).
    profile : SuTxProfile
    p_a : float
        Interference threshold at the PU-RX, watts.
    allow_quadrature : bool, optional
        Permit numerical integration when the S->R gain shape is not an
        integer, where the finite-sum closed form does not exist.

    Returns
    -------
    float or ndarray

    Raises
    ------
    CapabilityError
        Non-integer S->R shape without ``allow_quadrature``.
    """
    x = _as_x(x)
    if p_a <= 0:
        raise DomainError("p_a must be positive")
    tau1 = profile.sr.shape
    if not _is_integer(tau1):
        if not allow_quadrature:
            raise CapabilityError(
                f"S->R gain shape m*N_S*N_R = {tau1} is not an integer; the closed "
                "form needs an integer shape, pass allow_quadrature=True")
        return _out(np.vectorize(lambda v: _zeta_cdf_quad(v, profile, p_a))(x))
    tau1 = int(round(tau1))
    tau2 = profile.sp.shape
    a, mu, pm = profile.sr.rate, profile.sp.rate, profile.max_power
    y0 = p_a * mu / pm

    power_limited = reg_lower_inc_gamma(tau1, x * a / pm) * reg_lower_inc_gamma(tau2, y0)
    u = x * a / (p_a * mu)
    x_flat = np.atleast_1d(u)
    integral = np.empty_like(x_flat)
    small = x_flat <= 1.0
    if np.any(small):
        integral[small] = _interference_tail(x_flat[small], tau1, tau2, y0)
    if np.any(~small):
        integral[~small] = _interference_closed(x_flat[~small], tau1, tau2, y0)
    integral = integral.reshape(np.shape(u))
    return _out(np.clip(power_limited + integral, 0.0, 1.0))


def _log_terms(u, ls, tau2, y0):
    """log of the l-th summand of the solved interference-limited integral."""
    u = u[:, None]
    ls = ls[None, :]
    with np.errstate(divide="ignore"):
        logu = np.log(u)
    lu = np.where(ls == 0, 0.0, ls * logu)
    return (
        lu
        - special.gammaln(ls + 1)
        - (tau2 + ls) * np.log1p(u)
        + log_upper_inc_gamma(tau2 + ls, y0 * (1.0 + u))
        - special.gammaln(tau2)
    )


def _interference_closed(u, tau1, tau2, y0):
    # Q(tau2, y0) minus the finite sum over l < tau1
    ls = np.arange(tau1, dtype=float)
    terms = np.exp(_log_terms(u, ls, tau2, y0))
    return reg_upper_inc_gamma(tau2, y0) - terms.sum(axis=1)


def _interference_tail(u, tau1, tau2, y0):
    # Same integral written with the complementary (l >= tau1) Poisson tail.
    # Term-wise positive, so no cancellation when the CDF is tiny; the terms
    # are dominated by a negative-binomial pmf with ratio u/(1+u) <= 1/2.
    n_terms = int(200 + 4 * tau2)
    ls = np.arange(tau1, tau1 + n_terms, dtype=float)
    return np.exp(_log_terms(u, ls, tau2, y0)).sum(axis=1)


def _zeta_cdf_quad(x, profile, p_a):
    sr, sp, pm = profile.sr, profile.sp, profile.max_power
    z0 = p_a / pm
    first = gain_cdf(x / pm, sr) * gain_cdf(z0, sp)
    if x == 0:
        return 0.0

    def integrand(z):
        return gain_cdf(x * z / p_a, sr) * gain_pdf(z, sp)

    tail, _ = integrate.quad(integrand, z0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return min(1.0, max(0.0, first + tail))


def _common_tx_antennas(profiles):
    if not profiles:
        raise DomainError("at least one SU-TX profile is required")
    ns = {p.tx_antennas for p in profiles}
    if len(ns) != 1:
        raise ConfigError("tx_antennas", "all SU-TXs must use the same N_S")
    return ns.pop()


def beta_star_cdf(x, profiles, p_a, allow_quadrature=False):
    """CDF of the selected metric ``max_k min(...)``, a product over users."""
    _common_tx_antennas(profiles)
    out = 1.0
    for prof in profiles:
        out = out * zeta_cdf(x, prof, p_a, allow_quadrature)
    return _out(out)


def snr_scale(profiles, ostbc):
    """``R_c * N_S * eta_0``: divides the metric to give the relay SNR."""
    return ostbc.rate * _common_tx_antennas(profiles) * ostbc.noise_power


def snr_star_cdf(gamma, profiles, p_a, ostbc, allow_quadrature=False):
    """CDF of the per-symbol relay SNR after opportunistic selection."""
    gamma = _as_x(gamma)
    return beta_star_cdf(snr_scale(profiles, ostbc) * gamma, profiles, p_a, allow_quadrature)


def snr_star_cdf_pa_infinity(gamma, profiles, ostbc):
    """Relay SNR CDF without an interference constraint (every user at P_M)."""
    gamma = _as_x(gamma)
    scale = snr_scale(profiles, ostbc)
    out = 1.0
    for prof in profiles:
        out = out * gain_cdf(scale * gamma / prof.max_power, prof.sr)
    return _out(out)
