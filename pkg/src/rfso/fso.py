"""
Malaga (M) turbulence with zero-boresight pointing errors.

The Malaga irradiance density is a finite mixture of ``beta`` Gamma-Gamma
densities: component ``k`` is the product of a Gamma(alpha) and a Gamma(k)
variate. The mixture weights are ``w_k = chi * b_k * Gamma(alpha) Gamma(k) / 2``
and form a Binomial(beta - 1, Omega' / (xi beta + Omega')) pmf on ``k - 1``.
The same weights drive both the closed forms below and the Monte Carlo
sampler in :mod:`rfso.montecarlo`.

``xi`` is the average power of the scattered component not coupled to the
line of sight, ``2 b0 (1 - rho)``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from .errors import ConfigError, DomainError, NumericalError
from .specfun import MeijerGSpec, erf, meijer_g

__all__ = [
    "DEGENERATE_EPS",
    "MalagaParams",
    "PointingParams",
    "FsoLinkParams",
    "derive_malaga_constants",
    "special_case_params",
    "turbulence_pdf",
    "turbulence_cdf",
    "pointing_pdf",
    "pointing_cdf",
    "channel_pdf",
    "channel_cdf",
    "channel_mean",
    "snr_cdf",
    "average_snr_scale",
]

# substitute for exact zeros of xi or Omega' (both enter as powers and ratios)
DEGENERATE_EPS = 1e-9

HETERODYNE = 1
IMDD = 2


@dataclass(frozen=True)
class MalagaParams:
    """
    Malaga turbulence parameters.

    ``xi`` and ``omega_prime`` are the quantities entering the density; the
    physical inputs (``b0``, ``omega``, ``phase_diff``) are kept only when the
    record was built by :func:`derive_malaga_constants`. Exact zeros of
    ``xi`` or ``omega_prime`` are replaced by :data:`DEGENERATE_EPS` and
    flagged in ``guarded``.
    """

    alpha: float
    beta: int
    xi: float
    omega_prime: float
    rho: float = None
    b0: float = None
    omega: float = None
    phase_diff: float = None
    guarded: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError("alpha", f"must be positive, got {self.alpha}")
        if int(self.beta) != self.beta or self.beta < 1:
            raise ConfigError("beta", f"must be a natural number, got {self.beta}")
        object.__setattr__(self, "beta", int(self.beta))
        if self.rho is not None and not 0 <= self.rho <= 1:
            raise ConfigError("rho", f"must lie in [0, 1], got {self.rho}")
        guarded = list(self.guarded)
        for name in ("xi", "omega_prime"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(name, f"must be non-negative, got {v}")
            if v == 0:
                object.__setattr__(self, name, DEGENERATE_EPS)
                guarded.append(name)
        object.__setattr__(self, "guarded", tuple(guarded))
        total = self.weights.sum()
        if abs(total - 1.0) > 1e-9:
            raise NumericalError(f"Malaga mixture weights sum to {total!r}, not 1")

    @property
    def ks(self):
        return np.arange(1, self.beta + 1, dtype=float)

    @property
    def scale_sum(self):
        """``xi * beta + Omega'``."""
        return self.xi * self.beta + self.omega_prime

    @property
    def lam(self):
        """Bessel-argument rate ``alpha beta / (xi beta + Omega')``."""
        return self.alpha * self.beta / self.scale_sum

    @property
    def mean(self):
        """Mean irradiance ``xi + Omega'``."""
        return self.xi + self.omega_prime

    @cached_property
    def log_chi(self):
        a, b, xi = self.alpha, self.beta, self.xi
        return (
            math.log(2.0) + 0.5 * a * math.log(a) - (1.0 + 0.5 * a) * math.log(xi)
            - special.gammaln(a)
            + (b + 0.5 * a) * (math.log(xi * b) - math.log(self.scale_sum))
        )

    @property
    def chi(self):
        return math.exp(self.log_chi)

    @cached_property
    def log_a(self):
        a, b, k = self.alpha, self.beta, self.ks
        log_binom = special.gammaln(b) - special.gammaln(k) - special.gammaln(b - k + 1)
        return (
            log_binom + (1.0 - 0.5 * k) * math.log(self.scale_sum) - special.gammaln(k)
            + (k - 1) * (math.log(self.omega_prime) - math.log(self.xi))
            + 0.5 * k * math.log(a / b)
        )

    @property
    def a_k(self):
        return np.exp(self.log_a)

    @cached_property
    def log_b(self):
        return self.log_a - 0.5 * (self.alpha + self.ks) * math.log(self.lam)

    @property
    def b_k(self):
        return np.exp(self.log_b)

    @cached_property
    def weights(self):
        """Mixture weights of the Gamma-Gamma components, ``k = 1..beta``."""
        return np.exp(
            self.log_chi + self.log_b + special.gammaln(self.alpha)
            + special.gammaln(self.ks) - math.log(2.0)
        )


def derive_malaga_constants(alpha, beta, b0, rho, omega, phase_diff=0.0):
    """
    Build :class:`MalagaParams` from the physical scattering description.

    Parameters
    ----------
    alpha : float
        Effective number of large-scale scattering cells.
    beta : int
        Amount of fading (natural number).
    b0 : float
        Half the average power of the total scattered component.
    rho : float
        Fraction of scattered power coupled to the line of sight, in [0, 1].
    omega : float
        Average line-of-sight power.
    phase_diff : float
        Deterministic phase difference between the LOS and coupled components.
    """
    if not 0 <= rho <= 1:
        raise ConfigError("rho", f"must lie in [0, 1], got {rho}")
    if b0 < 0 or omega < 0:
        raise ConfigError("b0", "b0 and omega must be non-negative")
    xi = 2.0 * b0 * (1.0 - rho)
    omega_prime = (omega + 2.0 * rho * b0
                   + 2.0 * math.sqrt(2.0 * b0 * rho * omega) * math.cos(phase_diff))
    if omega_prime < 0:
        raise ConfigError("omega_prime", f"derived Omega' is negative ({omega_prime})")
    return MalagaParams(alpha, beta, xi, max(omega_prime, 0.0), rho=rho, b0=b0,
                        omega=omega, phase_diff=phase_diff)


def special_case_params(kind, alpha, beta, xi=None):
    """
    Malaga parameters reducing to a classic turbulence model.

    ``"gamma_gamma"`` uses ``rho = 1, Omega' = 1, xi = 0``; ``"k_distribution"``
    uses ``rho = 0, Omega' = 0`` and ``xi`` (default 0.2158). Zeros are
    replaced by :data:`DEGENERATE_EPS`.
    """
    if kind == "gamma_gamma":
        return MalagaParams(alpha, beta, 0.0 if xi is None else xi, 1.0, rho=1.0)
    if kind == "k_distribution":
        return MalagaParams(alpha, beta, 0.2158 if xi is None else xi, 0.0, rho=0.0)
    raise ConfigError("kind", f"unknown special case {kind!r}")


@dataclass(frozen=True)
class PointingParams:
    """Zero-boresight pointing error: beam-width-to-jitter ratio ``zeta`` and
    pointing loss ``a0``."""

    zeta: float
    a0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and self.zeta > 0):
            raise ConfigError("zeta", f"must be positive, got {self.zeta}")
        if not 0 < self.a0 <= 1:
            raise ConfigError("a0", f"must lie in (0, 1], got {self.a0}")

    @classmethod
    def from_geometry(cls, zeta, aperture_radius, beam_waist):
        """Pointing loss ``erf(v)**2`` with ``v = sqrt(pi) a / (sqrt(2) w_z)``."""
        if aperture_radius <= 0 or beam_waist <= 0:
            raise ConfigError("aperture_radius", "aperture and beam waist must be positive")
        v = math.sqrt(math.pi) * aperture_radius / (math.sqrt(2.0) * beam_waist)
        return cls(zeta, erf(v) ** 2)

    @property
    def zeta2(self):
        return self.zeta * self.zeta


@dataclass(frozen=True)
class FsoLinkParams:
    """
    FSO hop: turbulence, pointing, detection type and average SNR.

    ``detection`` is 1 for heterodyne and 2 for IM/DD. ``avg_snr`` is linear;
    the electrical SNR is ``c * h**detection`` with ``c`` from
    :func:`average_snr_scale`.
    """

    malaga: MalagaParams
    pointing: PointingParams
    detection: int = IMDD
    avg_snr: float = 1000.0

    def __post_init__(self):
        if self.detection not in (HETERODYNE, IMDD):
            raise ConfigError("detection", f"must be 1 or 2, got {self.detection}")
        if not (math.isfinite(self.avg_snr) and self.avg_snr > 0):
            raise ConfigError("avg_snr", f"must be positive, got {self.avg_snr}")

    @property
    def b_fso(self):
        z2 = self.pointing.zeta2
        m = self.malaga
        return z2 * m.alpha * m.beta * m.mean / ((1.0 + z2) * m.scale_sum)

    @property
    def kappa1(self):
        r, z2 = self.detection, self.pointing.zeta2
        return tuple((z2 + i) / r for i in range(1, r + 1))

    def kappa2(self, k):
        """Lower parameters for mixture component ``k`` (3r entries)."""
        r, z2, a = self.detection, self.pointing.zeta2, self.malaga.alpha
        return (tuple((z2 + i) / r for i in range(r))
                + tuple((a + i) / r for i in range(r))
                + tuple((k + i) / r for i in range(r)))

    def cdf_spec(self, k):
        """Meijer-G parameters of the SNR CDF term for component ``k``."""
        r = self.detection
        return MeijerGSpec(3 * r, 1, r + 1, 3 * r + 1,
                           (1.0,) + self.kappa1, self.kappa2(k) + (0.0,))


def _positive(h, name="h"):
    h = np.asarray(h, dtype=float)
    if np.any(np.isnan(h)) or np.any(h <= 0):
        raise DomainError(f"{name} must be positive")
    return h


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def turbulence_pdf(h, p):
    """Malaga irradiance density at ``h > 0``."""
    h = _positive(h)
    hk = h[..., None]
    arg = 2.0 * np.sqrt(p.lam * hk)
    v = p.alpha - p.ks
    with np.errstate(divide="ignore"):
        logk = np.log(special.kve(v, arg)) - arg
    logt = p.log_chi + p.log_a + (0.5 * (p.alpha + p.ks) - 1.0) * np.log(hk) + logk
    return _out(np.exp(logt).sum(axis=-1))


def turbulence_cdf(h, p):
    """Malaga irradiance CDF, component-wise ``G^{2,1}_{1,3}`` closed form."""
    h = np.asarray(h, dtype=float)

    def one(v):
        if v <= 0:
            return 0.0
        total = 0.0
        for k, w in zip(p.ks, p.weights):
            g = meijer_g(MeijerGSpec(2, 1, 1, 3, (1.0,), (p.alpha, k, 0.0)), p.lam * v)
            total += w * g / (special.gamma(p.alpha) * special.gamma(k))
        return min(1.0, max(0.0, total))

    return _out(np.vectorize(one, otypes=[float])(h))


def pointing_pdf(h, p):
    """Power-law misalignment density on ``[0, a0]``, zero elsewhere."""
    h = np.asarray(h, dtype=float)
    z2 = p.zeta2
    inside = (h >= 0) & (h <= p.a0)
    safe = np.where(inside, h, p.a0)
    with np.errstate(divide="ignore"):
        dens = z2 / p.a0 ** z2 * safe ** (z2 - 1.0)
    return _out(np.where(inside, dens, 0.0))


def pointing_cdf(h, p):
    """``(h / a0) ** zeta**2`` clipped to [0, 1]."""
    h = np.clip(np.asarray(h, dtype=float), 0.0, p.a0)
    return _out((h / p.a0) ** p.zeta2)


def _component_log_coeffs(malaga, pointing):
    # log(zeta^2 chi b_k / 2)
    return math.log(pointing.zeta2) + malaga.log_chi + malaga.log_b - math.log(2.0)


def channel_pdf(h, fso):
    """
    Density of the composite gain ``h_a * h_m`` (turbulence times pointing).

    Each mixture component contributes a ``G^{3,0}_{1,3}`` term.
    """
    h = _positive(h)
    m, pt = fso.malaga, fso.pointing
    coeffs = _component_log_coeffs(m, pt)
    z2 = pt.zeta2
    specs = [MeijerGSpec(3, 0, 1, 3, (z2 + 1.0,), (z2, m.alpha, k)) for k in m.ks]

    def one(v):
        total = 0.0
        for c, spec in zip(coeffs, specs):
            total += math.exp(c) * meijer_g(spec, m.lam * v / pt.a0)
        return total / v

    return _out(np.vectorize(one, otypes=[float])(h))


def channel_cdf(h, fso):
    """CDF of ``h_a * h_m`` (the heterodyne SNR CDF at the matching SNR)."""
    h = np.asarray(h, dtype=float)
    m, pt = fso.malaga, fso.pointing
    coeffs = _component_log_coeffs(m, pt)
    z2 = pt.zeta2
    specs = [MeijerGSpec(3, 1, 2, 4, (1.0, z2 + 1.0), (z2, m.alpha, k, 0.0)) for k in m.ks]

    def one(v):
        if v <= 0:
            return 0.0
        total = sum(math.exp(c) * meijer_g(s, m.lam * v / pt.a0) for c, s in zip(coeffs, specs))
        return min(1.0, max(0.0, total))

    return _out(np.vectorize(one, otypes=[float])(h))


def channel_mean(fso):
    """Mean composite gain ``a0 zeta^2 (xi + Omega') / (1 + zeta^2)``."""
    z2 = fso.pointing.zeta2
    return fso.pointing.a0 * z2 * fso.malaga.mean / (1.0 + z2)


def average_snr_scale(fso):
    """Constant ``c`` with ``gamma_RD = c * h**r`` matching ``fso.avg_snr``."""
    return fso.avg_snr / channel_mean(fso) ** fso.detection


def snr_cdf(x, fso):
    """
    CDF of the instantaneous FSO-hop SNR.

    Sum over mixture components of ``G^{3r,1}_{r+1,3r+1}`` terms evaluated at
    ``B^r x / (r^(2r) avg_snr)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("snr_cdf argument must be non-negative")
    m, pt, r = fso.malaga, fso.pointing, fso.detection
    log_pre = (math.log(pt.zeta2) + m.log_chi - r * math.log(2.0)
               - (r - 1) * math.log(2.0 * math.pi))
    log_c = log_pre + m.log_b + (m.alpha + m.ks - 1.0) * math.log(r)
    specs = [fso.cdf_spec(k) for k in m.ks]
    scale = fso.b_fso ** r / (r ** (2 * r) * fso.avg_snr)

    def one(v):
        if v == 0:
            return 0.0
        total = sum(math.exp(c) * meijer_g(s, scale * v) for c, s in zip(log_c, specs))
        return min(1.0, max(0.0, total))

    return _out(np.vectorize(one, otypes=[float])(x))
