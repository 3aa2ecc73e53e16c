"""
Special functions used by the RF and FSO closed forms.

The incomplete gamma functions, the error function and the modified Bessel
function of the second kind are thin, validated wrappers around
:mod:`scipy.special`. The Meijer G-function is evaluated here by direct
numerical integration of its Mellin-Barnes representation

.. math::

    G^{m,n}_{p,q}(x) = \\frac{1}{2\\pi i}\\int_L
        \\frac{\\prod_{j\\le m}\\Gamma(b_j+s)\\prod_{j\\le n}\\Gamma(1-a_j-s)}
             {\\prod_{j>m}\\Gamma(1-b_j-s)\\prod_{j>n}\\Gamma(a_j+s)}
        x^{-s}\\,ds

along a vertical line that separates the left and right pole families.
Because no residue series is summed, coincident or integer-spaced poles
need no special treatment.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import minimize_scalar

from .errors import CapabilityError, DomainError, NumericalError

__all__ = [
    "MeijerGSpec",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "reg_lower_inc_gamma",
    "reg_upper_inc_gamma",
    "log_upper_inc_gamma",
    "erf",
    "bessel_k",
    "meijer_g",
]


def _check_gamma_args(s, x):
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(x))):
        raise DomainError("incomplete gamma arguments must be finite")
    if np.any(s <= 0):
        raise DomainError("incomplete gamma shape must be positive")
    if np.any(x < 0):
        raise DomainError("incomplete gamma argument must be non-negative")
    return s, x


def _scalar_or_array(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _finite(value, name):
    if not np.all(np.isfinite(value)):
        raise NumericalError(f"{name} overflowed")
    return _scalar_or_array(value)


def reg_lower_inc_gamma(s, x):
    """Regularized lower incomplete gamma function P(s, x) = gamma(s, x)/Gamma(s)."""
    s, x = _check_gamma_args(s, x)
    return _scalar_or_array(special.gammainc(s, x))


def reg_upper_inc_gamma(s, x):
    """Regularized upper incomplete gamma function Q(s, x) = Gamma(s, x)/Gamma(s)."""
    s, x = _check_gamma_args(s, x)
    return _scalar_or_array(special.gammaincc(s, x))


def lower_inc_gamma(s, x):
    """
    Lower incomplete gamma function.

    Parameters
    ----------
    s : float or array_like
        Positive shape.
    x : float or array_like
        Non-negative upper integration limit.

    Returns
    -------
    float or ndarray
        :math:`\\gamma(s, x) = \\int_0^x t^{s-1} e^{-t} dt`.

    Raises
    ------
    DomainError
        If an argument is non-finite or out of range.
    NumericalError
        If :math:`\\Gamma(s)` overflows the double range.
    """
    s, x = _check_gamma_args(s, x)
    return _finite(special.gammainc(s, x) * special.gamma(s), "lower_inc_gamma")


def upper_inc_gamma(s, x):
    """Upper incomplete gamma function :math:`\\Gamma(s, x)`, same contract as
    :func:`lower_inc_gamma`."""
    s, x = _check_gamma_args(s, x)
    return _finite(special.gammaincc(s, x) * special.gamma(s), "upper_inc_gamma")


def log_upper_inc_gamma(s, x):
    """Natural log of :math:`\\Gamma(s, x)`; ``-inf`` where it underflows.

    Used for the large shapes appearing in the interference-limited RF CDF,
    where :math:`\\Gamma(s, x)` itself may overflow.
    """
    s, x = _check_gamma_args(s, x)
    with np.errstate(divide="ignore"):
        q = special.gammaincc(s, x)
        out = np.log(q) + special.gammaln(s)
    # gammaincc underflows to 0 deep in the tail; use the asymptotic series there.
    tail = (q == 0) & (x > 0)
    if np.any(tail):
        st = np.broadcast_to(s, out.shape)[tail]
        xt = np.broadcast_to(x, out.shape)[tail]
        out = np.array(out, copy=True)
        out[tail] = (st - 1) * np.log(xt) - xt + np.log1p((st - 1) / xt)
    return _scalar_or_array(out)


def erf(x):
    """Error function; odd, bounded by one in magnitude."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("erf argument must not be NaN")
    return _scalar_or_array(special.erf(x))


def bessel_k(v, x):
    """
    Modified Bessel function of the second kind :math:`K_v(x)` for real order.

    Raises :class:`DomainError` for ``x <= 0`` and :class:`NumericalError`
    when the result overflows (very small ``x`` with large ``|v|``).
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(x))):
        raise DomainError("bessel_k arguments must be finite")
    if np.any(x <= 0):
        raise DomainError("bessel_k requires x > 0")
    out = special.kv(v, x)
    if not np.all(np.isfinite(out)):
        raise NumericalError("bessel_k overflow (argument too small for this order)")
    return _scalar_or_array(out)


@dataclass(frozen=True)
class MeijerGSpec:
    """Orders and parameters of :math:`G^{m,n}_{p,q}(x\\,|\\,a;\\,b)`."""

    m: int
    n: int
    p: int
    q: int
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise DomainError("len(a) must equal p and len(b) must equal q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise DomainError("orders must satisfy 0 <= m <= q and 0 <= n <= p")
        if not all(math.isfinite(v) for v in self.a + self.b):
            raise DomainError("Meijer-G parameters must be finite")

    @classmethod
    def from_lists(cls, m, n, a, b):
        """Build a spec inferring ``p`` and ``q`` from the parameter lists."""
        return cls(m, n, len(a), len(b), tuple(a), tuple(b))


# 20-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class _MellinBarnes:
    """Log-integrand of the Mellin-Barnes integral for one (spec, x) pair."""

    def __init__(self, spec, x):
        a = np.array(spec.a)
        b = np.array(spec.b)
        self.b_num = b[: spec.m]
        self.a_num = a[: spec.n]
        self.b_den = b[spec.m:]
        self.a_den = a[spec.n:]
        self.logx = math.log(x)
        lo = -np.min(self.b_num)
        hi = np.min(1.0 - self.a_num) if spec.n else np.inf
        self.lo, self.hi = float(lo), float(hi)

    def log_abs_real(self, c):
        """log|integrand| on the real axis."""
        g = special.gammaln
        return (
            np.sum(g(self.b_num + c))
            + np.sum(g(1.0 - self.a_num - c))
            - np.sum(g(1.0 - self.b_den - c))
            - np.sum(g(self.a_den + c))
            - c * self.logx
        )

    def log_integrand(self, s):
        lg = special.loggamma
        s = s[:, None]
        out = (
            lg(self.b_num + s).sum(axis=1)
            + lg(1.0 - self.a_num - s).sum(axis=1)
            - lg(1.0 - self.b_den - s).sum(axis=1)
            - lg(self.a_den + s).sum(axis=1)
        )
        return out - s[:, 0] * self.logx


def _contour_abscissa(mb, spec):
    """Real part of the contour: the minimum of |integrand| inside the strip."""
    lo = mb.lo
    if math.isinf(mb.hi):
        # G decays like exp(-x**(1/(q-p))); the saddle sits near that power of x
        hi = mb.lo + 10.0 + 4.0 * math.exp(mb.logx / (spec.q - spec.p))
    else:
        hi = mb.hi
    width = hi - lo
    eps = 1e-9 * max(1.0, width)
    res = minimize_scalar(
        mb.log_abs_real, bounds=(lo + eps, hi - eps), method="bounded",
        options={"xatol": 1e-10 * max(1.0, width)},
    )
    c = float(res.x)
    # keep a finite distance from the nearest pole so the line integrand is smooth
    margin = min(0.05, 0.25 * width)
    c = min(max(c, lo + margin), hi - margin)
    if not math.isfinite(mb.log_abs_real(c)):
        c = 0.5 * (lo + hi)
    return c


def meijer_g(spec, x, rtol=1e-9):
    """
    Meijer G-function of a positive real argument.

    Parameters
    ----------
    spec : MeijerGSpec
        Orders and parameters. Only the convergent class with ``p < q`` and
        separable pole families is supported.
    x : float
        Positive argument.
    rtol : float, optional
        Target relative accuracy of the contour quadrature.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        If ``x <= 0`` or is not finite.
    CapabilityError
        For ``p >= q`` or when no vertical line separates the poles.
    NumericalError
        If the quadrature does not converge; the message carries the last
        two estimates.
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError("meijer_g requires a finite positive argument")
    if spec.p >= spec.q:
        raise CapabilityError("meijer_g only supports p < q")
    if spec.m == 0:
        raise CapabilityError("meijer_g requires m >= 1")
    mb = _MellinBarnes(spec, x)
    if not mb.lo < mb.hi:
        raise CapabilityError(
            f"no vertical contour separates the poles (strip {mb.lo}..{mb.hi})")

    c = _contour_abscissa(mb, spec)
    # normalise by |integrand| at t = 0; any sign is carried by the phase
    f0 = mb.log_integrand(np.array([complex(c, 0.0)]))[0]

    def g(t):
        z = mb.log_integrand(c + 1j * t) - f0.real
        return np.exp(z).real

    # truncation point: decay of the integrand below 1e-18 of its peak
    delta = spec.m + spec.n - 0.5 * (spec.p + spec.q)
    t_max = 1.0
    while True:
        probe = np.linspace(t_max, 2.0 * t_max, 8)
        mag = (mb.log_integrand(c + 1j * probe) - f0.real).real
        if np.all(mag < -42.0):
            t_max = 2.0 * t_max
            break
        t_max *= 2.0
        if t_max > 1e4 / delta:
            raise NumericalError("Mellin-Barnes integrand does not decay")

    def composite(panels):
        edges = np.linspace(0.0, t_max, panels + 1)
        h = np.diff(edges)
        nodes = (edges[:-1, None] + h[:, None] * _GL_X[None, :]).ravel()
        weights = (h[:, None] * _GL_W[None, :]).ravel()
        return float(np.dot(weights, g(nodes)))

    panels = max(8, int(math.ceil(t_max * (1.0 + abs(mb.logx)) / 4.0)))
    prev = composite(panels)
    for _ in range(10):
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= rtol * 0.1 * abs(cur) or abs(cur - prev) <= 1e-17:
            return math.exp(f0.real) * cur / math.pi
        prev = cur
    raise NumericalError(
        f"Mellin-Barnes quadrature did not converge: {prev!r} vs {cur!r}")
