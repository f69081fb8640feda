"""Gamma-family special functions on the positive real line.

Every closed-form KL moment in this package reduces to digamma and trigamma
evaluations, so these carry most of the numerical weight. The scalar kernels
(leading underscore) are jit-compiled on the numba backend and skip argument
checking; the public wrappers validate and raise :class:`DomainError`.
"""
import math

from ._jit import jit
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

# Recurrence-shift threshold for the asymptotic series.
_SHIFT = 8.0

# B_{2k} / (2k) for k = 1..7
_PSI0_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# B_{2k} for k = 1..7
_PSI1_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)
# B_{2k} / (2k)! for k = 1..6
_ZETA_COEF = (
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
)
_ZETA_TERMS = 20


@jit
def _shifted_point(x):
    n = 0
    while x < _SHIFT:
        x += 1.0
        n += 1
    return x, n


@jit
def _nth_step(x, k):
    # x + k with the same rounding sequence as the shift loop
    for _ in range(k):
        x += 1.0
    return x


@jit
def _digamma(x):
    y, n = _shifted_point(x)
    z = 1.0 / (y * y)
    series = 0.0
    for k in range(6, -1, -1):
        series = series * z + _PSI0_COEF[k]
    acc = math.log(y) - 0.5 / y - z * series
    # smallest shift terms first, so psi(x) = fl(psi(x + 1) - 1/x) exactly
    for k in range(n - 1, -1, -1):
        acc -= 1.0 / _nth_step(x, k)
    return acc


@jit
def _trigamma(x):
    y, n = _shifted_point(x)
    z = 1.0 / (y * y)
    series = 0.0
    for k in range(6, -1, -1):
        series = series * z + _PSI1_COEF[k]
    acc = (1.0 + 0.5 / y + z * series) / y
    for k in range(n - 1, -1, -1):
        xk = _nth_step(x, k)
        acc += 1.0 / (xk * xk)
    return acc


@jit
def _zeta(s):
    n = float(_ZETA_TERMS)
    total = 0.0
    for k in range(_ZETA_TERMS - 1, 0, -1):
        total += k ** (-s)
    # Euler-Maclaurin tail from n to infinity
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** (-s)
    rising = s
    power = n ** (-s - 1.0)
    for k in range(6):
        tail += _ZETA_COEF[k] * rising * power
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2)
        power /= n * n
    return total + tail


def _check_positive(name, x):
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} requires a finite positive argument, got {x!r}")
    return x


def log_gamma(x):
    """Natural log of the gamma function for finite ``x > 0``."""
    return math.lgamma(_check_positive("log_gamma", x))


def digamma(x):
    """First logarithmic derivative of the gamma function, psi_0(x)."""
    return _digamma(_check_positive("digamma", x))


def trigamma(x):
    """Second logarithmic derivative of the gamma function, psi_1(x)."""
    return _trigamma(_check_positive("trigamma", x))


def riemann_zeta(s):
    """Riemann zeta function for real ``s > 1``.

    Sums the first 19 terms directly and closes the remainder with an
    Euler-Maclaurin correction through the B_12 term.
    """
    s = float(s)
    if not math.isfinite(s) and s != math.inf:
        raise DomainError(f"riemann_zeta requires real s > 1, got {s!r}")
    if s <= 1.0:
        raise DomainError(f"riemann_zeta requires s > 1, got {s!r}")
    if s == math.inf:
        return 1.0
    return _zeta(s)
