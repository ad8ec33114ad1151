"""Special functions used by the distance distributions and the joint motif probability.

Only the zero-order modified Bessel function of the first kind and the lower
incomplete gamma function are needed. Both are written out here rather than
pulled from scipy so the truncation rules are explicit and testable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

# Power series below, Hankel asymptotic expansion at and above.
I0_CROSSOVER = 15.0

_EPS = 1e-17
_MAX_SERIES_TERMS = 500


@dataclass(frozen=True)
class SeriesControl:
    relative_tolerance: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if not (0.0 < self.relative_tolerance <= 1e-3):
            raise DomainError(
                f"relative_tolerance must lie in (0, 1e-3], got {self.relative_tolerance}"
            )
        if int(self.max_terms) != self.max_terms or self.max_terms < 10:
            raise DomainError(f"max_terms must be an integer >= 10, got {self.max_terms}")


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")


def _i0_series(x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while term > _EPS * total:
        k += 1
        term *= q / (k * k)
        total += term
        if k > _MAX_SERIES_TERMS:
            raise ConvergenceError(f"I0 power series did not converge at x={x}")
    return total


def _i0e_asymptotic(x):
    # e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term or nxt < _EPS * total:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i0e(x):
    """Exponentially scaled I0, ``exp(-x) * I0(x)``, for scalar ``x >= 0``."""
    x = float(x)
    _check_finite("x", x)
    if x < 0:
        raise DomainError(f"bessel_i0e requires x >= 0, got {x}")
    if x < I0_CROSSOVER:
        return _i0_series(x) * math.exp(-x)
    return _i0e_asymptotic(x)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero, for scalar ``x >= 0``.

    Arguments large enough that I0 itself exceeds the double range return ``inf``.
    """
    x = float(x)
    _check_finite("x", x)
    if x < 0:
        raise DomainError(f"bessel_i0 requires x >= 0, got {x}")
    if x < I0_CROSSOVER:
        return _i0_series(x)
    scaled = _i0e_asymptotic(x)
    log_value = x + math.log(scaled)
    if log_value > 709.78:
        return math.inf
    return math.exp(x) * scaled


def i0e_array(x):
    """Vectorised :func:`bessel_i0e` for numpy arrays of nonnegative finite values."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("i0e_array requires finite input")
    if np.any(x < 0):
        raise DomainError("i0e_array requires x >= 0")
    out = np.empty_like(x)
    small = x < I0_CROSSOVER

    xs = x[small]
    if xs.size:
        q = 0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        # 56 terms reach 1e-17 relative at the crossover.
        for k in range(1, 57):
            term *= q / (k * k)
            total += term
        out[small] = total * np.exp(-xs)

    xl = x[~small]
    if xl.size:
        term = np.ones_like(xl)
        total = np.ones_like(xl)
        active = np.ones(xl.shape, dtype=bool)
        # Terms shrink until k ~ 2x >= 30; stop each element at its smallest term.
        for k in range(1, 31):
            nxt = term * (2 * k - 1) ** 2 / (8.0 * k * xl)
            active &= nxt < term
            term = np.where(active, nxt, term)
            total = total + np.where(active, nxt, 0.0)
        out[~small] = total / np.sqrt(2.0 * np.pi * xl)
    return out


def regularized_lower_gamma(a, x):
    """Regularized lower incomplete gamma ``P(a, x) = gamma(a, x) / Gamma(a)``."""
    a = float(a)
    x = float(x)
    _check_finite("a", a)
    _check_finite("x", x)
    if a <= 0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a}")
    if x < 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series_sum(a, x) * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return 1.0 - _gamma_continued_fraction(a, x)


def lower_inc_gamma(a, x):
    """Lower incomplete gamma ``integral_0^x c^(a-1) e^(-c) dc``."""
    p = regularized_lower_gamma(a, x)
    a = float(a)
    x = float(x)
    if 0.0 < x < a + 1.0:
        # Skip the Gamma(a) round trip, which underflows for small x and large a.
        return _gamma_series_sum(a, x) * math.exp(-x + a * math.log(x))
    return p * math.exp(math.lgamma(a))


def _gamma_series_sum(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_SERIES_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise ConvergenceError(f"incomplete gamma series failed for a={a}, x={x}")


def _gamma_continued_fraction(a, x):
    # Modified Lentz evaluation of the upper regularized gamma Q(a, x).
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_SERIES_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction failed for a={a}, x={x}")
