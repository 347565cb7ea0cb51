"""Special functions and small statistical utilities.

Everything here is self-contained (no scipy):  the regularized lower
incomplete gamma function is computed with the classic series /
continued-fraction split, evaluated in log-gamma space so that shape
parameters in the tens of thousands (as needed by the large-network bound
curves) neither overflow nor lose precision.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_REL_TOL = 1e-14
_MAX_ITER = 1_000_000
_FPMIN = 1e-300


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")


def _stirling_delta(a):
    # lgamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2] for a >= 30
    inv = 1.0 / a
    inv2 = inv * inv
    return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))


def _log_prefactor(a, x):
    """log(x^a e^-x / Gamma(a)), stable for shape parameters in the thousands."""
    if a < 30.0:
        return a * math.log(x) - x - math.lgamma(a)
    # a (ln(x/a) - x/a + 1) - ln(2 pi a)/2 - delta(a): the cancellation between
    # a*ln(x) and lgamma(a) is folded into the small quantity log1p(u) - u.
    u = x / a - 1.0
    return a * (math.log1p(u) - u) + 0.5 * math.log(a / (2.0 * math.pi)) - _stirling_delta(a)


def reg_gamma_P(a, x):
    """Regularized lower incomplete gamma function P(a, x).

    Series expansion for ``x < a + 1``, modified-Lentz continued fraction
    otherwise; both iterated to relative tolerance 1e-14.  Monotone
    nondecreasing in ``x`` and maps onto [0, 1].
    """
    a = float(a)
    x = float(x)
    _check_finite("a", a)
    _check_finite("x", x)
    if a <= 0:
        raise DomainError(f"shape parameter a must be positive, got {a}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    log_prefactor = _log_prefactor(a, x)
    if x < a + 1.0:
        # P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
        term = 1.0 / a
        total = term
        for n in range(1, _MAX_ITER):
            term *= x / (a + n)
            total += term
            if abs(term) < abs(total) * _REL_TOL:
                break
        else:
            raise DomainError(f"series for P({a}, {x}) did not converge")
        if log_prefactor < -745.0 and total > 0:
            # result underflows float64; exponent arithmetic avoids spurious 0*inf
            return math.exp(log_prefactor + math.log(total))
        return math.exp(log_prefactor) * total
    # Q(a,x) via modified Lentz continued fraction, then P = 1 - Q.
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b if b != 0 else 1.0 / _FPMIN
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_TOL:
            break
    else:
        raise DomainError(f"continued fraction for P({a}, {x}) did not converge")
    q = math.exp(log_prefactor) * h if log_prefactor > -745.0 else 0.0
    return 1.0 - q


def q_function(x):
    """Standard normal upper-tail probability Q(x) = P(N(0,1) > x)."""
    x = float(x)
    _check_finite("x", x)
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def chi2_cdf(dof, x):
    """CDF of the chi-squared distribution with ``dof`` degrees of freedom."""
    if int(dof) != dof or dof < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {dof}")
    return reg_gamma_P(dof / 2.0, float(x) / 2.0)


def ks_statistic(samples, cdf):
    """One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.

    ``samples`` is a nonempty sequence of reals (sorted internally) and
    ``cdf`` a monotone distribution function into [0, 1].
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise DomainError("ks_statistic requires at least one sample")
    n = xs.size
    f = np.array([cdf(x) for x in xs], dtype=float)
    lo = np.arange(0, n, dtype=float) / n
    hi = np.arange(1, n + 1, dtype=float) / n
    return float(max(np.max(f - lo), np.max(hi - f), 0.0))


def loglog_slope(points):
    """Least-squares slope of log(y) against log(n) for positive points."""
    pts = list(points)
    if len(pts) < 2:
        raise DomainError("loglog_slope requires at least two points")
    ns, ys = zip(*pts)
    if min(ns) <= 0 or min(ys) <= 0:
        raise DomainError("loglog_slope requires strictly positive coordinates")
    log_n = np.log(np.asarray(ns, dtype=float))
    log_y = np.log(np.asarray(ys, dtype=float))
    dn = log_n - log_n.mean()
    denom = float(np.dot(dn, dn))
    if denom == 0.0:
        raise DomainError("loglog_slope requires at least two distinct n values")
    return float(np.dot(dn, log_y - log_y.mean()) / denom)
