"""Maximum of the Gaussian random walk and the G-integral family.

The all-time maximum M of a random walk with Normal(-beta, 1) increments
is the heavy-traffic limit of many scaled queues.  Its empty probability,
mean and variance are available two ways: as real integrals over (0, inf)
and as power series in beta whose coefficients are Riemann zeta values.

The same integrals, written in the variable ``b = beta / sqrt(2)``, form
the G-family G0..G6 used by the regime approximations in
:mod:`qedkit.regimes`.  With ``E = exp(-b^2 - t^2)`` the family is::

    G1 = int E/(1-E)                      G5 = int E/(1-E)^2
    G2 = int b^2/(b^2+t^2) E/(1-E)        G6 = int b^2/(b^2+t^2) E/(1-E)^2
    G0 = int t^2/(b^2+t^2) E/(1-E)        G4 = int t^2/(b^2+t^2) E/(1-E)^2
    G3 = int t^2/(b^2+t^2)^2 E/(1-E)

all over t in (0, inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc, gammaln, ndtr
from scipy.special import zeta as _zeta

from .errors import ConsistencyError, DomainError, MethodInapplicableError, NumericalError

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SERIES_B_LIMIT = math.sqrt(2.0 * math.pi)
SERIES_BETA_LIMIT = 2.0 * SQRT_PI
MIN_ARGUMENT = 1e-3
_MAX_TERMS = 168
# Close to the radius of convergence the series needs hundreds of terms
# and loses digits to cancellation, so the cross-check stops short of it.
SERIES_CHECK_LIMIT = 2.0


@dataclass(frozen=True)
class GrwMoments:
    """Empty probability, mean and variance of the random-walk maximum."""

    p0: float
    mean: float
    variance: float

    def __post_init__(self) -> None:
        for name in ("p0", "mean", "variance"):
            object.__setattr__(self, name, float(getattr(self, name)))


def _check_b(b: float) -> float:
    b = float(b)
    if not (math.isfinite(b) and b > 0):
        raise DomainError(f"G-integral argument must be positive, got {b}")
    if b < MIN_ARGUMENT:
        raise DomainError(f"G-integral argument {b} below supported minimum {MIN_ARGUMENT}")
    return b


# ---------------------------------------------------------------------------
# Quadrature route
# ---------------------------------------------------------------------------

def _kernel1(b2: float, t: float) -> float:
    return 1.0 / math.expm1(b2 + t * t)


def _kernel2(b2: float, t: float) -> float:
    em = math.expm1(b2 + t * t)
    return (em + 1.0) / (em * em)


def _integrand(which: int, b: float):
    b2 = b * b
    if which == 0:
        return lambda t: t * t / (b2 + t * t) * _kernel1(b2, t)
    if which == 1:
        return lambda t: _kernel1(b2, t)
    if which == 2:
        return lambda t: b2 / (b2 + t * t) * _kernel1(b2, t)
    if which == 3:
        return lambda t: t * t / (b2 + t * t) ** 2 * _kernel1(b2, t)
    if which == 4:
        return lambda t: t * t / (b2 + t * t) * _kernel2(b2, t)
    if which == 5:
        return lambda t: _kernel2(b2, t)
    if which == 6:
        return lambda t: b2 / (b2 + t * t) * _kernel2(b2, t)
    raise DomainError(f"G-family index must be in 0..6, got {which}")


def _quad_half_line(f, scale: float) -> float:
    """Integrate a smooth, rapidly decaying integrand over (0, inf).

    The integrand may be sharply peaked near t = 0 with width ``scale``;
    splitting at a few multiples of the scale keeps the adaptive rule from
    missing the peak.
    """
    t_max = math.sqrt(40.0)
    cuts = sorted({0.0, *[c for c in (scale, 4.0 * scale, 1.0, 3.0) if c < t_max], t_max})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        val, err = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
        if not math.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
            raise NumericalError(f"quadrature on [{lo}, {hi}] failed: value={val}, error={err}")
        total += val
    return total


def g_integral(b: float, which: int) -> float:
    """G_which(b) by adaptive quadrature; valid for every b > 0."""
    b = _check_b(b)
    return _quad_half_line(_integrand(which, b), b)


# ---------------------------------------------------------------------------
# Zeta-series route
# ---------------------------------------------------------------------------

def _zeta_sum(offset: float, b: float, coef) -> float:
    """Sum_r zeta(offset - r) (-1)^r b^(2r) coef(r) until terms are negligible."""
    total = 0.0
    log_b2 = 2.0 * math.log(b)
    small = 0
    for r in range(_MAX_TERMS):
        c = coef(r)
        term = _zeta(offset - r) * (-1.0) ** r * math.exp(r * log_b2 + c)
        total += term
        if abs(term) < 1e-16 * max(1.0, abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    if abs(term) < 1e-12:
        return total
    raise MethodInapplicableError(f"zeta series did not converge at b={b}")


def g_series(b: float, which: int) -> float:
    """G_which(b) from its zeta-series expansion, valid for 0 < b < sqrt(2 pi)."""
    b = _check_b(b)
    if b >= SERIES_B_LIMIT:
        raise MethodInapplicableError(f"series needs b < sqrt(2 pi) = {SERIES_B_LIMIT:.6f}; got {b}")
    pi = math.pi
    lf = lambda r: -gammaln(r + 1)  # log 1/r!
    if which == 1:
        return pi / (2 * b) + 0.5 * SQRT_PI * _zeta_sum(0.5, b, lf)
    if which == 2:
        s = _zeta_sum(-0.5, b, lambda r: lf(r) - math.log(2 * r + 1))
        return pi / (4 * b) - pi * b / 4 - SQRT_PI * b * b * s
    if which == 0:
        s = _zeta_sum(-0.5, b, lambda r: lf(r) - math.log((2 * r + 1) * (2 * r + 2)))
        return pi / (4 * b) + pi * b / 4 + 0.5 * SQRT_PI * _zeta(0.5) + SQRT_PI * b * b * s
    if which == 5:
        return pi / (4 * b**3) + 0.5 * SQRT_PI * _zeta_sum(-0.5, b, lf)
    if which == 6:
        s = _zeta_sum(-1.5, b, lambda r: lf(r) - math.log(2 * r + 1))
        return 3 * pi / (16 * b**3) - pi * b / 24 - SQRT_PI * b * b * s
    if which == 4:
        s = _zeta_sum(-1.5, b, lambda r: lf(r) - math.log((2 * r + 1) * (2 * r + 2)))
        return pi / (16 * b**3) + pi * b / 24 + 0.5 * _zeta(-0.5) * SQRT_PI + SQRT_PI * b * b * s
    if which == 3:
        s = _zeta_sum(-1.5, b, lambda r: lf(r) - math.log((2 * r + 1) * (2 * r + 2) * (2 * r + 3)))
        return (
            pi / (16 * b**3) - pi / (8 * b) - pi * b / 24 - _zeta(-0.5) * SQRT_PI
            - 2 * SQRT_PI * b * b * s
        )
    raise DomainError(f"G-family index must be in 0..6, got {which}")


def g_family(b: float, which: int, cross_check: bool = True) -> float:
    """G_which(b), by quadrature, cross-checked against the series when possible.

    Args:
        b: Positive argument.
        which: Index 0..6 of the family member.
        cross_check: When True and b lies in the series strip, the zeta
            series is evaluated too and must agree with the quadrature.

    Returns:
        The quadrature value.

    Raises:
        ConsistencyError: if the two routes differ by more than 1e-6
            (relative to max(1, |G|)).
    """
    q = g_integral(b, which)
    if cross_check and b < SERIES_CHECK_LIMIT:
        s = g_series(b, which)
        if abs(s - q) > 1e-6 * max(1.0, abs(q)):
            raise ConsistencyError(f"G{which}({b}): quadrature {q!r} vs series {s!r}")
    return q


# ---------------------------------------------------------------------------
# Empty-probability function F
# ---------------------------------------------------------------------------

def f_exponent_sum(beta: float, tol: float = 1e-17) -> float:
    """F(beta) = sum_k Phi(-beta sqrt k) / k, so that P(M = 0) = exp(-F).

    The direct sum converges geometrically in k for any beta > 0.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    total = 0.0
    k = 1
    while True:
        term = ndtr(-beta * math.sqrt(k)) / k
        total += term
        if term < tol * total or k > 10_000_000:
            if k > 10_000_000:
                raise NumericalError("F sum did not converge (beta too small)")
            return total
        k += 1


def f_exponent_integral(beta: float) -> float:
    """F(beta) from the real integral of log(1 - exp(-beta^2/2 - t^2))."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    if beta / math.sqrt(2.0) < MIN_ARGUMENT:
        raise DomainError("beta too small for the logarithmic integral")
    h = beta / math.sqrt(2.0)
    h2 = h * h

    def f(t: float) -> float:
        return h / (h2 + t * t) * math.log(-math.expm1(-h2 - t * t))

    return _quad_half_line(f, h) / math.pi * -1.0


def f_exponent_series(beta: float) -> float:
    """F(beta) from its zeta series, valid for 0 < beta < 2 sqrt(pi)."""
    if not 0 < beta < SERIES_BETA_LIMIT:
        raise MethodInapplicableError(f"series needs 0 < beta < 2 sqrt(pi); got {beta}")
    total = 0.0
    small = 0
    for r in range(_MAX_TERMS):
        log_mag = (2 * r + 1) * math.log(beta) - r * math.log(2.0) - gammaln(r + 1) - math.log(2 * r + 1)
        term = _zeta(0.5 - r) * (-1.0) ** r * math.exp(log_mag)
        total += term
        if abs(term) < 1e-16 * max(1.0, abs(total)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        if abs(term) > 1e-12:
            raise MethodInapplicableError(f"F series did not converge at beta={beta}")
    return -math.log(beta) - 0.5 * math.log(2.0) - total / SQRT_2PI


# ---------------------------------------------------------------------------
# Random-walk moments
# ---------------------------------------------------------------------------

def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"drift beta must be positive, got {beta}")
    return beta


def grw_moments_integral(beta: float) -> GrwMoments:
    """P(M=0), E M and Var M by quadrature of the real integral forms."""
    beta = _check_beta(beta)
    b = beta / math.sqrt(2.0)
    mean = math.sqrt(2.0) / math.pi * g_integral(b, 0)
    var = beta * math.sqrt(2.0) / math.pi * g_integral(b, 3)
    p0 = math.exp(-f_exponent_integral(beta))
    return GrwMoments(p0=p0, mean=mean, variance=var)


def grw_moments_series(beta: float) -> GrwMoments:
    """P(M=0), E M and Var M from the zeta series (0 < beta < 2 sqrt(pi))."""
    beta = _check_beta(beta)
    if beta >= SERIES_BETA_LIMIT - 1e-6:
        raise MethodInapplicableError(
            f"beta={beta} outside the series strip (0, 2 sqrt(pi)); use grw_moments_integral"
        )
    b = beta / math.sqrt(2.0)
    # The mean series written out in beta.
    s = 0.0
    small = 0
    for r in range(_MAX_TERMS):
        log_mag = 2 * r * math.log(beta) - r * math.log(2.0) - gammaln(r + 1) - math.log((2 * r + 1) * (2 * r + 2))
        term = _zeta(-0.5 - r) * (-1.0) ** r * math.exp(log_mag)
        s += term
        if abs(term) < 1e-17 * max(1.0, abs(s)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    mean = 1.0 / (2 * beta) + _zeta(0.5) / SQRT_2PI + beta / 4 + beta * beta / SQRT_2PI * s
    var = beta * math.sqrt(2.0) / math.pi * g_series(b, 3)
    p0 = math.exp(-f_exponent_series(beta))
    return GrwMoments(p0=p0, mean=mean, variance=var)


def grw_moments_spitzer(beta: float, tol: float = 1e-16) -> GrwMoments:
    """Moments from the Spitzer sums over the Normal(-k beta, k) partial sums.

    Slow for small beta (the number of terms grows like 1/beta^2) but
    entirely independent of the other two routes, which makes it a handy
    oracle.
    """
    beta = _check_beta(beta)
    mean = var = 0.0
    k = 1
    while True:
        rk = math.sqrt(k)
        x = beta * rk
        tail = ndtr(-x)
        dens = math.exp(-0.5 * x * x) / SQRT_2PI
        m1 = rk * dens - k * beta * tail
        m2 = (k * k * beta * beta + k) * tail - k * beta * rk * dens
        mean += m1 / k
        var += m2 / k
        if m2 / k < tol * var and m1 / k < tol * mean:
            break
        k += 1
    return GrwMoments(p0=math.exp(-f_exponent_sum(beta)), mean=mean, variance=var)


def erfc_sum(b: float, power: int = 0, tol: float = 1e-17) -> float:
    """Sum_{m>=1} m^power erfc(b sqrt m); helper for the closed forms of G2 and G6."""
    total = 0.0
    m = 1
    while True:
        term = m**power * erfc(b * math.sqrt(m))
        total += term
        if term < tol * total:
            return total
        m += 1
