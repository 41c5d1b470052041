"""Scalar special functions used by the heavy-traffic formulas.

All functions are thin, validated wrappers around :mod:`scipy.special`.
They reject non-finite input instead of propagating NaN, because a NaN
leaking into a bisection or a quadrature is much harder to diagnose than an
immediate exception.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def std_normal_pdf(x: float) -> float:
    """Standard normal density exp(-x^2/2)/sqrt(2 pi)."""
    x = _finite(x)
    return math.exp(-0.5 * x * x) / SQRT_2PI


def std_normal_cdf(x: float) -> float:
    """Standard normal distribution function.

    Evaluated through ``scipy.special.ndtr``, which switches to the
    complementary error function in the lower tail, so relative accuracy is
    kept far out in both tails.
    """
    return float(special.ndtr(_finite(x)))


def std_normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), accurate in relative terms for large x."""
    return float(special.ndtr(-_finite(x)))


def erfc(x: float) -> float:
    """Complementary error function."""
    return float(special.erfc(_finite(x)))


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) * erfc(x)."""
    return float(special.erfcx(_finite(x)))


def log_gamma(x: float) -> float:
    """Natural logarithm of the Gamma function for x > 0."""
    x = _finite(x)
    if x <= 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return float(special.gammaln(x))


def zeta(s: float) -> float:
    """Riemann zeta function for real s < 1.

    The formulas in this package only ever need the continuation to the
    left of the pole, mostly at half-integers 1/2 - l, -1/2 - l, -3/2 - l.
    """
    s = _finite(s, "s")
    if s >= 1.0:
        raise DomainError(f"zeta is only supported for s < 1, got {s}")
    return float(special.zeta(s))


def normal_hazard(x: float) -> float:
    """Normal hazard rate phi(x) / Phi(-x).

    Uses the scaled complementary error function, so it stays finite and
    accurate for large positive x where both numerator and denominator
    underflow.
    """
    x = _finite(x)
    # Phi(-x) = erfc(x/sqrt2)/2 = exp(-x^2/2) erfcx(x/sqrt2)/2
    return 2.0 / (SQRT_2PI * special.erfcx(x / math.sqrt(2.0)))


def gauss_exp_cdf(a: float, w: float) -> float:
    """Compute phi(a) * exp(w^2/2) * Phi(w) without overflow.

    Products of this shape appear in the two-stage loss limits, where
    ``exp(w^2/2)`` alone overflows long before the product does.

    Args:
        a: Argument of the normal density.
        w: Argument of the exponential tilt and of the normal cdf.

    Returns:
        The product as a float (possibly 0.0 after genuine underflow).
    """
    a = _finite(a, "a")
    w = _finite(w, "w")
    if w < 0.0:
        # Phi(w) = exp(-w^2/2) erfcx(-w/sqrt2) / 2
        return math.exp(-0.5 * a * a) / SQRT_2PI * 0.5 * special.erfcx(-w / math.sqrt(2.0))
    log_val = -0.5 * a * a + 0.5 * w * w + math.log(special.ndtr(w)) - math.log(SQRT_2PI)
    return math.exp(log_val)


def ndtr_array(x: np.ndarray) -> np.ndarray:
    """Vectorised standard normal cdf for quadrature integrands."""
    return special.ndtr(np.asarray(x, dtype=float))
