"""Heavy-traffic approximations for the bulk queue under rho = 1 - gamma / s^eta.

The exponent eta selects the regime.  Below 1/2 the queue is almost never
congested (moderate), eta = 1/2 is the classical square-root regime, and
above 1/2 the mean grows like s^eta (extreme).  The approximations are
expressed through the G-integral family of :mod:`qedkit.grw`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from . import grw
from .errors import DomainError, MethodInapplicableError
from .specfun import zeta


class Regime(enum.Enum):
    MODERATE = "moderate"
    CLASSICAL = "classical"
    EXTREME = "extreme"


class RegimeWarning(UserWarning):
    """Raised (as a warning) when an approximation is only an O(exp) bound."""


@dataclass(frozen=True)
class RegimeSpec:
    """Scaling family rho_s = 1 - gamma / s^eta with per-source mean and variance.

    Attributes:
        eta: Regime exponent.
        gamma: Hedge coefficient.
        mu: Mean arrivals per source (1 for the Poisson case).
        sigma2: Arrival variance per source.
        s: Capacity.
    """

    eta: float
    gamma: float
    s: int
    mu: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        if self.eta < 0 or not self.gamma > 0 or not self.mu > 0 or not self.sigma2 > 0:
            raise DomainError("need eta >= 0 and positive gamma, mu, sigma2")
        if self.s < 1:
            raise DomainError("capacity must be positive")
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"load rho={self.rho:.6g} outside (0, 1)")

    @property
    def rho(self) -> float:
        return 1.0 - self.gamma / self.s**self.eta

    @property
    def b0_sq(self) -> float:
        return self.gamma**2 * self.mu / (2.0 * self.sigma2)

    @property
    def d_sq(self) -> float:
        return self.b0_sq / self.s ** (2.0 * self.eta - 1.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def classify_regime(spec: RegimeSpec) -> Regime:
    """Moderate for eta < 1/2, classical at 1/2, extreme above."""
    if spec.eta < 0.5:
        return Regime.MODERATE
    if spec.eta == 0.5:
        return Regime.CLASSICAL
    return Regime.EXTREME


def _moderate_zero(spec: RegimeSpec, what: str) -> float | None:
    if classify_regime(spec) is Regime.MODERATE:
        warnings.warn(
            f"eta={spec.eta} < 1/2: {what} is exponentially small in s^(1-2 eta); returning 0",
            RegimeWarning,
            stacklevel=3,
        )
        return 0.0
    return None


def mean_leading(spec: RegimeSpec) -> float:
    """Leading-order mean queue: (2/pi) sigma sqrt(s / (2 mu)) G0(d(s))."""
    zero = _moderate_zero(spec, "the mean queue")
    if zero is not None:
        return zero
    d = math.sqrt(spec.d_sq)
    return 2.0 / math.pi * spec.sigma * math.sqrt(spec.s / (2.0 * spec.mu)) * grw.g_family(d, 0)


def mean_corrected_half(spec: RegimeSpec) -> float:
    """Mean queue with the first correction, for Poisson arrivals at eta = 1/2.

    Raises:
        MethodInapplicableError: unless eta = 1/2 and mu = sigma2 = 1.
    """
    if spec.eta != 0.5 or spec.mu != 1.0 or spec.sigma2 != 1.0:
        raise MethodInapplicableError("corrected mean is only available for unit-rate Poisson at eta = 1/2")
    b0 = math.sqrt(spec.b0_sq)
    return (
        math.sqrt(2.0 * spec.s) / math.pi * grw.g_family(b0, 0)
        - math.sqrt(2.0) * spec.gamma / (3.0 * math.pi) * grw.g_family(b0, 1)
    )


def variance_leading(spec: RegimeSpec) -> float:
    """Leading-order queue variance for eta in [1/2, 1)."""
    zero = _moderate_zero(spec, "the queue variance")
    if zero is not None:
        return zero
    if spec.eta >= 1.0:
        raise MethodInapplicableError("variance approximation needs eta < 1")
    d = math.sqrt(spec.d_sq)
    return (
        spec.gamma * spec.sigma / math.pi * math.sqrt(2.0 / spec.mu)
        * spec.s ** (1.5 - spec.eta) * grw.g_family(d, 3)
    )


def variance_half_series(spec: RegimeSpec, tol: float = 1e-17) -> float:
    """The eta = 1/2 variance written as a zeta series in b0 (needs b0 < sqrt(2 pi)).

    This is an independent expansion of the same quantity returned by
    :func:`variance_leading` at eta = 1/2.
    """
    if spec.eta != 0.5:
        raise MethodInapplicableError("series form is for eta = 1/2")
    b0 = math.sqrt(spec.b0_sq)
    if not b0 < grw.SERIES_B_LIMIT:
        raise MethodInapplicableError("series needs b0 < sqrt(2 pi)")
    total = 0.0
    term = 1.0
    for r in range(400):
        coef = (-1.0) ** r * b0 ** (2 * r + 3) / (math.factorial(r) * (2 * r + 1) * (2 * r + 2) * (2 * r + 3))
        term = zeta(-1.5 - r) * coef
        total += term
        if r > 3 and abs(term) < tol:
            break
    else:
        if abs(term) > 1e-12:
            raise MethodInapplicableError("variance series did not converge")
    bracket = (
        1.0 / (8.0 * b0 * b0) - 0.25 - b0 * b0 / 12.0
        - 2.0 * zeta(-0.5) / math.sqrt(math.pi) * b0
        - 4.0 / math.sqrt(math.pi) * total
    )
    return spec.sigma2 * spec.s / spec.mu * bracket


def empty_prob_leading(spec: RegimeSpec) -> float:
    """Leading-order P(Q = 0) = exp(-F(d(s) sqrt 2)).

    F uses its zeta series inside the validity strip and the real integral
    outside it.
    """
    if classify_regime(spec) is Regime.MODERATE:
        # log P(Q=0) is exponentially small, so P(Q=0) -> 1.
        warnings.warn(
            f"eta={spec.eta} < 1/2: empty probability is 1 up to an exponentially small term",
            RegimeWarning,
            stacklevel=2,
        )
        return 1.0
    if spec.eta >= 1.0:
        raise MethodInapplicableError("empty-probability approximation needs eta < 1")
    beta = math.sqrt(2.0 * spec.d_sq)
    if beta < grw.SERIES_BETA_LIMIT - 1e-6:
        f_value = grw.f_exponent_series(beta)
    else:
        f_value = grw.f_exponent_integral(beta)
    return math.exp(-f_value)


def poisson_spec(s: int, gamma: float, eta: float = 0.5) -> RegimeSpec:
    """Unit-rate Poisson sources: mean arrivals per period s rho."""
    return RegimeSpec(eta=eta, gamma=gamma, s=s)
