"""Heavy-traffic approximations and statistics for Gamma-Poisson arrivals.

Arrivals per period are Poisson with a Gamma(a, b) distributed rate.  The
classic approximations scale the Gaussian random walk maximum by the
arrival standard deviation; the robust ones replace the hedge beta by a
corrected hedge ``beta_n`` and the scale by ``sigma_tilde``, which tracks
finite-size effects much better when overdispersion is strong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats
from scipy.special import gammaln

from . import grw
from .errors import DomainError, MethodInapplicableError


@dataclass(frozen=True)
class OverdispersedSpec:
    """Gamma-Poisson arrivals (shape ``a``, scale ``b``) with hedge ``beta``.

    Capacity is the real number ``s = mu + beta * sigma`` with
    ``mu = a b`` and ``sigma^2 = a b (b + 1)``.
    """

    a: float
    b: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.beta > 0):
            raise DomainError("a, b and beta must be positive")

    @property
    def mu(self) -> float:
        return self.a * self.b

    @property
    def sigma2(self) -> float:
        return self.a * self.b * (self.b + 1.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def s(self) -> float:
        return self.mu + self.beta * self.sigma

    @property
    def rho(self) -> float:
        return self.mu / self.s

    @classmethod
    def from_capacity(cls, a: float, b: float, s: float) -> "OverdispersedSpec":
        """Spec whose hedge is implied by a given capacity s > a b."""
        mu = a * b
        if not s > mu:
            raise DomainError("capacity must exceed the mean arrivals")
        return cls(a=a, b=b, beta=(s - mu) / math.sqrt(mu * (b + 1.0)))


def power_scaling(s: int, beta: float, delta: float) -> OverdispersedSpec:
    """Spec with mean n and variance n^(2 delta), sized by s = n + beta n^delta.

    The load index n is solved from the integer capacity s, and then
    ``b = n^(2 delta - 1) - 1`` and ``a = n / b``.

    Raises:
        DomainError: if delta <= 1/2 (no overdispersion) or the solved n
            gives b <= 0.
    """
    if not delta > 0.5:
        raise DomainError("overdispersion needs delta > 1/2")
    n = optimize.brentq(lambda x: x + beta * x**delta - s, 1e-12, float(s), xtol=1e-14, rtol=1e-15)
    b = n ** (2.0 * delta - 1.0) - 1.0
    if not b > 0:
        raise DomainError(f"solved load n={n:.4g} is too small for b = n^(2 delta - 1) - 1 > 0")
    return OverdispersedSpec(a=n / b, b=b, beta=beta)


@dataclass(frozen=True)
class RobustHedge:
    """Corrected hedge and scale of the robust approximation."""

    beta_n: float
    sigma_tilde: float


def robust_hedge(spec: OverdispersedSpec) -> RobustHedge:
    """The corrected hedge beta_n < beta and the corrected scale sigma_tilde."""
    beta, b = spec.beta, spec.b
    beta_n = beta * math.sqrt(1.0 - 1.0 / (1.0 + b + spec.sigma / beta))
    sigma_tilde = beta_n * (b + spec.rho) / (1.0 - spec.rho)
    return RobustHedge(beta_n=beta_n, sigma_tilde=sigma_tilde)


def saddle_point(spec: OverdispersedSpec) -> float:
    """Real saddle point (b + 1) / (b + rho) > 1 of the Pollaczek integrand."""
    return (spec.b + 1.0) / (spec.b + spec.rho)


def classic_measures(spec: OverdispersedSpec) -> dict[str, float]:
    """Gaussian-random-walk approximations scaled by the arrival std."""
    m = grw.grw_moments_integral(spec.beta)
    return {
        "mean_queue": spec.sigma * m.mean,
        "variance_queue": spec.sigma2 * m.variance,
        "p_empty": m.p0,
    }


def robust_measures(spec: OverdispersedSpec) -> dict[str, float]:
    """Saddle-point approximations with the corrected hedge and scale.

    The mean is ``sigma_tilde E[M(beta_n)]``.  The variance carries an
    extra factor ``(z + 1) / 2`` at the saddle point z, and the log of the
    empty probability is divided by z.
    """
    hedge = robust_hedge(spec)
    z = saddle_point(spec)
    m = grw.grw_moments_integral(hedge.beta_n)
    return {
        "mean_queue": hedge.sigma_tilde * m.mean,
        "variance_queue": hedge.sigma_tilde**2 * m.variance * (z + 1.0) / 2.0,
        "p_empty": math.exp(math.log(m.p0) / z),
    }


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountSample:
    """Observed arrival counts per period."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("need a one-dimensional sample of at least two counts")
        if np.any(arr < 0) or np.any(arr != np.floor(arr)):
            raise DomainError("counts must be nonnegative integers")
        object.__setattr__(self, "counts", arr.astype(np.int64))

    @property
    def n_obs(self) -> int:
        return int(self.counts.size)

    @property
    def sample_mean(self) -> float:
        return float(self.counts.mean())

    @property
    def sample_variance(self) -> float:
        return float(self.counts.var(ddof=1))


def _ratio(sample: CountSample) -> float:
    if not sample.sample_mean > 0:
        raise DomainError("degenerate sample: zero mean")
    return sample.sample_variance / sample.sample_mean


def dispersion_test(sample: CountSample, alpha: float = 0.05) -> dict[str, float | bool]:
    """Chi-square dispersion test of the Poisson hypothesis.

    Returns:
        ``statistic`` (N - 1) S^2 / mean, its upper-tail ``p_value`` under
        chi-square with N - 1 degrees of freedom, and ``reject``.
    """
    stat = (sample.n_obs - 1) * _ratio(sample)
    p = float(stats.chi2.sf(stat, sample.n_obs - 1))
    return {"statistic": stat, "p_value": p, "reject": p < alpha}


def neyman_scott_test(sample: CountSample, alpha: float = 0.05) -> dict[str, float | bool]:
    """Normal-approximation test on sqrt(N/2) (S^2 / mean - 1)."""
    stat = math.sqrt(sample.n_obs / 2.0) * (_ratio(sample) - 1.0)
    p = float(stats.norm.sf(stat))
    return {"statistic": stat, "p_value": p, "reject": p < alpha}


def _profile_loglik(r: float, counts: np.ndarray, mean: float) -> float:
    # sum_{j=1}^{x} ln(r + j - 1) = lnGamma(r + x) - lnGamma(r)
    inner = float(np.mean(gammaln(r + counts) - gammaln(r)))
    return inner + r * math.log(r) - (r + mean) * math.log(r + mean)


def fit_gamma_poisson(sample: CountSample) -> dict[str, float]:
    """Maximum-likelihood Gamma-Poisson fit via the negative-binomial profile.

    The profile log-likelihood in the NB size r is maximised over
    r in (1e-3, 1e6) on a log scale; then ``a_hat = r`` and
    ``b_hat = mean / r`` so that ``a_hat * b_hat`` equals the sample mean.

    Raises:
        MethodInapplicableError: if the sample is not overdispersed.
    """
    mean, var = sample.sample_mean, sample.sample_variance
    if not var > mean:
        raise MethodInapplicableError("sample is not overdispersed; a Gamma-Poisson fit does not apply")
    counts = sample.counts

    def neg(log_r: float) -> float:
        return -_profile_loglik(math.exp(log_r), counts, mean)

    res = optimize.minimize_scalar(
        neg, bounds=(math.log(1e-3), math.log(1e6)), method="bounded", options={"xatol": 1e-10}
    )
    r = math.exp(res.x)
    return {"a_hat": r, "b_hat": mean / r, "loglik": -float(res.fun)}
