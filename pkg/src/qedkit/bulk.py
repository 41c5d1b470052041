"""Stationary measures of the discrete bulk-service queue.

The queue evolves per period as ``Q' = max(Q + A - s, 0)`` with i.i.d.
arrivals ``A`` (Poisson or Gamma-Poisson) and service capacity ``s``.  The
stationary mean, variance and empty probability are computed by three
routes that share nothing beyond the arrival law:

* the s - 1 roots of ``z^s = A(z)`` inside the unit disk,
* contour integrals of Pollaczek type on a circle just outside the disk,
* partial Spitzer sums over the arrival totals of k periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError, InstabilityError, MethodInapplicableError, NumericalError


# ---------------------------------------------------------------------------
# Arrival laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Poisson:
    """Poisson arrivals with mean ``lam`` per period."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError("Poisson mean must be positive")

    def mean(self) -> float:
        return self.lam

    def variance(self) -> float:
        return self.lam

    def log_pgf(self, z):
        """Principal logarithm of the pgf, analytic on the whole plane."""
        return self.lam * (np.asarray(z) - 1.0)

    def dlog_pgf(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.lam)

    def pgf(self, z):
        return np.exp(self.log_pgf(z))

    def dpgf(self, z):
        return self.lam * self.pgf(z)

    def sum_of(self, k: int):
        """Frozen scipy distribution of the total over k periods."""
        return stats.poisson(k * self.lam)


@dataclass(frozen=True)
class GammaPoisson:
    """Poisson arrivals whose mean is Gamma(shape=a, scale=b) distributed.

    Equivalently negative binomial with pgf ``(1 + b (1 - z))^(-a)``, mean
    ``a b`` and variance ``a b (b + 1)``.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise DomainError("Gamma-Poisson parameters a and b must be positive")

    def mean(self) -> float:
        return self.a * self.b

    def variance(self) -> float:
        return self.a * self.b * (self.b + 1.0)

    def log_pgf(self, z):
        # 1 + b(1 - z) has positive real part on |z| < 1 + 1/b, so the
        # principal logarithm is analytic where we need it.
        return -self.a * np.log(1.0 + self.b * (1.0 - np.asarray(z, dtype=complex)))

    def dlog_pgf(self, z):
        return self.a * self.b / (1.0 + self.b * (1.0 - np.asarray(z, dtype=complex)))

    def pgf(self, z):
        return np.exp(self.log_pgf(z))

    def dpgf(self, z):
        return self.dlog_pgf(z) * self.pgf(z)

    def sum_of(self, k: int):
        # NB with n = k a successes and success probability 1/(1+b).
        return stats.nbinom(k * self.a, 1.0 / (1.0 + self.b))


ArrivalLaw = Poisson | GammaPoisson


@dataclass(frozen=True)
class BulkSpec:
    """Arrival law plus per-period service capacity ``s``."""

    arrivals: ArrivalLaw
    s: int

    def __post_init__(self) -> None:
        if int(self.s) != self.s or self.s < 1:
            raise DomainError("capacity s must be a positive integer")
        if self.arrivals.mean() >= self.s:
            raise InstabilityError(
                f"bulk queue unstable: mean arrivals {self.arrivals.mean():.6g} >= s={self.s}"
            )

    @property
    def rho(self) -> float:
        return self.arrivals.mean() / self.s


@dataclass(frozen=True)
class RootSet:
    """Roots of z^s = A(z) in the open unit disk, indexed k = 1..s-1."""

    roots: np.ndarray
    residual: float
    method: str = field(default="")


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------

def _residual(spec: BulkSpec, z: np.ndarray) -> float:
    if z.size == 0:
        return 0.0
    return float(np.max(np.abs(z**spec.s - spec.arrivals.pgf(z))))


def _check_roots(spec: BulkSpec, z: np.ndarray, method: str) -> RootSet:
    res = _residual(spec, z)
    if z.size and np.max(np.abs(z)) >= 1.0:
        raise NumericalError(f"{method}: a root left the unit disk")
    if res > 1e-10:
        raise ConvergenceError(f"{method}: residual {res:.3e} exceeds 1e-10")
    return RootSet(roots=z, residual=res, method=method)


def find_roots_iter(spec: BulkSpec, max_iter: int = 100_000) -> RootSet:
    """Roots by successive substitution z <- w_k A(z)^(1/s), then Newton polish.

    Each root carries its seed ``w_k = exp(2 pi i k / s)``; the iteration
    starts at 0 and is run for all k simultaneously.

    Raises:
        MethodInapplicableError: if the map is not a contraction on the
            closed unit disk (checked on a 256-point circle grid).
        ConvergenceError: if some root fails to settle within ``max_iter``.
    """
    s = spec.s
    law = spec.arrivals
    if s == 1:
        return RootSet(np.empty(0, dtype=complex), 0.0, "iteration")
    circle = np.exp(2j * np.pi * np.arange(256) / 256)
    deriv = np.abs(np.exp(law.log_pgf(circle) / s) * law.dlog_pgf(circle) / s)
    if np.max(deriv) >= 1.0:
        raise MethodInapplicableError("successive substitution is not a contraction on |z| <= 1")

    w = np.exp(2j * np.pi * np.arange(1, s) / s)
    z = np.zeros(s - 1, dtype=complex)
    done = np.zeros(s - 1, dtype=bool)
    for _ in range(max_iter):
        z_new = w * np.exp(law.log_pgf(z) / s)
        step = np.abs(z_new - z)
        z = z_new
        # Substitution contracts like rho near z = 1; stop early and let
        # Newton finish from a point well inside the basin.
        done |= step < 1e-10
        if done.all():
            break
    else:
        worst = int(np.argmax(step)) + 1
        raise ConvergenceError(f"root iteration stalled; worst index k={worst}, step={step.max():.2e}")
    z = _newton_polish(law, s, w, z)
    return _check_roots(spec, z, "iteration")


def _newton_polish(law, s: int, w: np.ndarray, z: np.ndarray, steps: int = 30) -> np.ndarray:
    """Newton on h(z) = z - w A(z)^(1/s), which keeps each root on its branch."""
    for _ in range(steps):
        phi = w * np.exp(law.log_pgf(z) / s)
        h = z - phi
        dh = 1.0 - phi * law.dlog_pgf(z) / s
        delta = h / dh
        z = z - delta
        if np.max(np.abs(delta)) < 1e-16:
            break
    return z


def bl_radius(law: GammaPoisson, s: int) -> float:
    """Radius of convergence of the Lagrange series, in units of |w| = 1."""
    rho = law.mean() / s
    b = law.b
    inv = ((b + rho) / (b + 1.0)) ** (rho / b + 1.0) * (1.0 / rho) ** (rho / b)
    return 1.0 / inv


def find_roots_bl(spec: BulkSpec, margin: float = 1.05, tol: float = 1e-17) -> RootSet:
    """Roots of z^s = (1 + b(1 - z))^(-a) by Lagrange inversion.

    With alpha = a / s each root is the power series
    ``sum_l c_l w_k^l`` whose coefficients are ratios of Gamma functions.
    Folding the coefficients modulo s and applying one FFT evaluates the
    series at every seed at once.

    Raises:
        MethodInapplicableError: for non Gamma-Poisson arrivals, or when the
            convergence radius is below ``margin``.
    """
    law = spec.arrivals
    if not isinstance(law, GammaPoisson):
        raise MethodInapplicableError("Lagrange-series roots need Gamma-Poisson arrivals")
    s = spec.s
    if s == 1:
        return RootSet(np.empty(0, dtype=complex), 0.0, "lagrange")
    radius = bl_radius(law, s)
    if radius < margin:
        raise MethodInapplicableError(
            f"Lagrange series radius {radius:.4f} below margin {margin}; load too close to capacity"
        )
    alpha = law.a / s
    b = law.b
    log_x = math.log(b) - (alpha + 1.0) * math.log1p(b)
    log_pref = math.log1p(b) - math.log(b)
    folded = np.zeros(s, dtype=float)
    max_terms = int(60.0 / math.log(radius)) + 50
    for l in range(1, max_terms + 1):
        log_c = gammaln(l * alpha + l - 1.0) - gammaln(l * alpha) - gammaln(l + 1.0) + log_pref + l * log_x
        c = math.exp(log_c)
        folded[l % s] += c
        if c < tol:
            break
    else:
        raise ConvergenceError("Lagrange series did not reach tolerance")
    # sum_j folded[j] exp(2 pi i k j / s) = s * ifft(folded)[k]
    z_all = s * np.fft.ifft(folded)
    z = z_all[1:]
    return _check_roots(spec, z, "lagrange")


# ---------------------------------------------------------------------------
# Measures from the roots
# ---------------------------------------------------------------------------

def exact_measures_roots(spec: BulkSpec, roots: RootSet | None = None) -> dict[str, float]:
    """Mean queue length and empty probability from the interior roots."""
    if roots is None:
        roots = find_roots_iter(spec)
    if roots.residual >= 1e-10:
        raise NumericalError("root residual too large for the root-based measures")
    law, s = spec.arrivals, spec.s
    mu, var = law.mean(), law.variance()
    z = roots.roots
    total = np.sum(1.0 / (1.0 - z))
    log_prod = np.sum(np.log(z / (z - 1.0)))
    if abs(total.imag) > 1e-8 * max(1.0, abs(total)) or abs(math.remainder(log_prod.imag, 2 * math.pi)) > 1e-8:
        raise NumericalError("conjugate root sums left an imaginary residue")
    mean = var / (2.0 * (s - mu)) - (s - 1.0 + mu) / 2.0 + float(total.real)
    log_empty = math.log(s - mu) - float(np.real(law.log_pgf(0.0))) + float(log_prod.real)
    p_empty = math.exp(log_empty)
    return {"mean_queue": mean, "p_empty": p_empty}


# ---------------------------------------------------------------------------
# Pollaczek contour integrals
# ---------------------------------------------------------------------------

def super_unit_root(spec: BulkSpec) -> float:
    """The unique real zero r0 > 1 of z^s - A(z).

    Works with ``h(x) = s log x - log A(x)``: h(1) = 0, h'(1) = s - mean > 0,
    and h eventually turns negative, either because the pgf grows faster
    (Poisson) or because it has a pole at 1 + 1/b (Gamma-Poisson).
    """
    law, s = spec.arrivals, spec.s
    cap = 1.0 + 1.0 / law.b if isinstance(law, GammaPoisson) else math.inf

    def h(x: float) -> float:
        if x >= cap:
            return -math.inf
        return s * math.log(x) - float(np.real(law.log_pgf(x)))

    lo = 1.0 + 1e-7
    if h(lo) <= 0:
        raise NumericalError("no sign change just right of z = 1")
    step = 1e-6
    hi = 1.0 + step
    while h(hi) > 0:
        lo = hi
        step *= 2.0
        hi = 1.0 + step
        if step > 1e6:
            raise NumericalError("no super-unit zero found")
    while not math.isfinite(h(hi)):
        # stepped past the pole of the pgf: bisect towards it from lo
        mid = 0.5 * (lo + min(hi, cap))
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return optimize.brentq(h, lo, hi, xtol=1e-15, rtol=1e-15)


def _contour_integrals(spec: BulkSpec, radius: float, n: int) -> tuple[complex, complex, complex]:
    s, law = spec.s, spec.arrivals
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    z = radius * np.exp(1j * theta)
    # g = (z^s - A)' / (z^s - A), written with A / z^s to avoid overflow.
    ratio = np.exp(law.log_pgf(z) - s * np.log(z))
    g = (s / z - law.dpgf(z) / np.exp(s * np.log(z))) / (1.0 - ratio)
    # (1 / 2 pi i) oint f dz  =  mean over the grid of f(z) z
    log_term = -np.log1p(-1.0 / z)
    i_empty = np.mean(log_term * g * z)
    i_mean = np.mean(g / (1.0 - z) * z)
    i_var = np.mean(-z / (1.0 - z) ** 2 * g * z)
    return i_empty, i_mean, i_var


def pollaczek_measures(spec: BulkSpec, tol: float = 1e-10, n0: int = 256) -> dict[str, float]:
    """Mean, variance and empty probability by contour quadrature.

    The circle radius sits halfway between 1 and the super-unit zero r0;
    the trapezoidal rule on a circle converges geometrically, and the point
    count doubles until successive results agree within ``tol``.
    """
    r0 = super_unit_root(spec)
    if not r0 > 1.0:
        raise NumericalError("contour radius bracket failed")
    radius = 1.0 + 0.5 * (r0 - 1.0)
    n = n0
    prev = _contour_integrals(spec, radius, n)
    while True:
        n *= 2
        cur = _contour_integrals(spec, radius, n)
        diff = max(abs(a - b) for a, b in zip(cur, prev))
        if diff < tol * max(1.0, abs(cur[1]), abs(cur[2])):
            break
        if n > 2**24:
            raise ConvergenceError("contour quadrature did not converge")
        prev = cur
    i_empty, i_mean, i_var = cur
    return {
        "mean_queue": float(i_mean.real),
        "variance_queue": float(i_var.real),
        "p_empty": float(math.exp(i_empty.real)),
    }


# ---------------------------------------------------------------------------
# Spitzer partial sums
# ---------------------------------------------------------------------------

def _positive_part_moments(dist, c: int) -> tuple[float, float, float]:
    """E[(X-c)^+], E[((X-c)^+)^2] and P(X > c) for an integer law.

    Sums whichever side of c is lighter.  Summing only the far side keeps
    the result free of cancellation; the near side is used when c is below
    the mean, where the identity with the full moments is benign.
    """
    mean, var = float(dist.mean()), float(dist.var())
    tail = float(dist.sf(c))
    if c >= mean:
        # pmf tails of Poisson and negative binomial decay geometrically,
        # so 40 standard deviations past c is far beyond double precision.
        top = c + int(40.0 * math.sqrt(var)) + 50
        x = np.arange(c + 1, top + 1)
        p = dist.pmf(x)
        d = x - c
        return float(np.sum(d * p)), float(np.sum(d * d * p)), tail
    x = np.arange(c + 1)
    p = dist.pmf(x)
    d = c - x
    lower1, lower2 = float(np.sum(d * p)), float(np.sum(d * d * p))
    m = mean - c
    return m + lower1, var + m * m - lower2, tail


def spitzer_truncated(spec: BulkSpec, terms: int) -> dict[str, float]:
    """Partial Spitzer sums over k = 1..terms.

    With ``S_k`` the total arrivals of k periods, the sums are
    ``sum (1/k) E[(S_k - k s)^+]`` (mean), ``sum (1/k) E[((S_k - k s)^+)^2]``
    (variance) and ``exp(-sum (1/k) P(S_k > k s))`` (empty probability).
    Each term is evaluated exactly from the finite lower part of the pmf,
    so the only error is truncation: the mean and variance sums increase
    to their limits, the empty-probability bound decreases to its limit.
    """
    if terms < 1:
        raise DomainError("need at least one Spitzer term")
    law, s = spec.arrivals, spec.s
    mean = var = log_empty = 0.0
    for k in range(1, terms + 1):
        first, second, tail = _positive_part_moments(law.sum_of(k), k * s)
        mean += first / k
        var += second / k
        log_empty -= tail / k
    return {
        "mean_queue_lower": max(mean, 0.0),
        "variance_queue_lower": max(var, 0.0),
        "p_empty_upper": math.exp(log_empty),
    }
