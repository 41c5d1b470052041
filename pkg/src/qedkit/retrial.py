"""QED limits with slow retrials, corrected by a fixed point.

Three loss-or-abandonment systems are covered: the M/M/s/n queue ("basic"),
the two-stage cloud tandem, and the Erlang-A queue.  Without retrials each
has a limiting delay probability ``g`` and a limiting scaled loss
``f = sqrt(R) P(loss)``.  With slow retrials the lost volume
``alpha sqrt(R)`` comes back as extra load, which shifts the hedges; alpha
solves ``alpha = f(shifted hedges)``.

All limit functions accept any real ``beta``: the fixed point frequently
pushes the effective hedge ``beta - alpha`` to zero or below, where the
displayed quotients have removable singularities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConvergenceError, DomainError
from .specfun import normal_hazard, std_normal_cdf, std_normal_pdf

# Gauss-Legendre nodes on [0, 1] for the smooth averages below.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class QedHedge:
    """Server hedge ``beta`` and space hedge ``gamma``."""

    beta: float
    gamma: float = math.inf


@dataclass(frozen=True)
class CloudHedge:
    """Hedges of the cloud tandem plus the second-stage rate ``kappa``."""

    beta: float
    gamma: float
    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")


@dataclass(frozen=True)
class ShiftRule:
    """How the retrial volume alpha shifts the hedges.

    ``beta`` always becomes ``beta - alpha``.  ``gamma_factor`` is the
    coefficient c in ``gamma - c * alpha``: 0 for the basic model,
    1/sqrt(kappa) for the cloud model, 1/sqrt(r) for Erlang-R holding.
    ``return_fraction`` is the share q of lost customers that come back.
    """

    gamma_factor: float = 0.0
    return_fraction: float = 1.0

    def apply(self, beta: float, gamma: float, alpha: float) -> tuple[float, float]:
        shift = self.return_fraction * alpha
        return beta - shift, gamma - self.gamma_factor * shift


@dataclass(frozen=True)
class FixedPointSolution:
    """Solution alpha of alpha = f(shifted hedges)."""

    alpha: float
    effective_beta: float
    effective_gamma: float
    residual: float


# ---------------------------------------------------------------------------
# Limit functions
# ---------------------------------------------------------------------------

def _mills_ratio(beta: float) -> float:
    """Phi(beta) / phi(beta) without overflow for large |beta|."""
    # Phi(beta) = exp(-beta^2/2) erfcx(-beta/sqrt2)/2
    return math.sqrt(2.0 * math.pi) * 0.5 * special.erfcx(-beta / math.sqrt(2.0))


def _loss_weight(beta: float, gamma: float) -> float:
    """(1 - exp(-beta gamma)) / beta, equal to gamma at beta = 0."""
    x = beta * gamma
    if abs(x) < 1e-12:
        return gamma
    return -math.expm1(-x) / beta


def finite_queue_limits(beta: float, gamma: float) -> dict[str, float]:
    """Delay limit g and scaled blocking limit f of the M/M/s/n queue.

    With ``s = R + beta sqrt(R)`` and ``n = s + gamma sqrt(R)``.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if math.isinf(gamma):
        w = 1.0 / beta if beta > 0 else math.inf
        if not beta > 0:
            raise DomainError("an infinite waiting room needs beta > 0")
        denom = w + _mills_ratio(beta)
        return {"g": float(w / denom), "f": 0.0}
    w = _loss_weight(beta, gamma)
    denom = w + _mills_ratio(beta)
    return {"g": float(w / denom), "f": float(math.exp(-beta * gamma) / denom)}


def erlang_a_limits(beta: float, theta: float) -> dict[str, float]:
    """Delay limit g_a and scaled abandonment limit f_a of the Erlang-A queue.

    ``theta`` is the abandonment rate relative to the service rate.
    """
    if not theta > 0:
        raise DomainError("theta must be positive")
    root = math.sqrt(theta)
    ratio = root * normal_hazard(beta / root) / normal_hazard(-beta)
    g = 1.0 / (1.0 + ratio)
    f = (root * normal_hazard(beta / root) - beta) * g
    return {"g_a": float(g), "f_a": float(f)}


def _cloud_stage1_integral(beta: float, gamma: float, kappa: float) -> float:
    """Integral of Phi(gamma + (beta - t) sqrt(kappa)) phi(t) over t < beta."""
    rk = math.sqrt(kappa)

    def f(t: float) -> float:
        return special.ndtr(gamma + (beta - t) * rk) * math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)

    val, err = integrate.quad(f, -np.inf, beta, epsabs=1e-15, epsrel=1e-13, limit=200)
    if not math.isfinite(val) or err > 1e-9:
        raise ConvergenceError(f"stage-one integral failed (err={err:.2e})")
    return val


def _tilted_tail(t: np.ndarray, gamma: float, kappa: float) -> np.ndarray:
    """u(t) = exp(-gamma t / sqrt k + t^2 / (2k)) Phi(gamma - t / sqrt k)."""
    rk = math.sqrt(kappa)
    return np.exp(-gamma * t / rk + t * t / (2.0 * kappa) + special.log_ndtr(gamma - t / rk))


def cloud_limits(beta: float, gamma: float, kappa: float) -> dict[str, float]:
    """Delay limit g_c and scaled blocking limit f_c of the cloud tandem.

    Capacities scale as ``s = R + beta sqrt(R)`` and
    ``n = s + R/kappa + gamma sqrt(R/kappa)``.

    The difference ``xi1 - xi2`` of the closed form has a removable
    singularity at beta = 0.  It is evaluated as ``phi(beta)`` times the
    average over [0, beta] of ``-u'(t)``, which is smooth, so negative
    effective hedges produced by the fixed point are handled as well.

    Returns:
        dict with ``g_c``, ``f_c`` and the intermediates ``eta``,
        ``xi_diff`` (xi1 - xi2) and ``nu``.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    rk = math.sqrt(kappa)
    eta = _cloud_stage1_integral(beta, gamma, kappa)
    t = beta * _GL_X
    u = _tilted_tail(t, gamma, kappa)
    # -u'(t) = phi(gamma)/sqrt k + (gamma/sqrt k - t/k) u(t)
    minus_du = std_normal_pdf(gamma) / rk + (gamma / rk - t / kappa) * u
    xi_diff = std_normal_pdf(beta) * float(np.dot(_GL_W, minus_du))
    beta_xi2 = std_normal_pdf(beta) * float(_tilted_tail(np.array([beta]), gamma, kappa)[0])
    c = math.sqrt(1.0 + kappa)
    nu = (
        math.sqrt(kappa / (1.0 + kappa))
        * std_normal_pdf((gamma + beta * rk) / c)
        * std_normal_cdf((beta - gamma * rk) / c)
        + beta_xi2
    )
    denom = eta + xi_diff
    return {"g_c": xi_diff / denom, "f_c": nu / denom, "eta": eta, "xi_diff": xi_diff, "nu": nu}


# ---------------------------------------------------------------------------
# Fixed point
# ---------------------------------------------------------------------------

def solve_retrial_fixed_point(
    limit_f: Callable[[float, float], float],
    beta: float,
    gamma: float = 0.0,
    rule: ShiftRule = ShiftRule(),
    tol: float = 1e-13,
) -> FixedPointSolution:
    """Solve ``alpha = limit_f(*rule.apply(beta, gamma, alpha))``.

    The root is bracketed in ``Delta = beta - q alpha``: at alpha = 0 the
    residual ``limit_f - alpha`` is positive, and the lower end is pushed
    down until the residual changes sign.

    Raises:
        DomainError: if beta <= 0.
        ConvergenceError: if no sign change is found.
    """
    if not beta > 0:
        raise DomainError("the fixed point needs beta > 0")

    def resid(alpha: float) -> float:
        b, g = rule.apply(beta, gamma, alpha)
        return limit_f(b, g) - alpha

    r0 = resid(0.0)
    if r0 <= 0.0:
        return FixedPointSolution(0.0, beta, gamma, abs(r0))
    hi = max(1.0, 2.0 * r0)
    samples = [(0.0, r0)]
    while True:
        rh = resid(hi)
        samples.append((hi, rh))
        if rh < 0:
            break
        hi *= 2.0
        if hi > 1e4:
            raise ConvergenceError(f"no bracket for the fixed point; samples {samples}")
    alpha = optimize.brentq(resid, 0.0, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    b, g = rule.apply(beta, gamma, alpha)
    res = abs(resid(alpha))
    if res > 1e-10:
        raise ConvergenceError(f"fixed-point residual {res:.2e} above 1e-10")
    return FixedPointSolution(alpha=alpha, effective_beta=b, effective_gamma=g, residual=res)


def basic_fixed_point(beta: float, gamma: float) -> FixedPointSolution:
    return solve_retrial_fixed_point(lambda b, g: finite_queue_limits(b, g)["f"], beta, gamma)


def cloud_fixed_point(beta: float, gamma: float, kappa: float) -> FixedPointSolution:
    rule = ShiftRule(gamma_factor=1.0 / math.sqrt(kappa))
    return solve_retrial_fixed_point(lambda b, g: cloud_limits(b, g, kappa)["f_c"], beta, gamma, rule)


def abandon_fixed_point(beta: float, theta: float, return_fraction: float = 1.0) -> FixedPointSolution:
    """Fixed point for Erlang-A with a fraction q of abandoners retrying."""
    if not 0.0 <= return_fraction <= 1.0:
        raise DomainError("return fraction must lie in [0, 1]")
    rule = ShiftRule(return_fraction=return_fraction)
    return solve_retrial_fixed_point(lambda b, _g: erlang_a_limits(b, theta)["f_a"], beta, 0.0, rule)


def approx_with_retrials(model: str, R: float, **params: float) -> dict[str, float]:
    """Descaled delay and loss approximations with slow retrials.

    Args:
        model: ``"basic"`` (params beta, gamma), ``"cloud"`` (beta, gamma,
            kappa) or ``"abandon"`` (beta, theta, optional q).
        R: Offered load.

    Returns:
        dict with ``delay_prob``, ``loss_prob`` (block or abandon,
        ``alpha / sqrt(R)``), ``scaled_loss`` (alpha) and ``alpha``.
    """
    if not R > 0:
        raise DomainError("offered load must be positive")
    if model == "basic":
        sol = basic_fixed_point(params["beta"], params["gamma"])
        delay = finite_queue_limits(sol.effective_beta, sol.effective_gamma)["g"]
    elif model == "cloud":
        sol = cloud_fixed_point(params["beta"], params["gamma"], params["kappa"])
        delay = cloud_limits(sol.effective_beta, sol.effective_gamma, params["kappa"])["g_c"]
    elif model == "abandon":
        sol = abandon_fixed_point(params["beta"], params["theta"], params.get("q", 1.0))
        delay = erlang_a_limits(sol.effective_beta, params["theta"])["g_a"]
    else:
        raise DomainError(f"unknown model {model!r}")
    return {
        "delay_prob": delay,
        "loss_prob": sol.alpha / math.sqrt(R),
        "scaled_loss": sol.alpha,
        "alpha": sol.alpha,
    }
