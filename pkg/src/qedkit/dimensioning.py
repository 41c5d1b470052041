"""Capacity sizing from QED approximations.

Stationary M/M/s staffing comes in two flavours: meeting a delay target
(square-root rule against exact Erlang-C) and minimising a linear
staffing-plus-waiting cost.  The cloud tandem and the Erlang-R network get
fixed-point-corrected hedges.  Time-varying demand is handled through the
offered load of the corresponding infinite-capacity system, computed by
integrating its linear ODE over one cycle and solving for the periodic
orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from scipy import optimize

from . import mms
from .erlang_r import ErlangRAsymptotics, qed_limits_blocking
from .errors import DomainError
from .retrial import cloud_limits
from .specfun import normal_hazard

DEFAULT_REVIEW_PERIOD = 0.5


# ---------------------------------------------------------------------------
# Stationary M/M/s staffing
# ---------------------------------------------------------------------------

def halfin_whitt_delay(beta: float) -> float:
    """Limiting delay probability ``1 / (1 + beta Phi(beta) / phi(beta))``."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    # Phi/phi(beta) = 1 / hazard(-beta)
    return 1.0 / (1.0 + beta / normal_hazard(-beta))


def solve_beta_for_delay(epsilon: float) -> float:
    """Hedge beta* with ``halfin_whitt_delay(beta*) = epsilon``.

    The delay limit falls strictly from 1 to 0 on (0, inf), so bisection on
    a doubling bracket finds the unique root.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("target must lie in (0, 1)")
    lo, hi = 0.0, 1.0
    while halfin_whitt_delay(hi) > epsilon:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if halfin_whitt_delay(mid) > epsilon:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _min_stable(load: float) -> int:
    return math.floor(load) + 1


def staff_constraint(lam: float, epsilon: float, mu: float = 1.0) -> int:
    """Square-root staffing ``ceil(R + beta* sqrt(R))`` for a delay target."""
    if not (lam > 0 and mu > 0):
        raise DomainError("rates must be positive")
    load = lam / mu
    beta = solve_beta_for_delay(epsilon)
    return max(math.ceil(load + beta * math.sqrt(load)), _min_stable(load))


def staff_exact(lam: float, epsilon: float, mu: float = 1.0) -> int:
    """Fewest servers whose exact Erlang-C delay is at most epsilon."""
    if not (lam > 0 and mu > 0):
        raise DomainError("rates must be positive")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("target must lie in (0, 1)")
    load = lam / mu
    s = _min_stable(load)
    while mms.erlang_c(load, s) > epsilon:
        s += 1
    return s


def approx_cost(beta: float, cost_ratio: float) -> float:
    """Scaled cost ``r beta + g(beta) / beta`` of the hedge beta."""
    return cost_ratio * beta + halfin_whitt_delay(beta) / beta


def optimize_cost_beta(cost_ratio: float) -> float:
    """Minimiser of the strictly convex scaled cost, by golden section."""
    if not cost_ratio > 0:
        raise DomainError("cost ratio must be positive")
    # The cost falls along a doubling grid until it turns; the last three
    # grid points bracket the minimum.
    a, b = 1e-6, 1e-3
    while approx_cost(2.0 * b, cost_ratio) < approx_cost(b, cost_ratio):
        a, b = b, 2.0 * b
    res = optimize.minimize_scalar(
        approx_cost, bracket=(a, b, 2.0 * b), args=(cost_ratio,), method="golden", tol=1e-10
    )
    return float(res.x)


def exact_cost(lam: float, s: int, cost_ratio: float, mu: float = 1.0) -> float:
    """Staffing plus waiting cost ``r (s - R) + lam E[W]`` in units of mu."""
    load = lam / mu
    wait = mms.mms_metrics(mms.MmsSpec(lam, mu, s))["expected_wait"]
    return cost_ratio * (s - load) + lam * wait * mu


def optimize_cost_exact(lam: float, cost_ratio: float, mu: float = 1.0) -> int:
    """Integer minimiser of the exact cost, scanning upward from stability.

    The scan stops once the server cost alone exceeds the best total.
    """
    if not (lam > 0 and mu > 0 and cost_ratio > 0):
        raise DomainError("rates and cost ratio must be positive")
    load = lam / mu
    s = _min_stable(load)
    best_s, best = s, exact_cost(lam, s, cost_ratio, mu)
    while cost_ratio * (s + 1 - load) <= best:
        s += 1
        c = exact_cost(lam, s, cost_ratio, mu)
        if c < best:
            best_s, best = s, c
    return best_s


def staff_cost(lam: float, cost_ratio: float, mu: float = 1.0) -> int:
    """Square-root staffing ``[R + beta* sqrt(R)]`` for the cost objective."""
    load = lam / mu
    beta = optimize_cost_beta(cost_ratio)
    return max(int(np.rint(load + beta * math.sqrt(load))), _min_stable(load))


# ---------------------------------------------------------------------------
# Cloud tandem and Erlang-R stationary hedges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrectedHedges:
    """Hedges attaining the target without retrials, and after correction."""

    beta_target: float
    gamma_target: float
    beta: float
    gamma: float
    alpha: float


def _solve_decreasing(fn: Callable[[float], float], target: float, lo: float, hi: float) -> float:
    """Root of ``fn(x) = target`` for ``fn`` decreasing, widening the bracket."""
    for _ in range(60):
        if fn(lo) > target:
            break
        lo -= max(1.0, abs(lo))
    for _ in range(60):
        if fn(hi) < target:
            break
        hi += max(1.0, abs(hi))
    if not (fn(lo) > target > fn(hi)):
        raise DomainError(f"target {target} unreachable on [{lo}, {hi}]")
    return optimize.brentq(lambda x: fn(x) - target, lo, hi, xtol=1e-13, rtol=1e-14)


def cloud_hedges(epsilon: float, kappa: float, gamma_target: float = 0.0) -> CorrectedHedges:
    """Retrial-corrected cloud hedges reaching delay probability epsilon.

    The pair solving ``g_c = epsilon`` is not unique; the space hedge is
    pinned to ``gamma_target`` and the server hedge solved for.  With
    ``alpha = f_c`` at that pair, the corrected hedges are
    ``(beta + alpha, gamma + alpha / sqrt(kappa))``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("target must lie in (0, 1)")
    beta_eps = _solve_decreasing(lambda b: cloud_limits(b, gamma_target, kappa)["g_c"], epsilon, -2.0, 3.0)
    alpha = cloud_limits(beta_eps, gamma_target, kappa)["f_c"]
    return CorrectedHedges(
        beta_target=beta_eps,
        gamma_target=gamma_target,
        beta=beta_eps + alpha,
        gamma=gamma_target + alpha / math.sqrt(kappa),
        alpha=alpha,
    )


def cloud_capacity(load: float, kappa: float, beta: float, gamma: float) -> tuple[int, int]:
    """``s = ceil(R + beta sqrt R)``, ``n = [s + R/kappa + gamma sqrt(R/kappa)]``."""
    if not load > 0:
        raise DomainError("offered load must be positive")
    s = max(1, math.ceil(load + beta * math.sqrt(load)))
    second = load / kappa
    n = max(s, int(np.rint(s + second + gamma * math.sqrt(second))))
    return s, n


def cloud_stationary_dimensioning(
    load: float, kappa: float, epsilon: float, gamma_target: float = 0.0
) -> dict[str, float]:
    """Server and VM capacities of the cloud tandem for a delay target."""
    h = cloud_hedges(epsilon, kappa, gamma_target)
    s, n = cloud_capacity(load, kappa, h.beta, h.gamma)
    return {"beta_star": h.beta, "gamma_star": h.gamma, "alpha": h.alpha, "s": s, "n": n}


def erlang_r_holding_hedges(
    epsilon: float, r: float, *, beta_target: float | None = None, gamma_target: float | None = None
) -> CorrectedHedges:
    """Hedges for the Erlang-R holding model reaching needy delay epsilon.

    Exactly one of ``beta_target`` and ``gamma_target`` is preset; the other
    solves ``g_b = epsilon``.  The held patients then push both hedges up by
    ``f_b`` and ``f_b / sqrt(r)``.

    Raises:
        DomainError: if the target exceeds what the preset hedge allows
            (``g_b`` never exceeds the Halfin-Whitt delay of beta).
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("target must lie in (0, 1)")
    if (beta_target is None) == (gamma_target is None):
        raise DomainError("preset exactly one of beta_target and gamma_target")

    def g_b(beta: float, gamma: float) -> float:
        return qed_limits_blocking(ErlangRAsymptotics(beta, gamma, r))["g_b"]

    if gamma_target is not None:
        gamma = gamma_target
        beta = _solve_decreasing(lambda b: g_b(b, gamma), epsilon, -2.0, 3.0)
    else:
        beta = beta_target
        # g_b grows with gamma towards the Halfin-Whitt value.
        gamma = -_solve_decreasing(lambda m: g_b(beta, -m), epsilon, -3.0, 3.0)
    alpha = qed_limits_blocking(ErlangRAsymptotics(beta, gamma, r))["f_b"]
    return CorrectedHedges(beta, gamma, beta + alpha, gamma + alpha / math.sqrt(r), alpha)


def erlang_r_capacity(R1: float, r: float, beta: float, gamma: float) -> tuple[int, int]:
    """``s = ceil(R1 + beta sqrt R1)``, ``n = floor(R1/r + gamma sqrt(R1/r))``."""
    if not R1 > 0:
        raise DomainError("offered load must be positive")
    s = max(1, math.ceil(R1 + beta * math.sqrt(R1)))
    beds = R1 / r
    n = max(s, math.floor(beds + gamma * math.sqrt(beds)))
    return s, n


def erlang_r_holding_dimensioning(
    lam: float,
    mu: float,
    delta: float,
    p: float,
    epsilon: float,
    *,
    beta_target: float | None = None,
    gamma_target: float | None = None,
) -> dict[str, float]:
    """Nurses and beds for the holding model at needy delay target epsilon."""
    R1 = lam / ((1.0 - p) * mu)
    r = delta / (delta + p * mu)
    h = erlang_r_holding_hedges(epsilon, r, beta_target=beta_target, gamma_target=gamma_target)
    s, n = erlang_r_capacity(R1, r, h.beta, h.gamma)
    return {"beta": h.beta, "gamma": h.gamma, "alpha": h.alpha, "R1": R1, "r": r, "s": s, "n": n}


# ---------------------------------------------------------------------------
# Time-varying loads
# ---------------------------------------------------------------------------

class CyclicRate(Protocol):
    """A periodic rate function starting at ``start``."""

    start: float
    period: float

    def value_at(self, t: np.ndarray | float) -> np.ndarray | float: ...


@dataclass(frozen=True)
class OfferedLoadCurve:
    """Piecewise-linear periodic curve; the last point closes the cycle."""

    time_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.time_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise DomainError("time grid and values must be matching 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise DomainError("time grid must be strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("values must be finite and nonnegative")
        object.__setattr__(self, "time_grid", t)
        object.__setattr__(self, "values", v)

    @property
    def start(self) -> float:
        return float(self.time_grid[0])

    @property
    def period(self) -> float:
        return float(self.time_grid[-1] - self.time_grid[0])

    def value_at(self, t):
        """Linear interpolation, extended periodically."""
        out = np.interp(np.asarray(t, dtype=float) - self.start, self.time_grid - self.start,
                        self.values, period=self.period)
        return float(out) if np.ndim(out) == 0 else out

    def scaled(self, factor: float) -> "OfferedLoadCurve":
        return OfferedLoadCurve(self.time_grid, factor * self.values)

    @classmethod
    def from_csv(cls, path: str) -> "OfferedLoadCurve":
        """Read ``time,rate`` rows; a header line is skipped when present."""
        data = np.genfromtxt(path, delimiter=",", names=None, comments="#")
        if np.isnan(data[0]).any():
            data = data[1:]
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class SinusoidalRate:
    """``mean + amplitude sin(2 pi t / period)``."""

    mean: float
    amplitude: float
    period: float
    start: float = 0.0

    def __post_init__(self) -> None:
        if not (self.period > 0 and self.mean >= abs(self.amplitude)):
            raise DomainError("need period > 0 and a nonnegative rate")

    def value_at(self, t):
        return self.mean + self.amplitude * np.sin(2.0 * np.pi * np.asarray(t, dtype=float) / self.period)


def ed_day_profile() -> OfferedLoadCurve:
    """Synthetic emergency-department arrivals per hour over one day.

    Quiet nights, a steep morning rise and a long evening decline; with
    mean service time 2 h the offered load peaks near 40.
    """
    hourly = [9.0, 7.5, 6.5, 5.5, 5.0, 5.0, 5.5, 7.0, 10.0, 14.0, 17.0, 19.0, 20.0,
              20.0, 19.5, 19.0, 18.5, 18.0, 17.5, 17.0, 16.0, 14.5, 12.5, 10.5, 9.0]
    return OfferedLoadCurve(np.arange(25.0), np.array(hourly))


def _rk4_cycle(
    matrix: np.ndarray, inflow: np.ndarray, rate: CyclicRate, steps: int, x0: np.ndarray
) -> np.ndarray:
    """RK4 trajectory of ``x' = A x + b rate(t)`` over one cycle."""
    h = rate.period / steps
    xs = np.empty((steps + 1, x0.size))
    xs[0] = x0
    x = x0.copy()
    t0 = rate.start
    for k in range(steps):
        t = t0 + k * h
        l1, l2, l3 = rate.value_at(t), rate.value_at(t + 0.5 * h), rate.value_at(t + h)
        k1 = matrix @ x + inflow * l1
        k2 = matrix @ (x + 0.5 * h * k1) + inflow * l2
        k3 = matrix @ (x + 0.5 * h * k2) + inflow * l2
        k4 = matrix @ (x + h * k3) + inflow * l3
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        xs[k + 1] = x
    return xs


def _periodic_linear_orbit(
    matrix: np.ndarray, inflow: np.ndarray, rate: CyclicRate, step: float
) -> tuple[np.ndarray, np.ndarray]:
    """Periodic RK4 solution of a stable linear system.

    The discrete one-cycle map is affine, ``x(T) = M x(0) + c``; its fixed
    point is the warm start that makes the recorded cycle periodic.
    """
    # RK4 is stable for |h lambda| < 2.78; keep well inside for accuracy.
    fastest = float(np.max(np.abs(np.linalg.eigvals(matrix))))
    step = min(step, 0.25 / fastest)
    steps = max(4, math.ceil(rate.period / step))
    dim = inflow.size
    particular = _rk4_cycle(matrix, inflow, rate, steps, np.zeros(dim))[-1]

    class _Zero:
        start, period = rate.start, rate.period

        @staticmethod
        def value_at(t):
            return 0.0

    monodromy = np.column_stack(
        [_rk4_cycle(matrix, inflow, _Zero, steps, np.eye(dim)[i])[-1] for i in range(dim)]
    )
    x0 = np.linalg.solve(np.eye(dim) - monodromy, particular)
    xs = _rk4_cycle(matrix, inflow, rate, steps, x0)
    grid = rate.start + rate.period * np.arange(steps + 1) / steps
    return grid, xs


def _default_step(rate: CyclicRate) -> float:
    if isinstance(rate, OfferedLoadCurve):
        return float(np.min(np.diff(rate.time_grid))) / 4.0
    return rate.period / 400.0


def mol_offered_load(rate: CyclicRate, mu: float, step: float | None = None) -> OfferedLoadCurve:
    """Mean number in the M_t/M/inf system, ``R' = lambda(t) - mu R``.

    Args:
        rate: Periodic arrival rate.
        mu: Service rate.
        step: RK4 step; defaults to a quarter of the input grid spacing.
    """
    if not mu > 0:
        raise DomainError("service rate must be positive")
    grid, xs = _periodic_linear_orbit(np.array([[-mu]]), np.array([1.0]), rate, step or _default_step(rate))
    return OfferedLoadCurve(grid, np.maximum(xs[:, 0], 0.0))


def psa_offered_load(rate: CyclicRate, mu: float, step: float | None = None) -> OfferedLoadCurve:
    """Instantaneous load ``lambda(t) / mu``, on the same grid as the MOL."""
    h = step or _default_step(rate)
    steps = max(4, math.ceil(rate.period / h))
    grid = rate.start + rate.period * np.arange(steps + 1) / steps
    return OfferedLoadCurve(grid, np.asarray(rate.value_at(grid), dtype=float) / mu)


def erlang_r_offered_load(
    rate: CyclicRate, mu: float, delta: float, p: float, step: float | None = None
) -> tuple[OfferedLoadCurve, OfferedLoadCurve]:
    """Needy and content loads of the infinite Erlang-R network.

    ``R1' = lambda + delta R2 - mu R1`` and ``R2' = p mu R1 - delta R2``.
    """
    if not (mu > 0 and delta > 0 and 0.0 < p < 1.0):
        raise DomainError("need mu, delta > 0 and p in (0, 1)")
    matrix = np.array([[-mu, delta], [p * mu, -delta]])
    grid, xs = _periodic_linear_orbit(matrix, np.array([1.0, 0.0]), rate, step or _default_step(rate))
    xs = np.maximum(xs, 0.0)
    return OfferedLoadCurve(grid, xs[:, 0]), OfferedLoadCurve(grid, xs[:, 1])


def cloud_offered_load(
    load: CyclicRate, kappa: float, step: float | None = None
) -> tuple[OfferedLoadCurve, OfferedLoadCurve]:
    """Host and VM loads for an offered load R(t) (unit set-up rate).

    ``R1' = R - R1`` and ``R2' = R1 - kappa R2``.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    matrix = np.array([[-1.0, 0.0], [1.0, -kappa]])
    grid, xs = _periodic_linear_orbit(matrix, np.array([1.0, 0.0]), load, step or _default_step(load))
    xs = np.maximum(xs, 0.0)
    return OfferedLoadCurve(grid, xs[:, 0]), OfferedLoadCurve(grid, xs[:, 1])


# ---------------------------------------------------------------------------
# Staffing curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StaffingCurve:
    """Integer capacities held constant over consecutive review windows.

    ``time_grid[k]`` is the start of window k; the curve repeats with
    period ``len(time_grid) * review_period``.
    """

    time_grid: np.ndarray
    s_levels: np.ndarray
    n_levels: np.ndarray | None = None
    review_period: float = DEFAULT_REVIEW_PERIOD
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        s = np.asarray(self.s_levels, dtype=np.int64)
        if np.any(s < 1):
            raise DomainError("server levels must be at least 1")
        object.__setattr__(self, "s_levels", s)
        object.__setattr__(self, "time_grid", np.asarray(self.time_grid, dtype=float))
        if self.n_levels is not None:
            n = np.asarray(self.n_levels, dtype=np.int64)
            if n.shape != s.shape or np.any(n < s):
                raise DomainError("need n >= s in every window")
            object.__setattr__(self, "n_levels", n)

    @property
    def period(self) -> float:
        return self.review_period * self.s_levels.size

    def window_index(self, t) -> np.ndarray:
        rel = (np.asarray(t, dtype=float) - self.time_grid[0]) % self.period
        return np.minimum((rel // self.review_period).astype(np.int64), self.s_levels.size - 1)

    def s_at(self, t):
        return self.s_levels[self.window_index(t)]

    def n_at(self, t):
        if self.n_levels is None:
            raise DomainError("this curve has no room levels")
        return self.n_levels[self.window_index(t)]

    def rows(self) -> list[dict[str, float]]:
        out = []
        for k, t in enumerate(self.time_grid):
            row = {"time": float(t), "s": int(self.s_levels[k])}
            if self.n_levels is not None:
                row["n"] = int(self.n_levels[k])
            out.append(row)
        return out


def _windowed(curve: OfferedLoadCurve, rule: Callable[[np.ndarray], np.ndarray], review_period: float):
    """Apply a staffing rule at the midpoint of every review window."""
    windows = int(round(curve.period / review_period))
    if windows < 1 or not math.isclose(windows * review_period, curve.period, rel_tol=1e-9):
        raise DomainError("the review period must divide the cycle length")
    starts = curve.start + review_period * np.arange(windows)
    return starts, rule(np.asarray(curve.value_at(starts + 0.5 * review_period)))


def _sqrt_rule(load: np.ndarray, hedge: float) -> np.ndarray:
    return np.maximum(np.ceil(load + hedge * np.sqrt(load) - 1e-9), 1).astype(np.int64)


def staffing_curve(
    method: str,
    rate: CyclicRate,
    *,
    epsilon: float | None = None,
    mu: float = 1.0,
    review_period: float = DEFAULT_REVIEW_PERIOD,
    kappa: float | None = None,
    delta: float | None = None,
    p: float | None = None,
    beta: float | None = None,
    gamma: float | None = None,
    gamma_target: float = 0.0,
    step: float | None = None,
) -> StaffingCurve:
    """Time-varying capacities with one level per review window.

    Methods:
        ``"PSA"``: ``ceil(lambda(t)/mu + beta* sqrt(.))`` on the
        instantaneous load.
        ``"MOL"``: the same rule on the M_t/M/inf mean.
        ``"CloudMOL"``: ``rate`` is the offered load R(t); corrected cloud
        hedges for ``epsilon`` (space hedge ``gamma_target``), then
        ``s = ceil(R1 + beta sqrt R1)`` and ``n = [s + R2 + gamma sqrt R2]``.
        ``"ErlangR-MOL"``: hedges ``(beta, gamma)`` given directly or
        corrected for ``epsilon`` with ``gamma_target`` preset; then
        ``s = ceil(R1 + beta sqrt R1)`` and
        ``n = floor(R1 + R2 + gamma sqrt(R1 + R2))``.

    The rule is applied to the load at the midpoint of each window.
    """
    if method in ("PSA", "MOL"):
        if epsilon is None:
            raise DomainError(f"{method} needs a delay target")
        hedge = solve_beta_for_delay(epsilon)
        load = psa_offered_load(rate, mu, step) if method == "PSA" else mol_offered_load(rate, mu, step)
        starts, s = _windowed(load, lambda x: _sqrt_rule(x, hedge), review_period)
        return StaffingCurve(starts, s, None, review_period, {"method": method, "beta": hedge})
    if method == "CloudMOL":
        if kappa is None or epsilon is None:
            raise DomainError("CloudMOL needs kappa and a delay target")
        h = cloud_hedges(epsilon, kappa, gamma_target)
        first, second = cloud_offered_load(rate, kappa, step)
        starts, s = _windowed(first, lambda x: _sqrt_rule(x, h.beta), review_period)
        _, r2 = _windowed(second, lambda x: x, review_period)
        n = np.rint(s + r2 + h.gamma * np.sqrt(r2)).astype(np.int64)
        return StaffingCurve(starts, s, np.maximum(n, s), review_period,
                             {"method": method, "beta": h.beta, "gamma": h.gamma})
    if method == "ErlangR-MOL":
        if delta is None or p is None:
            raise DomainError("ErlangR-MOL needs delta and p")
        if beta is None or gamma is None:
            if epsilon is None:
                raise DomainError("ErlangR-MOL needs hedges or a delay target")
            h = erlang_r_holding_hedges(epsilon, delta / (delta + p * mu), gamma_target=gamma_target)
            beta, gamma = h.beta, h.gamma
        needy, content = erlang_r_offered_load(rate, mu, delta, p, step)
        starts, s = _windowed(needy, lambda x: _sqrt_rule(x, beta), review_period)
        _, beds = _windowed(
            OfferedLoadCurve(needy.time_grid, needy.values + content.values), lambda x: x, review_period
        )
        n = np.floor(beds + gamma * np.sqrt(beds) + 1e-9).astype(np.int64)
        return StaffingCurve(starts, s, np.maximum(n, s), review_period,
                             {"method": method, "beta": beta, "gamma": gamma})
    raise DomainError(f"unknown staffing method {method!r}")


def relative_amplitude(levels: np.ndarray) -> float:
    """``(max - min) / mean`` of a level sequence."""
    levels = np.asarray(levels, dtype=float)
    return float((levels.max() - levels.min()) / levels.mean())
