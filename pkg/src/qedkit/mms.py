"""Exact steady-state evaluation of Markovian many-server queues.

Covers the M/M/s queue (Erlang-C), the M/M/s/s loss system (Erlang-B), the
finite-room M/M/s/n queue and the Erlang-A queue with exponential patience.
Everything is computed from birth-death balance equations in log space, so
offered loads in the thousands pose no overflow problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError, InstabilityError


@dataclass(frozen=True)
class MmsSpec:
    """Arrival rate, service rate and server count of an M/M/s queue."""

    lam: float
    mu: float
    s: int

    def __post_init__(self) -> None:
        if not (self.lam > 0 and self.mu > 0):
            raise DomainError("arrival and service rates must be positive")
        if int(self.s) != self.s or self.s < 1:
            raise DomainError("server count must be a positive integer")

    @property
    def load(self) -> float:
        """Offered load lam/mu."""
        return self.lam / self.mu

    @property
    def rho(self) -> float:
        """Per-server utilisation lam/(s mu)."""
        return self.lam / (self.s * self.mu)


@dataclass(frozen=True)
class FiniteMmsSpec:
    """M/M/s queue with room for at most ``n`` customers in total."""

    base: MmsSpec
    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < self.base.s:
            raise DomainError("capacity n must be an integer with n >= s")


@dataclass(frozen=True)
class AbandonSpec:
    """M/M/s queue where waiting customers leave at rate ``theta``."""

    base: MmsSpec
    theta: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise DomainError("abandonment rate theta must be positive")


@dataclass(frozen=True)
class MmsDistribution:
    """Stationary queue-length law of a stable M/M/s queue.

    ``log_weights`` holds the unnormalised log masses of states 0..s; above s
    the masses decay geometrically with ratio ``rho`` and the tail is summed
    in closed form.
    """

    spec: MmsSpec
    log_weights: np.ndarray
    log_norm: float

    def pmf(self, k: int | np.ndarray) -> np.ndarray | float:
        """Probability of k customers in the system."""
        k_arr = np.asarray(k)
        s = self.spec.s
        lw = np.where(
            k_arr <= s,
            self.log_weights[np.minimum(k_arr, s)],
            self.log_weights[s] + (k_arr - s) * math.log(self.spec.rho),
        )
        out = np.exp(lw - self.log_norm)
        return float(out) if out.ndim == 0 else out

    def tail_mass(self, k: int) -> float:
        """P(queue length >= k) for k >= s, in closed form."""
        s = self.spec.s
        if k < s:
            return float(np.sum(self.pmf(np.arange(k, s)))) + self.tail_mass(s)
        rho = self.spec.rho
        return math.exp(self.log_weights[s] + (k - s) * math.log(rho) - self.log_norm) / (1.0 - rho)


def _log_birth_death_up_to_s(load: float, s: int) -> np.ndarray:
    k = np.arange(s + 1)
    return k * math.log(load) - gammaln(k + 1)


def mms_stationary(spec: MmsSpec) -> MmsDistribution:
    """Stationary distribution of the M/M/s queue.

    Raises:
        InstabilityError: if lam >= s mu.
    """
    if spec.rho >= 1.0:
        raise InstabilityError(f"M/M/s unstable: rho={spec.rho:.6g} >= 1")
    lw = _log_birth_death_up_to_s(spec.load, spec.s)
    tail = lw[spec.s] - math.log1p(-spec.rho)  # states s, s+1, ...
    log_norm = float(logsumexp(np.append(lw[:-1], tail)))
    return MmsDistribution(spec, lw, log_norm)


def erlang_b(load: float, s: int) -> float:
    """Blocking probability of the M/M/s/s loss system (Erlang-B).

    Uses the forward recurrence B(k) = R B(k-1) / (k + R B(k-1)), which is
    numerically stable for any load.
    """
    if load < 0 or not math.isfinite(load):
        raise DomainError("offered load must be finite and nonnegative")
    if int(s) != s or s < 0:
        raise DomainError("server count must be a nonnegative integer")
    b = 1.0
    for k in range(1, int(s) + 1):
        b = load * b / (k + load * b)
    return b


def erlang_c(load: float, s: int) -> float:
    """Delay probability of the M/M/s queue (Erlang-C)."""
    rho = load / s
    if rho >= 1.0:
        raise InstabilityError(f"M/M/s unstable: rho={rho:.6g} >= 1")
    b = erlang_b(load, s)
    return b / (1.0 - rho * (1.0 - b))


def mms_metrics(spec: MmsSpec) -> dict[str, float]:
    """Delay probability, mean wait and mean number waiting for M/M/s."""
    c = erlang_c(spec.load, spec.s)
    wait = c / (spec.s * spec.mu * (1.0 - spec.rho))
    return {"delay_prob": c, "expected_wait": wait, "expected_queue": spec.lam * wait}


def _normalise(logw: np.ndarray) -> np.ndarray:
    return np.exp(logw - logsumexp(logw))


def mmsn_distribution(spec: FiniteMmsSpec) -> np.ndarray:
    """Stationary law over 0..n customers for the M/M/s/n queue."""
    b = spec.base
    k = np.arange(spec.n + 1)
    log_rates = np.log(b.lam) - np.log(np.minimum(k[1:], b.s) * b.mu)
    logw = np.concatenate(([0.0], np.cumsum(log_rates)))
    return _normalise(logw)


def mmsn_metrics(spec: FiniteMmsSpec) -> dict[str, float]:
    """Delay probability, blocking probability and mean wait for M/M/s/n.

    The delay probability counts every arrival that does not find a free
    server, blocked arrivals included, so that n = s gives delay = block.
    The mean wait is that of admitted customers.
    """
    pi = mmsn_distribution(spec)
    s, n = spec.base.s, spec.n
    k = np.arange(n + 1)
    block = float(pi[n])
    delay = float(pi[s:].sum())
    waiting = float(np.sum(np.maximum(k - s, 0) * pi))
    admitted = spec.base.lam * (1.0 - block)
    return {"delay_prob": delay, "block_prob": block, "expected_wait": waiting / admitted}


def _erlang_a_truncation(spec: AbandonSpec, tail_tol: float = 1e-12) -> int:
    """Smallest level K beyond which the geometric tail bound is below tol.

    Above level K the ratio of successive masses is lam / (s mu + (k-s) theta);
    once this ratio drops below 1/2 the remaining tail is at most twice the
    current mass.
    """
    b = spec.base
    k = b.s
    logw = 0.0
    # Walk the chain until masses are small relative to the running maximum.
    best = 0.0
    while True:
        k += 1
        death = b.s * b.mu + (k - b.s) * spec.theta
        ratio = b.lam / death
        logw += math.log(ratio)
        best = max(best, logw)
        if ratio < 0.5 and logw - best < math.log(tail_tol) - 1.0:
            return k


def erlang_a_metrics(spec: AbandonSpec) -> dict[str, float]:
    """Exact delay and abandonment probabilities of the Erlang-A queue.

    Returns:
        dict with ``delay_prob`` (arrival finds all servers busy),
        ``abandon_prob`` (fraction of arrivals that abandon) and
        ``expected_wait`` (mean time in queue over all arrivals).
    """
    b = spec.base
    kmax = _erlang_a_truncation(spec)
    k = np.arange(1, kmax + 1)
    deaths = np.minimum(k, b.s) * b.mu + np.maximum(k - b.s, 0) * spec.theta
    logw = np.concatenate(([0.0], np.cumsum(np.log(b.lam) - np.log(deaths))))
    pi = _normalise(logw)
    kk = np.arange(kmax + 1)
    queue = float(np.sum(np.maximum(kk - b.s, 0) * pi))
    return {
        "delay_prob": float(pi[b.s :].sum()),
        "abandon_prob": spec.theta * queue / b.lam,
        "expected_wait": queue / b.lam,
    }
