"""Restricted Erlang-R network: nurses, beds, and patients who come back.

A patient occupies a bed from admission to discharge and alternates
between a *needy* state (queueing for or served by one of ``s`` nurses at
rate ``mu``) and a *content* state (resting, rate ``delta``).  After a
nurse visit the patient turns content with probability ``p`` and leaves
otherwise.  At most ``n`` patients hold a bed.  Arrivals that find all beds
full are either lost (blocking model) or wait in an unbounded holding
queue (holding model).

The blocking model has a product-form stationary law and is evaluated in
closed form.  The holding model is a level-independent QBD above level
``n`` and is solved with the matrix-geometric method.  QED limits for the
blocking model and a fixed-point heuristic for holding complete the set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, sparse, special, stats
from scipy.sparse import linalg as splinalg

from .errors import ConsistencyError, ConvergenceError, DomainError, InstabilityError
from .retrial import ShiftRule, solve_retrial_fixed_point
from .specfun import std_normal_cdf, std_normal_pdf


@dataclass(frozen=True)
class ErlangRSpec:
    """Rates and capacities of the restricted Erlang-R network.

    Attributes:
        lam: External arrival rate.
        mu: Nurse service rate per needy visit.
        delta: Rate at which a content patient becomes needy again.
        p: Probability of returning to the content state after a visit.
        s: Number of nurses.
        n: Number of beds, at least ``s``.
    """

    lam: float
    mu: float
    delta: float
    p: float
    s: int
    n: int

    def __post_init__(self) -> None:
        if not (self.lam > 0 and self.mu > 0 and self.delta > 0):
            raise DomainError("rates must be positive")
        if not 0.0 < self.p < 1.0:
            raise DomainError("return probability must lie in (0, 1)")
        if int(self.s) != self.s or int(self.n) != self.n:
            raise DomainError("s and n must be integers")
        if not 1 <= self.s <= self.n:
            raise DomainError("need 1 <= s <= n")

    @property
    def R1(self) -> float:
        """Needy offered load lambda / ((1 - p) mu)."""
        return self.lam / ((1.0 - self.p) * self.mu)

    @property
    def R2(self) -> float:
        """Content offered load p lambda / ((1 - p) delta)."""
        return self.p * self.lam / ((1.0 - self.p) * self.delta)

    @property
    def r(self) -> float:
        """Long-run fraction of bed time a patient spends needy."""
        return self.delta / (self.delta + self.p * self.mu)

    @classmethod
    def from_hedges(
        cls, R1: float, beta: float, gamma: float, mu: float = 1.0, delta: float = 0.1, p: float = 0.9
    ) -> "ErlangRSpec":
        """Capacities from the two-fold square-root rule.

        ``s = ceil(R1 + beta sqrt(R1))`` and
        ``n = round(R1/r + gamma sqrt(R1/r))``, the rounding used by the
        reference blocking tables.
        """
        if not R1 > 0:
            raise DomainError("R1 must be positive")
        r = delta / (delta + p * mu)
        bed_load = R1 / r
        s = max(1, math.ceil(R1 + beta * math.sqrt(R1) - 1e-9))
        n = max(s, int(np.rint(bed_load + gamma * math.sqrt(bed_load))))
        return cls(lam=R1 * (1.0 - p) * mu, mu=mu, delta=delta, p=p, s=s, n=n)


def _log_kappa(j: np.ndarray, s: int) -> np.ndarray:
    """log of j! for j <= s and s! s^(j - s) above."""
    j = np.asarray(j, dtype=float)
    return np.where(j <= s, special.gammaln(j + 1.0), special.gammaln(s + 1.0) + (j - s) * math.log(s))


# ---------------------------------------------------------------------------
# Blocking model
# ---------------------------------------------------------------------------

def blocking_stationary(spec: ErlangRSpec) -> np.ndarray:
    """Product-form stationary law of the blocking model.

    Returns:
        (n+1) x (n+1) array ``P[j, k]`` of the probability of ``j`` needy
        and ``k`` content patients; entries with ``j + k > n`` are zero.
    """
    n = spec.n
    j = np.arange(n + 1)[:, None]
    k = np.arange(n + 1)[None, :]
    log_w = (
        j * math.log(spec.R1) + k * math.log(spec.R2) - _log_kappa(j, spec.s) - special.gammaln(k + 1.0)
    )
    log_w = np.where(j + k <= n, log_w, -np.inf)
    return np.exp(log_w - special.logsumexp(log_w))


def _poisson_log_cdf_table(mean: float, top: int) -> tuple[np.ndarray, np.ndarray]:
    """log pmf and log cdf of Poisson(mean) on 0..top, without underflow."""
    log_pmf = stats.poisson.logpmf(np.arange(top + 1), mean)
    return log_pmf, np.logaddexp.accumulate(log_pmf)


def _needy_marginal(spec: ErlangRSpec, beds: int) -> tuple[np.ndarray, np.ndarray]:
    """Marginal of the needy count with ``beds`` beds, and the full-ward share.

    Summing the content count out of the product form gives
    ``e^R2 P(Poisson(R2) <= beds - j)`` per needy level j, so the marginal
    costs O(n) instead of O(n^2).

    Returns:
        ``(marginal, full_share)`` where ``full_share[j]`` is the
        conditional probability that ``k = beds - j`` given ``j``.
    """
    j = np.arange(beds + 1)
    room = beds - j
    log_pmf, log_cdf = _poisson_log_cdf_table(spec.R2, beds)
    log_w = j * math.log(spec.R1) - _log_kappa(j, spec.s) + log_cdf[room]
    marginal = np.exp(log_w - special.logsumexp(log_w))
    full_share = np.exp(log_pmf[room] - log_cdf[room])
    return marginal, full_share


def blocking_measures(spec: ErlangRSpec) -> dict[str, float]:
    """Performance of the blocking model.

    Delay probability and mean wait are those seen by an admitted patient.
    By the arrival theorem an admitted patient sees the product form on
    ``n - 1`` beds, so both are evaluated there.  The wait of a patient who
    finds ``j >= s`` needy ahead is ``(j - s + 1) / (s mu)``.  Blocking and
    utilisations are time averages on ``n`` beds.

    Returns:
        dict with ``p_delay``, ``p_block``, ``expected_wait``, ``rho_s``
        (nurse utilisation) and ``rho_n`` (bed occupancy).
    """
    s, n = spec.s, spec.n
    marg, full = _needy_marginal(spec, n)
    j = np.arange(n + 1)
    p_block = float(np.dot(marg, full))
    rho_s = float(np.dot(marg, np.minimum(j, s))) / s
    # E[j + k]: E[k | j] under a Poisson(R2) truncated at n - j
    room = n - j
    _, log_cdf = _poisson_log_cdf_table(spec.R2, n)
    mean_k = np.zeros(n + 1)
    pos = room > 0
    mean_k[pos] = spec.R2 * np.exp(log_cdf[room[pos] - 1] - log_cdf[room[pos]])
    rho_n = float(np.dot(marg, j + mean_k)) / n
    if n > 1 or s < n:
        seen, _ = _needy_marginal(spec, n - 1)
        jj = np.arange(n)
    else:
        seen, jj = np.array([1.0]), np.array([0])
    p_delay = float(seen[jj >= s].sum())
    wait = float(np.dot(seen, np.maximum(0, jj - s + 1))) / (s * spec.mu)
    return {"p_delay": p_delay, "p_block": p_block, "expected_wait": wait, "rho_s": rho_s, "rho_n": rho_n}


def stability_rho_max(spec: ErlangRSpec) -> float:
    """Largest nurse load R1/s for which the holding model is stable.

    With ``b = delta / (p mu)`` this is the ratio of
    ``sum_i min(i, s)/s * C(n, i) c_i b^i`` to ``sum_i C(n, i) c_i b^i``,
    where ``c_i = 1`` for ``i <= s`` and ``i! s^(s-i) / s!`` above.  It is
    the mean nurse utilisation of the saturated closed network, evaluated
    with log-space weights.
    """
    s, n = spec.s, spec.n
    b = spec.delta / (spec.p * spec.mu)
    i = np.arange(n + 1, dtype=float)
    log_binom = special.gammaln(n + 1.0) - special.gammaln(i + 1.0) - special.gammaln(n - i + 1.0)
    log_c = np.where(i <= s, 0.0, special.gammaln(i + 1.0) - special.gammaln(s + 1.0) + (s - i) * math.log(s))
    log_w = log_binom + log_c + i * math.log(b)
    w = np.exp(log_w - special.logsumexp(log_w))
    return float(np.dot(w, np.minimum(i, s))) / s


# ---------------------------------------------------------------------------
# Holding model: QBD on (N, Q1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QbdModel:
    """Generator blocks of the holding model.

    Level ``i`` is the total number of patients ``N`` and the phase is the
    needy count ``j <= min(i, n)``.  The boundary has levels ``0..n``; from
    level ``n`` on the blocks repeat.

    Attributes:
        up: ``up[i]`` maps level i to i + 1, for i = 0..n-1.
        local: ``local[i]`` within level i, for i = 0..n (diagonal included).
        down: ``down[i]`` maps level i to i - 1, for i = 1..n.
        A0, A1, A2: Repeating up, local and down blocks, each (n+1) x (n+1).
    """

    spec: ErlangRSpec
    up: list[np.ndarray]
    local: list[np.ndarray]
    down: list[np.ndarray | None]
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray


def _local_block(spec: ErlangRSpec, level: int) -> np.ndarray:
    """Phase moves within a level: needy -> content and content -> needy."""
    beds = min(level, spec.n)
    m = beds + 1
    block = np.zeros((m, m))
    for j in range(m):
        to_content = spec.p * spec.mu * min(j, spec.s)
        to_needy = spec.delta * (beds - j)
        if j > 0:
            block[j, j - 1] = to_content
        if j < beds:
            block[j, j + 1] = to_needy
    return block


def qbd_build(spec: ErlangRSpec) -> QbdModel:
    """Assemble the generator blocks and check that every row sums to zero.

    Raises:
        ConsistencyError: if a generator row does not sum to zero.
    """
    n, s = spec.n, spec.s
    leave = (1.0 - spec.p) * spec.mu
    up, local, down = [], [], [None]
    for i in range(n + 1):
        m = i + 1
        if i < n:
            u = np.zeros((m, m + 1))
            u[np.arange(m), np.arange(m) + 1] = spec.lam
            up.append(u)
        if i > 0:
            d = np.zeros((m, m - 1))
            for j in range(1, m):
                d[j, j - 1] = leave * min(j, s)
            down.append(d)
    A0 = spec.lam * np.eye(n + 1)
    A2 = np.diag([leave * min(j, s) for j in range(n + 1)])
    for i in range(n + 1):
        blk = _local_block(spec, i)
        out = blk.sum(axis=1)
        if i < n:
            out += up[i].sum(axis=1)
        else:
            out += spec.lam
        if i > 0:
            out += down[i].sum(axis=1)
        local.append(blk - np.diag(out))
    A1 = _local_block(spec, n + 1)
    A1 -= np.diag(A1.sum(axis=1) + A0.sum(axis=1) + A2.sum(axis=1))
    model = QbdModel(spec=spec, up=up, local=local, down=down, A0=A0, A1=A1, A2=A2)
    _check_row_sums(model)
    return model


def _check_row_sums(model: QbdModel, tol: float = 1e-12) -> None:
    n = model.spec.n
    worst = 0.0
    for i in range(n + 1):
        row = model.local[i].sum(axis=1)
        row = row + (model.up[i].sum(axis=1) if i < n else model.A0.sum(axis=1))
        if i > 0:
            row = row + model.down[i].sum(axis=1)
        scale = max(1.0, float(np.abs(np.diag(model.local[i])).max()))
        worst = max(worst, float(np.abs(row).max()) / scale)
    rep = (model.A0 + model.A1 + model.A2).sum(axis=1)
    worst = max(worst, float(np.abs(rep).max()) / max(1.0, float(np.abs(np.diag(model.A1)).max())))
    if worst > tol:
        raise ConsistencyError(f"generator rows do not sum to zero (worst {worst:.2e})")


@dataclass(frozen=True)
class MatrixGeomSolution:
    """Stationary law of the holding model.

    Attributes:
        rate_matrix: Minimal nonnegative solution of
            ``A0 + R A1 + R^2 A2 = 0``; above level n, ``pi_{i+1} = pi_i R``.
        pi_boundary: Row vectors for levels ``0..n``.
        spectral_radius: Spectral radius of the rate matrix (< 1).
        residual: Max-abs residual of the rate-matrix equation.
        tail_mass: ``pi_n (I - R)^{-1}`` per phase, the occupation of
            levels ``n`` and above.
    """

    rate_matrix: np.ndarray
    pi_boundary: list[np.ndarray]
    spectral_radius: float
    residual: float
    tail_mass: np.ndarray


def _rate_matrix_log_reduction(A0: np.ndarray, A1: np.ndarray, A2: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Rate matrix via logarithmic reduction for G, then R = A0 (-A1 - A0 G)^{-1}.

    G solves ``A2 + A1 G + A0 G^2 = 0`` (down, local, up in that order).
    """
    m = A1.shape[0]
    eye = np.eye(m)
    lu = linalg.lu_factor(-A1)
    H = linalg.lu_solve(lu, A0)  # toward higher levels
    L = linalg.lu_solve(lu, A2)  # toward lower levels
    G = L.copy()
    T = H.copy()
    for _ in range(max_iter):
        U = H @ L + L @ H
        lu_u = linalg.lu_factor(eye - U)
        H = linalg.lu_solve(lu_u, H @ H)
        L = linalg.lu_solve(lu_u, L @ L)
        G = G + T @ L
        T = T @ H
        if np.abs(1.0 - G.sum(axis=1)).max() < 1e-14 or np.abs(T).max() < 1e-300:
            break
    else:
        raise ConvergenceError("logarithmic reduction did not converge")
    return A0 @ np.linalg.inv(-A1 - A0 @ G)


def _rate_matrix_iteration(
    A0: np.ndarray, A1: np.ndarray, A2: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000
) -> np.ndarray:
    """Plain iteration R <- -(A0 + R^2 A2) A1^{-1} from R = 0."""
    lu = linalg.lu_factor(A1.T)
    R = np.zeros_like(A0)
    for _ in range(max_iter):
        rhs = -(A0 + R @ R @ A2)
        new = linalg.lu_solve(lu, rhs.T).T
        if np.abs(new - R).max() < tol:
            return new
        R = new
    raise ConvergenceError(f"rate-matrix iteration stalled after {max_iter} steps")


def qbd_solve(model: QbdModel, method: str = "log-reduction") -> MatrixGeomSolution:
    """Matrix-geometric stationary law of the holding model.

    The boundary levels are solved as one sparse linear system.  The balance
    equations of level ``n`` receive the inflow ``pi_n R A2`` from level
    n + 1, one equation is replaced by the normalisation, and the tail is
    summed in closed form through ``(I - R)^{-1}``.

    Args:
        model: Blocks from :func:`qbd_build`.
        method: ``"log-reduction"`` (fast, default) or ``"iteration"``.

    Raises:
        InstabilityError: if ``R1/s >= rho_max``.
        ConvergenceError: if the rate-matrix solver fails.
    """
    spec = model.spec
    n = spec.n
    rho_max = stability_rho_max(spec)
    if not spec.R1 / spec.s < rho_max:
        raise InstabilityError(f"holding model unstable: R1/s = {spec.R1 / spec.s:.6g} >= rho_max = {rho_max:.6g}")
    if method == "log-reduction":
        R = _rate_matrix_log_reduction(model.A0, model.A1, model.A2)
    elif method == "iteration":
        R = _rate_matrix_iteration(model.A0, model.A1, model.A2)
    else:
        raise DomainError(f"unknown method {method!r}")
    R = np.maximum(R, 0.0)
    residual = float(np.abs(model.A0 + R @ model.A1 + R @ R @ model.A2).max())
    spectral_radius = float(np.abs(np.linalg.eigvals(R)).max())
    if spectral_radius >= 1.0:
        raise InstabilityError(f"rate matrix has spectral radius {spectral_radius:.6g} >= 1")

    offsets = np.concatenate([[0], np.cumsum(np.arange(1, n + 2))])
    size = int(offsets[-1])
    blocks = []  # (row level, col level, block) of Q^T pieces
    for i in range(n + 1):
        loc = model.local[i] + (R @ model.A2 if i == n else 0.0)
        blocks.append((i, i, loc))
        if i < n:
            blocks.append((i, i + 1, model.up[i]))
        if i > 0:
            blocks.append((i, i - 1, model.down[i]))
    rows, cols, vals = [], [], []
    for a, b, blk in blocks:
        rr, cc = np.nonzero(blk)
        # balance: sum_a pi_a Q_ab = 0, i.e. (Q^T) pi^T = 0
        rows.append(offsets[b] + cc)
        cols.append(offsets[a] + rr)
        vals.append(blk[rr, cc])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    eye = np.eye(n + 1)
    tail_weights = np.linalg.solve(eye - R, np.ones(n + 1))
    norm = np.ones(size)
    norm[offsets[n]:] = tail_weights
    keep = rows != 0
    mat = sparse.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(size, size)).tolil()
    mat[0, :] = norm
    rhs = np.zeros(size)
    rhs[0] = 1.0
    x = splinalg.spsolve(mat.tocsc(), rhs)
    x = np.maximum(x, 0.0)
    pi = [x[offsets[i]:offsets[i + 1]] for i in range(n + 1)]
    tail = np.linalg.solve((eye - R).T, pi[n])
    total = sum(float(v.sum()) for v in pi[:n]) + float(tail.sum())
    if abs(total - 1.0) > 1e-10:
        raise ConsistencyError(f"stationary law sums to {total:.12g}")
    return MatrixGeomSolution(
        rate_matrix=R, pi_boundary=pi, spectral_radius=spectral_radius, residual=residual, tail_mass=tail
    )


def holding_measures(sol: MatrixGeomSolution, spec: ErlangRSpec) -> dict[str, float]:
    """Performance of the holding model.

    Delay and wait are averaged over every arrival to the needy queue, as
    a patient-level simulation records them: new admissions (seeing the
    needy count j), held patients taking a freed bed (seeing j - 1, the
    departing patient excluded) and content patients turning needy (seeing
    j).  A patient who finds ``m >= s`` needy ahead waits
    ``(m - s + 1) / (s mu)`` on average.  Holding and utilisations are time
    averages; ``p_delay_time`` is the time fraction with all nurses busy.

    Returns:
        dict with ``p_delay``, ``p_hold``, ``expected_wait``, ``rho_s``,
        ``rho_n`` and ``p_delay_time``.
    """
    s, n = spec.s, spec.n
    leave = (1.0 - spec.p) * spec.mu
    flow = waited = queued = 0.0
    busy = beds = delay_time = 0.0

    def record(rate: np.ndarray, seen: np.ndarray) -> None:
        nonlocal flow, waited, queued
        flow += float(rate.sum())
        waited += float(rate[seen >= s].sum())
        queued += float(np.dot(rate, np.maximum(0, seen - s + 1)))

    for i, vec in enumerate(sol.pi_boundary[:n]):
        j = np.arange(i + 1)
        record(spec.lam * vec + spec.delta * (i - j) * vec, j)
        busy += float(np.dot(vec, np.minimum(j, s)))
        beds += i * float(vec.sum())
        delay_time += float(vec[j >= s].sum())
    j = np.arange(n + 1)
    tail = sol.tail_mass
    above = tail - sol.pi_boundary[n]  # levels n+1 and up
    # at level n new arrivals still find a bed; above it they are held
    record(spec.lam * sol.pi_boundary[n] + spec.delta * (n - j) * tail, j)
    record(leave * np.minimum(j, s) * above, j - 1)
    busy += float(np.dot(tail, np.minimum(j, s)))
    p_hold = float(tail.sum())
    beds += n * p_hold
    delay_time += float(tail[j >= s].sum())
    return {
        "p_delay": waited / flow,
        "p_hold": p_hold,
        "expected_wait": queued / flow / (s * spec.mu),
        "rho_s": busy / s,
        "rho_n": beds / n,
        "p_delay_time": delay_time,
    }


# ---------------------------------------------------------------------------
# QED limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErlangRAsymptotics:
    """Nurse hedge ``beta`` and bed hedge ``gamma`` with the needy fraction r."""

    beta: float
    gamma: float
    r: float

    def __post_init__(self) -> None:
        if not 0.0 < self.r < 1.0:
            raise DomainError("r must lie in (0, 1)")

    @property
    def eta_hat(self) -> float:
        return (self.gamma - self.beta * math.sqrt(self.r)) / math.sqrt(1.0 - self.r)

    @property
    def omega(self) -> float:
        return (self.gamma - self.beta / math.sqrt(self.r)) / math.sqrt(1.0 - self.r)


# Below this |beta| the wait limit is interpolated; the direct formula
# loses about eps / beta^2 to cancellation.
_SMALL_BETA = 2e-3


def _bed_integral(beta: float, gamma: float, r: float) -> float:
    """Integral of Phi((gamma - t sqrt r)/sqrt(1 - r)) phi(t) over t < beta."""
    sr, sq = math.sqrt(r), math.sqrt(1.0 - r)

    def f(t: float) -> float:
        return special.ndtr((gamma - t * sr) / sq) * math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)

    val, err = integrate.quad(f, -np.inf, beta, epsabs=1e-15, epsrel=1e-13, limit=200)
    if not math.isfinite(val) or err > 1e-9:
        raise ConvergenceError(f"bed integral failed (err={err:.2e})")
    return val


def _limit_parts(h: ErlangRAsymptotics) -> dict[str, float]:
    """Shared pieces: the bed integral, the tilt v and D(beta) / beta."""
    beta, gamma, r = h.beta, h.gamma, h.r
    eta, omega = h.eta_hat, h.omega
    # v = exp((omega^2 - eta^2)/2) Phi(omega); phi(sqrt(beta^2+eta^2)) e^{omega^2/2} = phi(beta) v
    v = math.exp(0.5 * (omega * omega - eta * eta) + special.log_ndtr(omega))
    d_tilde = std_normal_cdf(eta) - v  # vanishes at beta = 0
    if abs(beta) > 1e-7:
        d_over_beta = d_tilde / beta
    else:
        # derivative of d_tilde at beta = 0
        d_over_beta = math.sqrt((1.0 - r) / r) * std_normal_pdf(eta) + std_normal_cdf(eta) * gamma / math.sqrt(r)
    return {
        "integral": _bed_integral(beta, gamma, r),
        "v": v,
        "d_tilde": d_tilde,
        "edge": std_normal_pdf(beta) * d_over_beta,
    }


def _wait_numerator(h: ErlangRAsymptotics, parts: dict[str, float]) -> float:
    beta, gamma, r = h.beta, h.gamma, h.r
    inner = (
        parts["d_tilde"] / beta
        + (beta / r - gamma / math.sqrt(r)) * parts["v"]
        - math.sqrt((1.0 - r) / r) * std_normal_pdf(h.eta_hat)
    )
    return std_normal_pdf(beta) * inner / beta


def qed_limits_blocking(h: ErlangRAsymptotics, mu: float = 1.0) -> dict[str, float]:
    """QED limits of the blocking model under the two-fold scaling.

    Returns:
        dict with ``g_b`` (delay probability), ``f_b`` (sqrt(R1) times the
        blocking probability) and ``h_b`` (sqrt(R1) times the mean wait).
        All three share one denominator; beta = 0 is a removable point and
        is handled continuously.
    """
    if not h.gamma > -math.inf:
        raise DomainError("gamma must be finite")
    parts = _limit_parts(h)
    denom = parts["integral"] + parts["edge"]
    g = parts["edge"] / denom
    block_num = (
        math.sqrt(h.r) * std_normal_pdf(h.gamma) * std_normal_cdf(-h.omega * math.sqrt(h.r))
        + std_normal_pdf(h.beta) * parts["v"]
    )
    f = block_num / denom
    if abs(h.beta) >= _SMALL_BETA:
        wait_num = _wait_numerator(h, parts)
    else:
        wait_num = _interpolated_wait_numerator(h)
    return {"g_b": float(g), "f_b": float(f), "h_b": float(wait_num / denom / mu)}


def _interpolated_wait_numerator(h: ErlangRAsymptotics) -> float:
    """Cubic through beta = -2c, -c, c, 2c, where the direct form is accurate."""
    c = _SMALL_BETA
    nodes = (-2.0 * c, -c, c, 2.0 * c)
    values = []
    for b in nodes:
        pt = ErlangRAsymptotics(b, h.gamma, h.r)
        values.append(_wait_numerator(pt, _limit_parts(pt)))
    total = 0.0
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        weight = 1.0
        for k, xk in enumerate(nodes):
            if k != i:
                weight *= (h.beta - xk) / (xi - xk)
        total += weight * yi
    return total


def holding_heuristic(h: ErlangRAsymptotics, mu: float = 1.0) -> dict[str, float]:
    """Fixed-point approximation for the holding model.

    Held patients act as extra load ``alpha sqrt(R1)`` that shifts the
    hedges to ``(beta - alpha, gamma - alpha / sqrt(r))``, where alpha
    solves ``alpha = f_b(shifted hedges)``.

    Returns:
        dict with ``alpha``, ``g_h`` (delay) and ``h_h`` (scaled wait).
    """
    rule = ShiftRule(gamma_factor=1.0 / math.sqrt(h.r))
    sol = solve_retrial_fixed_point(
        lambda b, g: qed_limits_blocking(ErlangRAsymptotics(b, g, h.r), mu)["f_b"], h.beta, h.gamma, rule
    )
    lim = qed_limits_blocking(ErlangRAsymptotics(sol.effective_beta, sol.effective_gamma, h.r), mu)
    return {"alpha": sol.alpha, "g_h": lim["g_b"], "h_h": lim["h_b"]}
