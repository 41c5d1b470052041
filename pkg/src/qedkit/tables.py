"""Registry of golden tables, each rebuilt from its pinned parameter grid.

Every entry maps a table id to a builder returning rows (dicts with a
fixed column order).  Builders take no arguments, so ``qedkit table --id
<id>`` reproduces a table with no further flags.  The two simulation
tables accept optional replication settings for quicker looks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import bulk, dimensioning, erlang_r, overdispersion, regimes, retrial
from .errors import DomainError
from .sim import SimScenario, estimates_by_name, simulate, slice_estimates

Row = dict[str, Any]

BULK_CAPACITIES = (10, 20, 50, 100, 200, 500, 1000)
GAMMA_POISSON_CAPACITIES = (5, 10, 50, 100, 500)
RETRIAL_LOADS = (5, 10, 50, 100, 500, 1000)
DIMENSIONING_LOADS = (10, 50, 100, 500, 1000)
DIMENSIONING_TARGETS = (0.10, 0.25, 0.40)
CLOUD_KAPPAS = (1.0, 0.2, 0.02)
ERLANG_R_LOADS = (5, 10, 25, 50, 100, 250)
HOLDING_EXACT_LOADS = (5, 10, 25)
HEDGE_PAIRS = ((1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0))
# (mu, delta, p) per Erlang-R case; r = delta / (delta + p mu) is 0.1, 0.25, 0.5.
ERLANG_R_CASES = {1: (1.0, 0.10, 0.90), 2: (1.0, 0.25, 0.75), 3: (1.0, 0.50, 0.50)}
# (beta, delta) of the power scaling mean n, variance n^(2 delta).
GAMMA_POISSON_GRIDS = {"b1-d0.6": (1.0, 0.6), "b1-d0.8": (1.0, 0.8), "b0.1-d0.6": (0.1, 0.6), "b0.1-d0.8": (0.1, 0.8)}


@dataclass(frozen=True)
class TableEntry:
    table_id: str
    title: str
    build: Callable[..., list[Row]]


# ---------------------------------------------------------------------------
# Bulk service with Poisson arrivals
# ---------------------------------------------------------------------------

def _poisson_row(s: int, gamma: float, eta: float) -> tuple[regimes.RegimeSpec, float]:
    spec = regimes.poisson_spec(s, gamma, eta)
    exact = bulk.exact_measures_roots(bulk.BulkSpec(bulk.Poisson(s * spec.rho), s))["mean_queue"]
    return spec, exact


def poisson_half_table(gamma: float) -> list[Row]:
    """Mean queue at eta = 1/2: exact, leading order and corrected."""
    rows = []
    for s in BULK_CAPACITIES:
        spec, exact = _poisson_row(s, gamma, 0.5)
        rows.append({
            "s": s,
            "rho": spec.rho,
            "mean_exact": exact,
            "mean_leading": regimes.mean_leading(spec),
            "mean_corrected": regimes.mean_corrected_half(spec),
        })
    return rows


def poisson_eta_table(gamma: float = 0.1, etas: tuple[float, ...] = (0.6, 0.75, 0.9)) -> list[Row]:
    """Exact and leading-order mean queue for eta above 1/2."""
    rows = []
    for eta in etas:
        for s in BULK_CAPACITIES:
            spec, exact = _poisson_row(s, gamma, eta)
            rows.append({"eta": eta, "s": s, "mean_exact": exact, "mean_leading": regimes.mean_leading(spec)})
    return rows


# ---------------------------------------------------------------------------
# Gamma-Poisson arrivals
# ---------------------------------------------------------------------------

def gamma_poisson_table(beta: float, delta: float) -> list[Row]:
    """Exact, classic and robust mean and spread of the queue.

    The ``root_std_*`` columns hold the square root of the standard
    deviation (the fourth root of the variance), the scale on which the
    golden tables print the spread.
    """
    rows = []
    for s in GAMMA_POISSON_CAPACITIES:
        spec = overdispersion.power_scaling(s, beta, delta)
        exact = bulk.pollaczek_measures(bulk.BulkSpec(bulk.GammaPoisson(spec.a, spec.b), s))
        classic = overdispersion.classic_measures(spec)
        robust = overdispersion.robust_measures(spec)
        rows.append({
            "s": s,
            "rho": spec.rho,
            "mean_exact": exact["mean_queue"],
            "mean_classic": classic["mean_queue"],
            "mean_robust": robust["mean_queue"],
            "root_std_exact": exact["variance_queue"] ** 0.25,
            "root_std_classic": classic["variance_queue"] ** 0.25,
            "root_std_robust": robust["variance_queue"] ** 0.25,
        })
    return rows


# ---------------------------------------------------------------------------
# Slow retrials
# ---------------------------------------------------------------------------

def basic_retrial_table() -> list[Row]:
    """Fixed-point delay and scaled blocking of the M/M/s/n retrial queue."""
    rows = []
    for beta, gamma in ((0.5, 0.5), (1.0, 0.5), (0.5, 1.0), (1.0, 1.0)):
        res = retrial.approx_with_retrials("basic", 1.0, beta=beta, gamma=gamma)
        rows.append({"beta": beta, "gamma": gamma, "delay_prob": res["delay_prob"], "scaled_block": res["alpha"]})
    return rows


def cloud_retrial_table() -> list[Row]:
    """Fixed-point delay and scaled blocking of the cloud tandem."""
    rows = []
    for kappa in CLOUD_KAPPAS:
        for beta, gamma in ((0.5, 1.0), (1.0, 1.0)):
            res = retrial.approx_with_retrials("cloud", 1.0, beta=beta, gamma=gamma, kappa=kappa)
            rows.append({"kappa": kappa, "beta": beta, "gamma": gamma,
                         "delay_prob": res["delay_prob"], "scaled_block": res["alpha"]})
    return rows


def abandon_retrial_table() -> list[Row]:
    """Fixed-point delay and scaled abandonment of M/M/s+M with retrials."""
    rows = []
    for beta in (0.5, 1.0):
        for theta in (0.2, 1.0, 10.0):
            res = retrial.approx_with_retrials("abandon", 1.0, beta=beta, theta=theta)
            rows.append({"beta": beta, "theta": theta,
                         "delay_prob": res["delay_prob"], "scaled_abandon": res["alpha"]})
    return rows


def cloud_dimensioning_table() -> list[Row]:
    """Corrected hedges and capacities of the stationary cloud algorithm."""
    rows = []
    for kappa in CLOUD_KAPPAS:
        for eps in DIMENSIONING_TARGETS:
            h = dimensioning.cloud_hedges(eps, kappa)
            for load in DIMENSIONING_LOADS:
                s, n = dimensioning.cloud_capacity(load, kappa, h.beta, h.gamma)
                rows.append({"kappa": kappa, "epsilon": eps, "beta_star": h.beta, "gamma_star": h.gamma,
                             "R": load, "s": s, "n": n})
    return rows


def cloud_dimensioning_simulation(
    load: float = 500.0, reps: int = 50, horizon: float = 2e4, delta_retry: float = 0.01, seed: int = 2024
) -> list[Row]:
    """Simulated delay of the cloud tandem at the dimensioned capacities.

    At the default settings this runs for several minutes.
    """
    rows = []
    for kappa in CLOUD_KAPPAS:
        for k, eps in enumerate(DIMENSIONING_TARGETS):
            dim = dimensioning.cloud_stationary_dimensioning(load, kappa, eps)
            sc = SimScenario("Cloud", {"lam": load, "mu": 1.0, "kappa": kappa, "s": dim["s"], "n": dim["n"],
                                       "delta_retry": delta_retry},
                             horizon=horizon, reps=reps, seed=seed + 10 * k + CLOUD_KAPPAS.index(kappa))
            est = estimates_by_name(simulate(sc))["delay_prob"]
            rows.append({"kappa": kappa, "epsilon": eps, "s": dim["s"], "n": dim["n"],
                         "delay_prob": est.point, "half_width": est.half_width_95})
    return rows


# ---------------------------------------------------------------------------
# Erlang-R
# ---------------------------------------------------------------------------

def _case_rates(case: int) -> tuple[float, float, float]:
    if case not in ERLANG_R_CASES:
        raise DomainError(f"unknown Erlang-R case {case}; choose from {sorted(ERLANG_R_CASES)}")
    return ERLANG_R_CASES[case]


def erlang_r_blocking_table(case: int) -> list[Row]:
    """Product-form measures of the blocking model, then the QED limits.

    Block and wait are scaled by sqrt(R1).  The last row per hedge pair has
    ``kind = "approx"`` and no load.
    """
    mu, delta, p = _case_rates(case)
    r = delta / (delta + p * mu)
    rows = []
    for beta, gamma in HEDGE_PAIRS:
        for load in ERLANG_R_LOADS:
            spec = erlang_r.ErlangRSpec.from_hedges(load, beta, gamma, mu, delta, p)
            m = erlang_r.blocking_measures(spec)
            root = math.sqrt(load)
            rows.append({"beta": beta, "gamma": gamma, "kind": "exact", "R1": load, "s": spec.s, "n": spec.n,
                         "p_delay": m["p_delay"], "scaled_block": root * m["p_block"],
                         "scaled_wait": root * m["expected_wait"]})
        lim = erlang_r.qed_limits_blocking(erlang_r.ErlangRAsymptotics(beta, gamma, r), mu)
        rows.append({"beta": beta, "gamma": gamma, "kind": "approx", "R1": None, "s": None, "n": None,
                     "p_delay": lim["g_b"], "scaled_block": lim["f_b"], "scaled_wait": lim["h_b"]})
    return rows


def erlang_r_holding_table(case: int, loads: tuple[int, ...] = HOLDING_EXACT_LOADS) -> list[Row]:
    """Matrix-geometric measures of the holding model, then the heuristic."""
    mu, delta, p = _case_rates(case)
    r = delta / (delta + p * mu)
    rows = []
    for beta, gamma in HEDGE_PAIRS:
        for load in loads:
            spec = erlang_r.ErlangRSpec.from_hedges(load, beta, gamma, mu, delta, p)
            m = erlang_r.holding_measures(erlang_r.qbd_solve(erlang_r.qbd_build(spec)), spec)
            rows.append({"beta": beta, "gamma": gamma, "kind": "exact", "R1": load, "s": spec.s, "n": spec.n,
                         "p_delay": m["p_delay"], "scaled_wait": math.sqrt(load) * m["expected_wait"]})
        heur = erlang_r.holding_heuristic(erlang_r.ErlangRAsymptotics(beta, gamma, r), mu)
        rows.append({"beta": beta, "gamma": gamma, "kind": "approx", "R1": None, "s": None, "n": None,
                     "p_delay": heur["g_h"], "scaled_wait": heur["h_h"]})
    return rows


# ---------------------------------------------------------------------------
# Time-varying staffing
# ---------------------------------------------------------------------------

ED_SERVICE_RATE = 0.5  # per hour
ED_TARGETS = (0.1, 0.3, 0.5)


def time_sliced_delay(
    method: str,
    epsilon: float,
    reps: int = 100,
    horizon: float = 240.0,
    warmup: float = 48.0,
    seed: int = 7,
) -> tuple[dimensioning.StaffingCurve, np.ndarray]:
    """Staff the ED day by ``method`` and simulate the per-window delay.

    Returns:
        The staffing curve and the per-window mean delay probabilities.
    """
    rate = dimensioning.ed_day_profile()
    staffing = dimensioning.staffing_curve(method, rate, epsilon=epsilon, mu=ED_SERVICE_RATE)
    sc = SimScenario("Mms", {"mu": ED_SERVICE_RATE}, horizon=horizon, warmup=warmup, reps=reps, seed=seed,
                     staffing=staffing, lambda_curve=rate)
    slices = slice_estimates(simulate(sc))
    return staffing, np.array([e.point for e in slices])


def mol_stabilization_table(reps: int = 100, band: float = 0.1) -> list[Row]:
    """Share of half-hour windows whose simulated delay is within the band."""
    rows = []
    for eps in ED_TARGETS:
        for method in ("PSA", "MOL"):
            staffing, delay = time_sliced_delay(method, eps, reps=reps)
            err = np.abs(delay - eps)
            rows.append({"method": method, "epsilon": eps, "s_min": int(staffing.s_levels.min()),
                         "s_max": int(staffing.s_levels.max()), "in_band": float(np.mean(err <= band)),
                         "max_abs_error": float(err.max())})
    return rows


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

TABLES: dict[str, TableEntry] = {}


def _register(table_id: str, title: str, build: Callable[..., list[Row]]) -> None:
    TABLES[table_id] = TableEntry(table_id, title, build)


_register("bulk-poisson-gamma1", "Poisson bulk queue, eta = 1/2, gamma = 1", lambda: poisson_half_table(1.0))
_register("bulk-poisson-gamma0.1", "Poisson bulk queue, eta = 1/2, gamma = 0.1", lambda: poisson_half_table(0.1))
_register("bulk-poisson-eta", "Poisson bulk queue, gamma = 0.1, eta in {0.6, 0.75, 0.9}", poisson_eta_table)
for _key, (_beta, _delta) in GAMMA_POISSON_GRIDS.items():
    _register(f"bulk-gamma-poisson-{_key}", f"Gamma-Poisson bulk queue, beta = {_beta}, delta = {_delta}",
              lambda b=_beta, d=_delta: gamma_poisson_table(b, d))
_register("retrial-basic", "M/M/s/n with slow retrials, fixed point", basic_retrial_table)
_register("retrial-cloud", "Cloud tandem with slow retrials, fixed point", cloud_retrial_table)
_register("retrial-abandon", "M/M/s+M with slow retrials, fixed point", abandon_retrial_table)
_register("cloud-dimensioning", "Stationary cloud dimensioning, capacities", cloud_dimensioning_table)
_register("cloud-dimensioning-sim", "Stationary cloud dimensioning, simulated delay at R = 500",
          cloud_dimensioning_simulation)
for _case in ERLANG_R_CASES:
    _register(f"erlang-r-blocking-case{_case}", f"Erlang-R blocking, case {_case}", lambda c=_case: erlang_r_blocking_table(c))
    _register(f"erlang-r-holding-case{_case}", f"Erlang-R holding, case {_case}",
              lambda c=_case: erlang_r_holding_table(c))
_register("mol-vs-psa", "PSA versus MOL staffing of the ED day, delay within +-0.1", mol_stabilization_table)


def table_ids() -> list[str]:
    return list(TABLES)


def build_table(table_id: str, **options: Any) -> list[Row]:
    """Rows of a registered table.

    Raises:
        DomainError: for an unknown id.
    """
    try:
        entry = TABLES[table_id]
    except KeyError:
        raise DomainError(f"unknown table id {table_id!r}; choose from {', '.join(TABLES)}") from None
    return entry.build(**options)
