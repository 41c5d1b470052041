"""Replicated simulation of the queueing models, with t-based intervals.

A :class:`SimScenario` names a model, its rates and capacities, and the
run layout.  Replication k draws its uniforms from a Philox generator
keyed by ``SeedSequence([seed, k])``, so runs are reproducible bit for bit
and replications are independent of how many others are run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import stats

from ..dimensioning import OfferedLoadCurve, StaffingCurve
from ..errors import ConsistencyError, DomainError, RunawayError
from . import _kernels as K

MODELS = (
    "Mms",
    "MmsN",
    "ErlangA",
    "MmsNRetrial",
    "ErlangARetrial",
    "Cloud",
    "ErlangRBlocking",
    "ErlangRHolding",
)

_REQUIRED = {
    "Mms": ("lam", "mu", "s"),
    "MmsN": ("lam", "mu", "s", "n"),
    "ErlangA": ("lam", "mu", "s", "theta"),
    "MmsNRetrial": ("lam", "mu", "s", "n", "delta_retry"),
    "ErlangARetrial": ("lam", "mu", "s", "theta", "delta_retry"),
    "Cloud": ("lam", "kappa", "s", "n"),
    "ErlangRBlocking": ("lam", "mu", "delta", "p", "s", "n"),
    "ErlangRHolding": ("lam", "mu", "delta", "p", "s", "n"),
}

BUFFER_SIZE = 1 << 18
DEFAULT_GUARD = 10**6
_UNBOUNDED = np.iinfo(np.int64).max // 4


@dataclass(frozen=True)
class SimScenario:
    """What to simulate and for how long.

    Attributes:
        model: One of :data:`MODELS`.
        params: Rates and capacities; see ``_REQUIRED`` for the keys.
            ``Cloud`` also takes ``mu`` (default 1) and an optional
            ``delta_retry`` (0 loses blocked requests).
        horizon: Simulated time per replication.
        warmup: Discarded prefix; defaults to 10% of the horizon.
        reps: Number of replications.
        seed: Base seed (nonnegative, up to 64 bits).
        staffing: Server levels per review window (``Mms`` only), which
            makes the run time-varying together with ``lambda_curve``.
        lambda_curve: Periodic arrival rate replacing ``params['lam']``.
        guard: Population at which a run is declared runaway.
    """

    model: str
    params: dict[str, float]
    horizon: float
    warmup: float | None = None
    reps: int = 10
    seed: int = 0
    staffing: StaffingCurve | None = None
    lambda_curve: OfferedLoadCurve | None = None
    guard: int = DEFAULT_GUARD
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.1 * self.horizon)
        if not self.horizon > self.warmup >= 0:
            raise DomainError("need horizon > warmup >= 0")
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError("reps must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError("seed must be a nonnegative integer")
        if self.time_varying:
            if self.model != "Mms":
                raise DomainError("time-varying runs are supported for the Mms model only")
            if self.staffing is None or self.lambda_curve is None:
                raise DomainError("a time-varying run needs both staffing and lambda_curve")
            missing = [k for k in ("mu",) if k not in self.params]
        else:
            missing = [k for k in _REQUIRED[self.model] if k not in self.params]
        if missing:
            raise DomainError(f"{self.model} is missing parameters {missing}")

    @property
    def time_varying(self) -> bool:
        return self.staffing is not None or self.lambda_curve is not None

    def replace_seed(self, seed: int) -> "SimScenario":
        return SimScenario(self.model, dict(self.params), self.horizon, self.warmup, self.reps, seed,
                           self.staffing, self.lambda_curve, self.guard, dict(self.meta))


@dataclass(frozen=True)
class SimEstimate:
    """Replication mean of one measure with its 95% half-width."""

    name: str
    point: float
    half_width_95: float
    reps: int

    def as_row(self) -> dict[str, float | str | int]:
        return {"measure": self.name, "point": self.point, "half_width_95": self.half_width_95,
                "reps": self.reps}


@dataclass(frozen=True)
class ReplicationRecord:
    """Raw counters of every replication (rows) and the slice counts."""

    counters: np.ndarray
    slice_arrivals: np.ndarray | None = None
    slice_delayed: np.ndarray | None = None


def replication_generator(seed: int, rep: int) -> np.random.Generator:
    """Counter-based stream of replication ``rep`` under base ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(rep)])))


def _int_param(params: dict[str, float], key: str) -> int:
    value = params[key]
    if int(value) != value or value < 0:
        raise DomainError(f"{key} must be a nonnegative integer")
    return int(value)


def _stationary_runner(sc: SimScenario):
    """Bind model parameters to a kernel call ``f(state, out, buffer)``."""
    p = sc.params
    h, w, g = float(sc.horizon), float(sc.warmup), int(sc.guard)
    m = sc.model
    if m in ("Mms", "MmsN", "ErlangA", "MmsNRetrial", "ErlangARetrial"):
        s = _int_param(p, "s")
        cap = _int_param(p, "n") if "n" in _REQUIRED[m] else _UNBOUNDED
        theta = float(p.get("theta", 0.0)) if m in ("ErlangA", "ErlangARetrial") else 0.0
        delta = float(p.get("delta_retry", 0.0)) if m.endswith("Retrial") else 0.0
        if s < 1 or cap < s:
            raise DomainError("need 1 <= s <= n")
        args = (float(p["lam"]), float(p["mu"]), s, cap, theta, delta,
                m == "MmsNRetrial", m == "ErlangARetrial", h, w, g)
        return lambda st, out, buf: K.station_kernel(*args, st, out, buf)
    if m == "Cloud":
        s, n = _int_param(p, "s"), _int_param(p, "n")
        if s < 1 or n < s:
            raise DomainError("need 1 <= s <= n")
        args = (float(p["lam"]), float(p.get("mu", 1.0)), float(p["kappa"]), s, n,
                float(p.get("delta_retry", 0.0)), h, w, g)
        return lambda st, out, buf: K.cloud_kernel(*args, st, out, buf)
    s, n = _int_param(p, "s"), _int_param(p, "n")
    if s < 1 or n < s:
        raise DomainError("need 1 <= s <= n")
    args = (float(p["lam"]), float(p["mu"]), float(p["delta"]), float(p["p"]), s, n,
            m == "ErlangRHolding", h, w, g)
    return lambda st, out, buf: K.erlang_r_kernel(*args, st, out, buf)


def _timevarying_runner(sc: SimScenario):
    curve, staffing = sc.lambda_curve, sc.staffing
    if not math.isclose(float(staffing.time_grid[0]), curve.start, abs_tol=1e-9):
        raise DomainError("staffing windows must start where the arrival cycle starts")
    grid = curve.time_grid - curve.start
    values = curve.values.astype(float)
    lam_max = float(values.max())
    if not lam_max > 0:
        raise DomainError("the arrival rate is identically zero")
    levels = staffing.s_levels.astype(np.int64)
    args = (grid, values, lam_max, float(sc.params["mu"]), levels, float(staffing.review_period),
            float(sc.horizon), float(sc.warmup), int(sc.guard))
    return args, levels.size


def run_replications(scenario: SimScenario) -> ReplicationRecord:
    """Raw counters for every replication of the scenario.

    Raises:
        RunawayError: if a replication exceeds the population guard.
        ConsistencyError: if event accounting does not balance.
    """
    rows = np.zeros((scenario.reps, K.N_SLOTS))
    slices_a = slices_d = None
    buf = np.empty(BUFFER_SIZE)
    if scenario.time_varying:
        args, n_windows = _timevarying_runner(scenario)
        slices_a = np.zeros((scenario.reps, n_windows))
        slices_d = np.zeros((scenario.reps, n_windows))
        review = float(scenario.staffing.review_period)
    else:
        runner = _stationary_runner(scenario)
    for k in range(scenario.reps):
        gen = replication_generator(scenario.seed, k)
        state = np.zeros(K.N_STATE)
        out = rows[k]
        if scenario.time_varying:
            state[4] = review
            while True:
                gen.random(out=buf)
                if K.timevarying_kernel(*args, state, out, slices_a[k], slices_d[k], buf):
                    break
        else:
            while True:
                gen.random(out=buf)
                if runner(state, out, buf):
                    break
        if out[K.STATUS] != 0:
            raise RunawayError(
                f"replication {k} exceeded {scenario.guard} customers at t={state[0]:.4g}; "
                "the scenario is probably unstable"
            )
        balance = out[K.TOTAL_IN] - out[K.TOTAL_OUT] - out[K.TOTAL_LOST] - out[K.FINAL_POP]
        if balance != 0:
            raise ConsistencyError(f"replication {k}: event accounting off by {balance}")
    return ReplicationRecord(rows, slices_a, slices_d)


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)


def summarize(name: str, values: np.ndarray) -> SimEstimate:
    """Student-t interval over replication values; NaN values are dropped."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return SimEstimate(name, math.nan, math.inf, 0)
    if v.size == 1:
        return SimEstimate(name, float(v[0]), math.inf, 1)
    half = float(stats.t.ppf(0.975, v.size - 1) * v.std(ddof=1) / math.sqrt(v.size))
    return SimEstimate(name, float(v.mean()), half, int(v.size))


def _measures(sc: SimScenario, c: np.ndarray) -> dict[str, np.ndarray]:
    """Per-replication measures from the counter rows."""
    col = lambda slot: c[:, slot]  # noqa: E731
    obs = col(K.OBSERVED)
    m = sc.model
    res: dict[str, np.ndarray] = {}
    if m.startswith("ErlangR"):
        res["delay_prob"] = _ratio(col(K.NEEDY_DELAYED), col(K.NEEDY_ARRIVALS))
        res["hold_prob" if m == "ErlangRHolding" else "block_prob"] = _ratio(col(K.FRESH_LOST), col(K.FRESH))
        res["expected_wait"] = _ratio(col(K.QUEUE_AREA), col(K.NEEDY_ARRIVALS))
        res["nurse_utilization"] = _ratio(col(K.BUSY_AREA), obs * sc.params["s"])
        res["bed_utilization"] = _ratio(col(K.SPACE_AREA), obs * sc.params["n"])
        if m == "ErlangRHolding":
            res["mean_held"] = _ratio(col(K.ORBIT_AREA), obs)
        return res
    res["delay_prob"] = _ratio(col(K.FRESH_DELAYED), col(K.FRESH))
    if m in ("MmsN", "MmsNRetrial", "Cloud"):
        res["block_prob"] = _ratio(col(K.FRESH_LOST), col(K.FRESH))
    if m.endswith("Retrial") or (m == "Cloud" and sc.params.get("delta_retry", 0.0) > 0):
        res["attempt_block_prob"] = _ratio(col(K.ATTEMPTS_BLOCKED), col(K.ATTEMPTS))
        res["mean_orbit"] = _ratio(col(K.ORBIT_AREA), obs)
    if m in ("ErlangA", "ErlangARetrial"):
        res["abandon_prob"] = _ratio(col(K.ABANDONED), col(K.ADMITTED))
    # Little's law on the admitted flow.
    res["expected_wait"] = _ratio(col(K.QUEUE_AREA), col(K.ADMITTED))
    if not sc.time_varying:
        res["server_utilization"] = _ratio(col(K.BUSY_AREA), obs * sc.params["s"])
    if m == "Cloud":
        res["vm_utilization"] = _ratio(col(K.SPACE_AREA), obs * sc.params["n"])
    return res


def simulate(scenario: SimScenario) -> list[SimEstimate]:
    """Point estimates and 95% half-widths of the scenario's measures.

    A fresh arrival counts as delayed when its first attempt finds every
    server busy, whether or not it is admitted; in the single-station
    models a blocked arrival always qualifies.  For Erlang-R the delay is
    taken over entries to the nurse queue that find every nurse busy.  Time-varying runs add ``delay_prob@<t>`` for each
    review window starting at hour t.
    """
    record = run_replications(scenario)
    out = [summarize(name, vals) for name, vals in _measures(scenario, record.counters).items()]
    if record.slice_arrivals is not None:
        per_slice = _ratio(record.slice_delayed, record.slice_arrivals)
        for k, t in enumerate(scenario.staffing.time_grid):
            out.append(summarize(f"delay_prob@{t:.2f}", per_slice[:, k]))
    return out


def estimates_by_name(estimates: list[SimEstimate]) -> dict[str, SimEstimate]:
    return {e.name: e for e in estimates}


def slice_estimates(estimates: list[SimEstimate]) -> list[SimEstimate]:
    return [e for e in estimates if e.name.startswith("delay_prob@")]


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def scenario_from_dict(doc: dict[str, Any]) -> SimScenario:
    """Build a scenario from its JSON form.

    ``lambda_curve`` is ``{"time": [...], "rate": [...]}``; ``staffing`` is
    ``{"time": [...], "s": [...], "review_period": h}``.
    """
    try:
        curve = doc.get("lambda_curve")
        staffing = doc.get("staffing")
        return SimScenario(
            model=doc["model"],
            params={k: float(v) for k, v in doc.get("params", {}).items()},
            horizon=float(doc["horizon"]),
            warmup=None if doc.get("warmup") is None else float(doc["warmup"]),
            reps=int(doc.get("reps", 10)),
            seed=int(doc.get("seed", 0)),
            staffing=None if staffing is None else StaffingCurve(
                np.asarray(staffing["time"], float), np.asarray(staffing["s"]),
                None, float(staffing.get("review_period", 0.5))),
            lambda_curve=None if curve is None else OfferedLoadCurve(
                np.asarray(curve["time"], float), np.asarray(curve["rate"], float)),
            guard=int(doc.get("guard", DEFAULT_GUARD)),
        )
    except KeyError as exc:
        raise DomainError(f"scenario document is missing {exc}") from exc


def load_scenario(path: str) -> SimScenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
