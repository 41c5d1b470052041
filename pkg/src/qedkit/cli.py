"""Command-line front end: ``qedkit <subcommand> [flags]``.

Subcommands: staff, eval, approx, roots, fit, simulate, table.  Results go
to stdout as an aligned table, CSV or JSON; diagnostics go to stderr.
Exit status is 0 on success, 2 on a usage or domain error and 3 on a
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import __version__, bulk, dimensioning, erlang_r, grw, mms, overdispersion, regimes, retrial, tables
from .errors import DomainError, NumericalError, QedkitError
from .sim import load_scenario, simulate

Result = dict[str, Any] | list[dict[str, Any]]

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
SEED_ENV = "QEDKIT_SEED"


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def _format_number(x: float, precision: int) -> str:
    if math.isnan(x) or math.isinf(x):
        return str(x)
    if x != 0 and abs(x) < 0.5 * 10.0**-precision:
        return f"{x:.{precision}e}"
    return f"{x:.{precision}f}"


def _cell(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return _format_number(float(value), precision)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(_jsonable(value, precision))
    return str(value)


def _jsonable(value: Any, precision: int) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v, precision) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return None
        return float(_format_number(x, precision))
    return value


def _rows(result: Result) -> list[dict[str, Any]]:
    return result if isinstance(result, list) else [result]


def render(result: Result, fmt: str, precision: int) -> str:
    """Text form of a result in one of ``table``, ``csv`` or ``json``."""
    if fmt == "json":
        return json.dumps(_jsonable(result, precision), indent=2)
    rows = _rows(result)
    columns: list[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    cells = [[_cell(row.get(c), precision) for c in columns] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise DomainError(f"model {args.model!r} needs {', '.join(missing)}")


def _cmd_staff(args: argparse.Namespace) -> Result:
    if args.model == "mms":
        if args.curve is not None:
            _need(args, "target_delay")
            rate = dimensioning.ed_day_profile() if args.curve == "ed" else \
                dimensioning.OfferedLoadCurve.from_csv(args.curve)
            curve = dimensioning.staffing_curve(args.method, rate, epsilon=args.target_delay, mu=args.mu,
                                                review_period=args.review_period)
            return [{"t": float(t), "s": int(s)} for t, s in zip(curve.time_grid, curve.s_levels)]
        _need(args, "lam")
        if args.cost_ratio is not None:
            return {"beta_cost": dimensioning.optimize_cost_beta(args.cost_ratio),
                    "s_srs": dimensioning.staff_cost(args.lam, args.cost_ratio, args.mu),
                    "s_exact": dimensioning.optimize_cost_exact(args.lam, args.cost_ratio, args.mu)}
        _need(args, "target_delay")
        return {"beta_star": dimensioning.solve_beta_for_delay(args.target_delay),
                "s_srs": dimensioning.staff_constraint(args.lam, args.target_delay, args.mu),
                "s_exact": dimensioning.staff_exact(args.lam, args.target_delay, args.mu)}
    if args.model == "cloud":
        _need(args, "load", "kappa", "target_delay")
        return dimensioning.cloud_stationary_dimensioning(args.load, args.kappa, args.target_delay,
                                                          args.gamma_target or 0.0)
    if args.model == "erlang-r":
        _need(args, "lam", "delta", "p", "target_delay")
        gamma_target = args.gamma_target
        if args.beta_target is None and gamma_target is None:
            gamma_target = 0.0
        return dimensioning.erlang_r_holding_dimensioning(
            args.lam, args.mu, args.delta, args.p, args.target_delay,
            beta_target=args.beta_target, gamma_target=gamma_target)
    raise DomainError(f"unknown staffing model {args.model!r}")


def _erlang_r_spec(args: argparse.Namespace) -> erlang_r.ErlangRSpec:
    _need(args, "lam", "delta", "p", "s", "n")
    return erlang_r.ErlangRSpec(args.lam, args.mu, args.delta, args.p, args.s, args.n)


def _bulk_spec(args: argparse.Namespace) -> bulk.BulkSpec:
    if args.dist == "poisson":
        _need(args, "lam", "s")
        return bulk.BulkSpec(bulk.Poisson(args.lam), args.s)
    _need(args, "a", "b", "s")
    return bulk.BulkSpec(bulk.GammaPoisson(args.a, args.b), args.s)


def _cmd_eval(args: argparse.Namespace) -> Result:
    m = args.model
    if m in ("mms", "mmsn", "erlang-a"):
        _need(args, "lam", "s")
        base = mms.MmsSpec(args.lam, args.mu, args.s)
        if m == "mms":
            return mms.mms_metrics(base)
        if m == "mmsn":
            _need(args, "n")
            return mms.mmsn_metrics(mms.FiniteMmsSpec(base, args.n))
        _need(args, "theta")
        return mms.erlang_a_metrics(mms.AbandonSpec(base, args.theta))
    if m == "erlang-r-blocking":
        return erlang_r.blocking_measures(_erlang_r_spec(args))
    if m == "erlang-r-holding":
        spec = _erlang_r_spec(args)
        return erlang_r.holding_measures(erlang_r.qbd_solve(erlang_r.qbd_build(spec)), spec)
    if m == "bulk":
        spec = _bulk_spec(args)
        out = dict(bulk.pollaczek_measures(spec))
        out["mean_queue_roots"] = bulk.exact_measures_roots(spec)["mean_queue"]
        return out
    raise DomainError(f"unknown model {m!r}")


def _cmd_approx(args: argparse.Namespace) -> Result:
    m = args.model
    if m == "halfin-whitt":
        _need(args, "beta")
        return {"delay_prob": dimensioning.halfin_whitt_delay(args.beta)}
    if m == "finite":
        _need(args, "beta", "gamma")
        return retrial.finite_queue_limits(args.beta, args.gamma)
    if m == "erlang-a":
        _need(args, "beta", "theta")
        return retrial.erlang_a_limits(args.beta, args.theta)
    if m == "cloud":
        _need(args, "beta", "gamma", "kappa")
        return retrial.cloud_limits(args.beta, args.gamma, args.kappa)
    if m.startswith("retrial-"):
        kind = m.removeprefix("retrial-")
        keys = {"basic": ("beta", "gamma"), "cloud": ("beta", "gamma", "kappa"), "abandon": ("beta", "theta")}
        if kind not in keys:
            raise DomainError(f"unknown retrial model {kind!r}")
        _need(args, *keys[kind])
        return retrial.approx_with_retrials(kind, args.load or 1.0, **{k: getattr(args, k) for k in keys[kind]})
    if m in ("erlang-r-blocking", "erlang-r-holding"):
        _need(args, "beta", "gamma", "r")
        h = erlang_r.ErlangRAsymptotics(args.beta, args.gamma, args.r)
        if m == "erlang-r-blocking":
            return erlang_r.qed_limits_blocking(h, args.mu)
        return erlang_r.holding_heuristic(h, args.mu)
    if m == "bulk-poisson":
        _need(args, "s", "gamma")
        spec = regimes.poisson_spec(args.s, args.gamma, args.eta)
        out = {"regime": regimes.classify_regime(spec).name.lower(), "rho": spec.rho,
               "mean_leading": regimes.mean_leading(spec), "variance_leading": regimes.variance_leading(spec),
               "empty_prob": regimes.empty_prob_leading(spec)}
        if args.eta == 0.5:
            out["mean_corrected"] = regimes.mean_corrected_half(spec)
        return out
    if m == "gamma-poisson":
        _need(args, "beta")
        if args.a is not None and args.b is not None:
            spec = overdispersion.OverdispersedSpec(args.a, args.b, args.beta)
        else:
            _need(args, "s", "delta")
            spec = overdispersion.power_scaling(args.s, args.beta, args.delta)
        hedge = overdispersion.robust_hedge(spec)
        classic = overdispersion.classic_measures(spec)
        robust = overdispersion.robust_measures(spec)
        return {"a": spec.a, "b": spec.b, "s": spec.s, "beta_n": hedge.beta_n, "sigma_tilde": hedge.sigma_tilde,
                **{f"classic_{k}": v for k, v in classic.items()},
                **{f"robust_{k}": v for k, v in robust.items()}}
    if m == "grw":
        _need(args, "beta")
        mom = grw.grw_moments_integral(args.beta)
        return {"p0": mom.p0, "mean": mom.mean, "variance": mom.variance}
    raise DomainError(f"unknown model {m!r}")


def _cmd_roots(args: argparse.Namespace) -> Result:
    spec = _bulk_spec(args)
    rs = bulk.find_roots_bl(spec) if args.method == "bl" else bulk.find_roots_iter(spec)
    return [{"k": k + 1, "real": float(z.real), "imag": float(z.imag) if abs(z.imag) > 1e-14 else 0.0, "modulus": float(abs(z)),
             "residual": rs.residual, "method": rs.method} for k, z in enumerate(rs.roots)]


def _cmd_fit(args: argparse.Namespace) -> Result:
    try:
        counts = np.loadtxt(args.csv, delimiter=",", skiprows=1 if args.header else 0, ndmin=2)[:, 0]
    except (OSError, ValueError) as exc:
        raise DomainError(f"cannot read counts from {args.csv}: {exc}") from exc
    sample = overdispersion.CountSample(counts)
    disp = overdispersion.dispersion_test(sample, args.alpha)
    ns = overdispersion.neyman_scott_test(sample, args.alpha)
    out: dict[str, Any] = {
        "n_obs": sample.n_obs, "mean": sample.sample_mean, "variance": sample.sample_variance,
        "dispersion_statistic": disp["statistic"], "dispersion_p_value": disp["p_value"],
        "dispersion_reject": disp["reject"],
        "neyman_scott_statistic": ns["statistic"], "neyman_scott_p_value": ns["p_value"],
        "neyman_scott_reject": ns["reject"],
        "a_hat": None, "b_hat": None,
    }
    if sample.sample_variance > sample.sample_mean:
        fit = overdispersion.fit_gamma_poisson(sample)
        out["a_hat"], out["b_hat"] = fit["a_hat"], fit["b_hat"]
    else:
        print("sample is not overdispersed; no Gamma-Poisson fit", file=sys.stderr)
    return out


def _seed_override(args: argparse.Namespace) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _cmd_simulate(args: argparse.Namespace) -> Result:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read scenario {args.scenario}: {exc}") from exc
    seed = _seed_override(args)
    if seed is not None:
        scenario = scenario.replace_seed(seed)
    if args.reps is not None:
        scenario = type(scenario)(scenario.model, dict(scenario.params), scenario.horizon, scenario.warmup,
                                  args.reps, scenario.seed, scenario.staffing, scenario.lambda_curve,
                                  scenario.guard)
    return [e.as_row() for e in simulate(scenario)]


def _cmd_table(args: argparse.Namespace) -> Result:
    if args.list:
        return [{"id": e.table_id, "title": e.title} for e in tables.TABLES.values()]
    if args.id is None:
        raise DomainError("give --id or --list")
    return tables.build_table(args.id)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_rates(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, help="arrival rate")
    p.add_argument("--mu", type=float, default=1.0, help="service rate (default 1)")
    p.add_argument("--s", type=int, help="servers or per-period capacity")
    p.add_argument("--n", type=int, help="system capacity or beds")
    p.add_argument("--theta", type=float, help="abandonment rate")
    p.add_argument("--delta", type=float, help="content rate (Erlang-R) or overdispersion exponent")
    p.add_argument("--p", type=float, help="return probability (Erlang-R)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qedkit", description="Queueing analysis and dimensioning in the QED regime.")
    parser.add_argument("--version", action="version", version=f"qedkit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--precision", type=int, default=4, help="decimals in numeric output (default 4)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("staff", parents=[common], help="staffing and dimensioning")
    p.add_argument("--model", choices=("mms", "cloud", "erlang-r"), required=True)
    _add_rates(p)
    p.add_argument("--target-delay", type=float, help="delay probability target")
    p.add_argument("--cost-ratio", type=float, help="waiting-to-staffing cost ratio (mms)")
    p.add_argument("--load", type=float, help="offered load (cloud)")
    p.add_argument("--kappa", type=float, help="second-stage rate (cloud)")
    p.add_argument("--beta-target", type=float, help="preset server hedge (erlang-r)")
    p.add_argument("--gamma-target", type=float, help="preset space hedge (cloud, erlang-r)")
    p.add_argument("--curve", help="'ed' or a time,rate CSV: time-varying mms staffing")
    p.add_argument("--method", choices=("PSA", "MOL"), default="MOL")
    p.add_argument("--review-period", type=float, default=dimensioning.DEFAULT_REVIEW_PERIOD)
    p.set_defaults(handler=_cmd_staff)

    p = sub.add_parser("eval", parents=[common], help="exact performance measures")
    p.add_argument("--model", choices=("mms", "mmsn", "erlang-a", "erlang-r-blocking", "erlang-r-holding", "bulk"),
                   required=True)
    _add_rates(p)
    p.add_argument("--dist", choices=("poisson", "gamma-poisson"), default="poisson")
    p.add_argument("--a", type=float, help="Gamma shape")
    p.add_argument("--b", type=float, help="Gamma scale")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("approx", parents=[common], help="heavy-traffic approximations")
    p.add_argument("--model", required=True,
                   choices=("halfin-whitt", "finite", "erlang-a", "cloud", "retrial-basic", "retrial-cloud",
                            "retrial-abandon", "erlang-r-blocking", "erlang-r-holding", "bulk-poisson",
                            "gamma-poisson", "grw"))
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--r", type=float, help="needy time fraction (erlang-r)")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--load", type=float, help="offered load used to descale retrial results")
    p.add_argument("--s", type=int)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--delta", type=float, help="overdispersion exponent")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.set_defaults(handler=_cmd_approx)

    p = sub.add_parser("roots", parents=[common], help="roots of z^s = A(z) inside the unit disk")
    p.add_argument("--dist", choices=("poisson", "gamma-poisson"), default="poisson")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--method", choices=("iter", "bl"), default="iter")
    p.add_argument("--model", default="bulk", help=argparse.SUPPRESS)
    p.set_defaults(handler=_cmd_roots)

    p = sub.add_parser("fit", parents=[common], help="dispersion tests and Gamma-Poisson fit of counts")
    p.add_argument("--csv", required=True, help="one-column CSV of counts")
    p.add_argument("--header", action="store_true", help="first line is a header")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("simulate", parents=[common], help="replicated simulation of a JSON scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, help=f"overrides {SEED_ENV} and the file")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("table", parents=[common], help="rebuild a golden table")
    p.add_argument("--id")
    p.add_argument("--list", action="store_true")
    p.set_defaults(handler=_cmd_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.handler(args)
    except NumericalError as exc:
        print(f"qedkit: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, QedkitError) as exc:
        print(f"qedkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render(result, args.format, args.precision))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
