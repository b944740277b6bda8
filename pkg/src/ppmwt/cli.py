"""Command-line front end.

    ppmwt capacity --eta 0.8 --E-sweep 1e-9:1e-3:1
    ppmwt params   --eta 0.8 --E 1e-4 --theta 0.1
    ppmwt bounds   --eta 0.8 --E 1e-5 --theta 0.2 --lambda 1000
    ppmwt optimize --eta 0.8 --E-sweep 1e-10:1e-2:1 --workers 4 --out fig2.csv
    ppmwt simulate --b 8 --k 2 --eta 0.8 --alpha-sq 2.0 --trials 100000 --rng-seed 7
    ppmwt selftest

Every data command writes CSV (header row, fixed column order, floats with
17 significant digits).  Values from ``--config FILE`` (``key = value``
lines, ``#`` comments) are overridden by flags.  ``PPMWT_LOG`` sets the log
level.

Exit codes: 0 success, 1 usage error, 2 infeasible parameters, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Optional

from ppmwt import bounds, pipeline, selftest
from ppmwt.params import InfeasibleError, SchemeParams

log = logging.getLogger("ppmwt")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS: dict[str, Any] = {
    "eta": 0.8,
    "E": None,
    "E_sweep": None,
    "pr_error_target": 1e-6,
    "delta_target": 0.05,
    "trials": 10000,
    "rng_seed": 0,
    "workers": 1,
    "out": None,
    "theta": 0.1,
    "b": None,
    "k": None,
    "alpha_sq": None,
    "lam": 1,
    "eps": None,
    "delta": None,
    "engine": "full",
    "inject_fault": False,
}
DEFAULT_SWEEPS = {
    "capacity": "1e-9:1e-3:1",
    "optimize": "1e-10:1e-2:1",
}

OPTIMIZE_COLUMNS = ["E", "b", "n", "k", "lambda_bits", "alpha_sq", "theta", "delta",
                    "eps", "rate_nats", "capacity_nats", "feasible"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Config and formatting
# ---------------------------------------------------------------------------

_TYPES = {
    "eta": float, "E": float, "E_sweep": str, "pr_error_target": float,
    "delta_target": float, "trials": int, "rng_seed": int, "workers": int,
    "out": str, "theta": float, "b": int, "k": int, "alpha_sq": float,
    "lam": int, "eps": float, "delta": float, "engine": str,
    "inject_fault": lambda v: v.strip().lower() in ("1", "true", "yes"),
}


def read_config(path: str) -> dict[str, Any]:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in _TYPES:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _TYPES[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults < config file < flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    return cfg


def parse_sweep(text: str) -> list[float]:
    """``lo:hi:per_decade`` -> log-spaced values from lo to hi inclusive."""
    try:
        lo, hi, per = text.split(":")
        lo, hi, per = float(lo), float(hi), int(per)
    except ValueError:
        raise UsageError(f"bad sweep {text!r}; expected lo:hi:points_per_decade") from None
    if not 0 < lo <= hi or per < 1:
        raise UsageError(f"bad sweep {text!r}")
    a, b = math.log10(lo), math.log10(hi)
    steps = round((b - a) * per)
    return [float(f"{10 ** (a + (b - a) * i / steps if steps else a):.12g}")
            for i in range(steps + 1)]


def energies(cfg: dict[str, Any], command: str) -> list[float]:
    if cfg["E"] is not None:
        return [cfg["E"]]
    return parse_sweep(cfg["E_sweep"] or DEFAULT_SWEEPS.get(command, ""))


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(columns: list[str], rows: list[dict[str, Any]], out: Optional[str]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _check_eta(eta: float) -> None:
    if not 0.5 <= eta < 1:
        raise UsageError(f"--eta {eta} outside [0.5, 1)")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_capacity(cfg: dict[str, Any]) -> int:
    _check_eta(cfg["eta"])
    rows = []
    for E in energies(cfg, "capacity"):
        if E < 0:
            raise UsageError("--E must be non-negative")
        rows.append({"E": E, "eta": cfg["eta"],
                     "capacity_nats": bounds.secrecy_capacity(cfg["eta"], E),
                     "approx_nats": bounds.secrecy_capacity_approx(cfg["eta"], E)})
    write_csv(["E", "eta", "capacity_nats", "approx_nats"], rows, cfg["out"])
    return EXIT_OK


def cmd_params(cfg: dict[str, Any]) -> int:
    _check_eta(cfg["eta"])
    rows = []
    for E in energies(cfg, "params"):
        p = bounds.choose_params(cfg["eta"], E, cfg["theta"])
        rows.append({"E": E, "eta": p.eta, "theta": cfg["theta"], "b": p.b, "n": p.n,
                     "k": p.k, "alpha_sq": p.pulse_energy, "erasure_prob": p.erasure_prob,
                     "frame_target": bounds.frame_target(p.eta, E)})
    write_csv(["E", "eta", "theta", "b", "n", "k", "alpha_sq", "erasure_prob",
               "frame_target"], rows, cfg["out"])
    return EXIT_OK


def _explicit_params(cfg: dict[str, Any]) -> SchemeParams:
    missing = [f for f in ("b", "k", "alpha_sq") if cfg[f] is None]
    if missing:
        raise UsageError("need --" + ", --".join(m.replace("_", "-") for m in missing))
    return SchemeParams(eta=cfg["eta"], b=cfg["b"], k=cfg["k"],
                        pulse_energy=cfg["alpha_sq"], lam=cfg["lam"])


def cmd_bounds(cfg: dict[str, Any]) -> int:
    _check_eta(cfg["eta"])
    if cfg["b"] is not None:
        cases = [(None, _explicit_params(cfg))]
    else:
        cases = [(E, bounds.choose_params(cfg["eta"], E, cfg["theta"]).with_lam(cfg["lam"]))
                 for E in energies(cfg, "bounds")]
    rows = []
    for E, p in cases:
        if cfg["eps"] is not None and cfg["delta"] is not None:
            budget = bounds.SecurityBudget.derive(p, cfg["eps"], cfg["delta"], cfg["theta"])
            report = bounds.delta_bound(p, budget)
        else:
            budget, report = bounds.minimize_delta(p, cfg["delta_target"])
        rows.append({
            "E": E, "eta": p.eta, "b": p.b, "n": p.n, "k": p.k, "lambda_bits": p.lam,
            "alpha_sq": p.pulse_energy, "delta": budget.delta, "eps": budget.eps,
            "eps_prime": budget.eps_prime, "photon_cutoff": budget.photon_cutoff,
            "pr_error_bound": report.pr_error_bound, "delta_bound": report.delta_bound,
            "vacuous": report.delta_vacuous, "rate_nats": report.rate_nats_per_use,
            "hmin_nats": report.hmin_term, "hmax_nats": report.hmax_term,
        })
    write_csv(["E", "eta", "b", "n", "k", "lambda_bits", "alpha_sq", "delta", "eps",
               "eps_prime", "photon_cutoff", "pr_error_bound", "delta_bound", "vacuous",
               "rate_nats", "hmin_nats", "hmax_nats"], rows, cfg["out"])
    return EXIT_OK


def optimize_row(eta: float, E: float, pr_target: float, delta_target: float) -> dict[str, Any]:
    res = bounds.optimize(eta, E, pr_target, delta_target)
    row = {"E": E, "rate_nats": res.rate, "capacity_nats": res.capacity,
           "feasible": res.feasible, "k": 0, "lambda_bits": 0}
    if res.params is not None:
        p, budget = res.params, res.budget
        row.update(b=p.b, n=p.n, k=p.k, lambda_bits=p.lam, alpha_sq=p.pulse_energy,
                   theta=budget.theta, delta=budget.delta, eps=budget.eps)
    elif bounds.frame_target(eta, E) >= 8:
        b = bounds.frame_size(eta, E)
        row.update(b=b, n=b - 1, alpha_sq=b * E)
    return row


def cmd_optimize(cfg: dict[str, Any]) -> int:
    _check_eta(cfg["eta"])
    Es = energies(cfg, "optimize")
    args = [(cfg["eta"], E, cfg["pr_error_target"], cfg["delta_target"]) for E in Es]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            rows = list(pool.map(optimize_row, *zip(*args)))
    else:
        rows = [optimize_row(*a) for a in args]
    write_csv(OPTIMIZE_COLUMNS, rows, cfg["out"])
    return EXIT_OK


def cmd_simulate(cfg: dict[str, Any]) -> int:
    if cfg["trials"] < 1 or cfg["workers"] < 1:
        raise UsageError("--trials and --workers must be positive")
    p = _explicit_params(cfg)
    try:
        p.channel
    except ValueError as exc:
        raise InfeasibleError(str(exc)) from None
    res = pipeline.run_trials(p, cfg["trials"], cfg["rng_seed"], cfg["workers"], cfg["engine"])
    bound = bounds.pr_error_bound(p.n, p.k, p.erasure_prob)
    row = {"b": p.b, "n": p.n, "k": p.k, "lambda_bits": p.lam, "eta": p.eta,
           "alpha_sq": p.pulse_energy, "erasure_prob": p.erasure_prob,
           "engine": res.engine, "trials": res.trials, "errors": res.errors,
           "empirical_error": res.error_rate, "radius": res.radius,
           "pr_error_bound": bound,
           "dominance": "pass" if res.error_rate <= bound + res.radius else "fail"}
    write_csv(list(row), [row], cfg["out"])
    return EXIT_OK


def cmd_selftest(cfg: dict[str, Any]) -> int:
    results = selftest.run(fault=cfg["inject_fault"])
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {
    "capacity": (cmd_capacity, "secrecy capacity and its low-photon approximation"),
    "params": (cmd_params, "frame size, pulse energy and code dimension for a budget"),
    "bounds": (cmd_bounds, "finite-length error and secrecy bounds"),
    "optimize": (cmd_optimize, "best achievable rate per photon budget"),
    "simulate": (cmd_simulate, "Monte-Carlo error rate against the analytic bound"),
    "selftest": (cmd_selftest, "exhaustive small-instance oracle suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--eta", type=float)
    common.add_argument("--E", type=float, dest="E")
    common.add_argument("--E-sweep", dest="E_sweep", metavar="LO:HI:PER_DECADE")
    common.add_argument("--pr-error-target", type=float)
    common.add_argument("--delta-target", type=float)
    common.add_argument("--trials", type=int)
    common.add_argument("--rng-seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH")

    parser = _Parser(prog="ppmwt", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name in ("params", "bounds"):
            sp.add_argument("--theta", type=float)
        if name in ("bounds", "simulate"):
            sp.add_argument("--b", type=int)
            sp.add_argument("--k", type=int)
            sp.add_argument("--alpha-sq", type=float)
            sp.add_argument("--lambda", type=int, dest="lam")
        if name == "bounds":
            sp.add_argument("--eps", type=float)
            sp.add_argument("--delta", type=float)
        if name == "simulate":
            sp.add_argument("--engine", choices=["full", "erasure"])
        if name == "selftest":
            sp.add_argument("--inject-fault", action="store_true", default=None,
                            help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    level = os.environ.get("PPMWT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        return fn(resolve(args))
    except UsageError as exc:
        print(f"ppmwt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"ppmwt {args.command}: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"ppmwt {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"ppmwt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
