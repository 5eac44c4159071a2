"""Command-line front end: sweeps over the library, emitted as CSV.

    ocdma ber        --M 1 --L 1000 --W 20 --lam 2 --N 1:60
    ocdma design     --N 5:60:5 --pe-th 1e-5,1e-7,1e-9 --method heuristic
    ocdma simulate   --mode rate --p-active 0.1:1.0:0.1 --pe-th 1e-7
    ocdma complexity --N 60 --pe-th 1e-7
    ocdma codebooks  --mode power --N 60 --pe-th 1e-7

A ``--config`` JSON document may hold any option of the command (keys are
the option names with dashes turned into underscores); flags given on the
command line win. Exit status is 0 when every sweep point is feasible, 3
when some point is infeasible and 2 on invalid input; in both failure cases
a one-line JSON error record goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from .allocation import (
    InfeasibleDesign,
    SimConfig,
    build_codebooks,
    read_event_trace,
    run_message_simulation,
    simulate_gain,
)
from .ber import DEFAULT_PRECISION, approx_ber_single, ber_single
from .combinatorics import CodeParams
from .design import (
    SearchBounds,
    power_optimize_brute,
    rate_optimize_brute,
    rate_optimize_heuristic,
)

EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

COMMANDS = ("ber", "design", "simulate", "complexity", "codebooks")
SHARED = {"command", "out", "seed", "precision", "threads"}
BOUNDS = {"l_max", "w_max", "lambda_max"}
ALLOWED = {
    "ber": SHARED | {"N", "M", "L", "W", "lam"},
    "design": SHARED | BOUNDS | {"N", "M", "pe_th", "method", "L"},
    "simulate": SHARED | BOUNDS | {"N", "M", "pe_th", "method", "mode", "p_active", "intervals",
                                   "T", "events", "ticks"},
    "complexity": SHARED | BOUNDS | {"N", "M", "pe_th"},
    "codebooks": SHARED | BOUNDS | {"N", "M", "pe_th", "method", "mode"},
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    out: str | None = None
    seed: int = 42
    precision: int = DEFAULT_PRECISION
    threads: int = 1
    N: list | None = None
    M: int = 1
    L: int | None = None
    W: int | None = None
    lam: int | None = None
    pe_th: list | None = None
    method: str | None = None
    mode: str = "rate"
    p_active: list | None = None
    intervals: int = 100_000
    T: float = 1.0
    events: str | None = None
    ticks: int | None = None
    l_max: int = 4000
    w_max: int = 100
    lambda_max: int = 5

    @property
    def bounds(self) -> SearchBounds:
        return SearchBounds(self.l_max, self.w_max, self.lambda_max)


# ---- value parsing ---------------------------------------------------------

def _expand(text, kind):
    """'a:b[:step]' (inclusive) or 'a,b,c' -> list."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return [kind(text)]
    if isinstance(text, list):
        return [kind(x) for x in text]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"bad range {text!r}")
        a, b = kind(parts[0]), kind(parts[1])
        step = kind(parts[2]) if len(parts) == 3 else kind(1)
        if step <= 0 or b < a:
            raise UsageError(f"bad range {text!r}")
        out, k = [], 0
        while True:
            # index-based so float ranges do not drift past the end
            x = a + k * step
            if x > b + (1e-9 * step if kind is float else 0):
                break
            out.append(round(x, 12) if kind is float else x)
            k += 1
        return out
    return [kind(x) for x in text.split(",") if x.strip()]


_SCALAR = {"out": str, "seed": int, "precision": int, "threads": int, "M": int, "L": int,
           "W": int, "lam": int, "method": str, "mode": str, "intervals": int, "T": float,
           "events": str, "ticks": int, "l_max": int, "w_max": int, "lambda_max": int,
           "command": str}
_LIST = {"N": int, "pe_th": float, "p_active": float}


def _coerce(key, value):
    try:
        if key in _LIST:
            return _expand(value, _LIST[key])
        kind = _SCALAR[key]
        if kind is int and (isinstance(value, bool) or (isinstance(value, float) and not value.is_integer())):
            raise UsageError(f"{key} must be an integer")
        return kind(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def make_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Defaults < config file < flags; unknown keys are rejected."""
    known = {f.name for f in fields(RunConfig)}
    merged = {}
    for source in (file_values, flag_values):
        for key, value in source.items():
            if key not in known or key not in ALLOWED[command]:
                raise UsageError(f"unknown option {key!r} for command {command!r}")
            if key == "command" and value != command:
                raise UsageError(f"config is for command {value!r}, not {command!r}")
            merged[key] = _coerce(key, value)
    merged["command"] = command
    cfg = RunConfig(**merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.threads < 1:
        raise UsageError("threads must be >= 1")
    if cfg.M < 1:
        raise UsageError("M must be >= 1")
    if cfg.command != "ber" and cfg.pe_th is None:
        raise UsageError("--pe-th is required")
    for pe in cfg.pe_th or []:
        if not 0 < pe < 0.5:
            raise UsageError("Pe_th must lie in (0, 1/2)")
    if cfg.N is None:
        raise UsageError("--N is required")
    if any(n < 1 for n in cfg.N):
        raise UsageError("N must be >= 1")
    if cfg.command == "ber":
        if None in (cfg.L, cfg.W, cfg.lam):
            raise UsageError("ber needs --L, --W and --lam")
        p = CodeParams(cfg.M, cfg.L, cfg.W, cfg.lam)
        if not p.lam <= p.W <= p.length:
            raise UsageError("need lambda <= W <= M*L")
    if cfg.command in ("simulate", "complexity", "codebooks") and len(cfg.N) != 1:
        raise UsageError(f"{cfg.command} takes a single N")
    if cfg.command in ("complexity",) and len(cfg.pe_th) != 1:
        raise UsageError("complexity takes a single Pe_th")
    if cfg.mode not in ("rate", "power"):
        raise UsageError("mode must be rate or power")
    if cfg.command == "design":
        cfg.method = cfg.method or "heuristic"
        if cfg.method not in ("brute", "heuristic", "power"):
            raise UsageError("method must be brute, heuristic or power")
    elif cfg.command in ("simulate", "codebooks"):
        cfg.method = cfg.method or "heuristic"
        if cfg.method not in ("brute", "heuristic"):
            raise UsageError("table method must be brute or heuristic")
    if cfg.command == "simulate":
        if cfg.events is None:
            if not cfg.p_active:
                raise UsageError("--p-active is required")
            if any(not 0 < p <= 1 for p in cfg.p_active):
                raise UsageError("p_active must lie in (0, 1]")
        elif len(cfg.pe_th) != 1:
            raise UsageError("message-driven simulation takes a single Pe_th")
        if cfg.intervals < 1 or cfg.T <= 0:
            raise UsageError("intervals must be >= 1 and T > 0")
    cfg.bounds  # validates


# ---- sweep points (module level so worker processes can pickle them) --------

def _ber_point(args):
    n, p, precision = args
    try:
        exact = float(ber_single(n, p, precision))
    except ValueError as exc:
        return n, None, str(exc)
    return n, exact, approx_ber_single(n, p)


def _design_point(args):
    n, M, pe, method, L, bounds, precision = args
    if method == "brute":
        return rate_optimize_brute(n, M, pe, bounds, precision)
    if method == "heuristic":
        return rate_optimize_heuristic(n, M, pe, precision)
    return power_optimize_brute(n, M, L, pe, bounds, precision)


def _fmt(x) -> str:
    return f"{x:.17g}"


def _pmap(fn, items, threads):
    if threads == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


# ---- commands ----------------------------------------------------------------

def cmd_ber(cfg: RunConfig):
    p = CodeParams(cfg.M, cfg.L, cfg.W, cfg.lam)
    rows, bad = [], []
    for n, exact, approx in _pmap(_ber_point, [(n, p, cfg.precision) for n in cfg.N], cfg.threads):
        if exact is None:
            # worst-case model undefined here; keep the approximation visible
            bad.append({"N": n, "reason": approx})
            rows.append([n, "", _fmt(approx_ber_single(n, p))])
            continue
        rows.append([n, _fmt(exact), _fmt(approx)])
    return ["N", "exact", "approx"], rows, bad


def cmd_design(cfg: RunConfig):
    points = []
    for pe in cfg.pe_th:
        L = cfg.L
        if cfg.method == "power" and L is None:
            # default shared length: the rate-optimized design for the largest N
            top = rate_optimize_heuristic(max(cfg.N), cfg.M, pe, cfg.precision)
            if not top.feasible:
                raise InfeasibleDesign(f"no rate design for N={max(cfg.N)} to fix L")
            L = top.L
        for n in cfg.N:
            points.append((n, cfg.M, pe, cfg.method, L, cfg.bounds, cfg.precision))
    rows, bad = [], []
    for pt, res in zip(points, _pmap(_design_point, points, cfg.threads)):
        n, pe = pt[0], pt[2]
        if not res.feasible:
            bad.append({"N": n, "pe_th": pe})
        cells = ["" if v is None else v for v in res.params]
        rows.append([n, repr(pe), *cells, res.eval_count, res.method])
    return ["N", "Pe_th", "L", "W", "lambda", "eval_count", "method"], rows, bad


def _table(cfg: RunConfig, mode, pe):
    return build_codebooks(mode, cfg.N[0], cfg.M, pe, cfg.method, cfg.bounds, cfg.precision)


def cmd_codebooks(cfg: RunConfig):
    rows = []
    for pe in cfg.pe_th:
        table = _table(cfg, cfg.mode, pe)
        for n in range(1, table.N + 1):
            rows.append([cfg.mode, repr(pe), n, *table[n]])
    return ["mode", "Pe_th", "n", "L", "W", "lambda"], rows, []


def cmd_simulate(cfg: RunConfig):
    if cfg.events is not None:
        pe = cfg.pe_th[0]
        table = _table(cfg, cfg.mode, pe)
        sim = SimConfig(cfg.N[0], cfg.M, pe, 1.0, cfg.intervals, cfg.seed, cfg.T, cfg.mode)
        out = run_message_simulation(sim, table, read_event_trace(cfg.events), cfg.ticks)
        return (["time", "book", "L", "W", "lambda"],
                [[repr(a.time), a.book, a.L, a.W, a.lam] for a in out], [])
    rows = []
    for pe in cfg.pe_th:
        table = _table(cfg, cfg.mode, pe)
        for pa in cfg.p_active:
            sim = SimConfig(cfg.N[0], cfg.M, pe, pa, cfg.intervals, cfg.seed, cfg.T, cfg.mode)
            rep = simulate_gain(sim, table)
            # default variant first, then the alternatives
            order = [rep.variant] + [v for v in rep.variants if v != rep.variant]
            for name in order:
                g, se = rep.variants[name]
                rows.append([repr(pa), repr(pe), _fmt(g), _fmt(se), name, rep.intervals_used])
    return ["p_active", "Pe_th", "gain", "stderr", "variant", "intervals_used"], rows, []


def cmd_complexity(cfg: RunConfig):
    n, pe = cfg.N[0], cfg.pe_th[0]
    brute = rate_optimize_brute(n, cfg.M, pe, cfg.bounds, cfg.precision)
    heur = rate_optimize_heuristic(n, cfg.M, pe, cfg.precision)
    if not (brute.feasible and heur.feasible):
        return ["N", "Pe_th", "brute_evals", "heuristic_evals", "ratio"], [], [{"N": n, "pe_th": pe}]
    ratio = brute.eval_count / heur.eval_count
    print(_fmt(ratio))
    return (["N", "Pe_th", "brute_evals", "heuristic_evals", "ratio"],
            [[n, repr(pe), brute.eval_count, heur.eval_count, _fmt(ratio)]], [])


HANDLERS = {"ber": cmd_ber, "design": cmd_design, "simulate": cmd_simulate,
            "complexity": cmd_complexity, "codebooks": cmd_codebooks}


# ---- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocdma", description="OCDMA code design and adaptive allocation")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS  # only flags actually given reach the namespace

    def shared(p):
        p.add_argument("--config", default=S, help="JSON file with option values")
        p.add_argument("--out", default=S, help="CSV output path (default stdout)")
        p.add_argument("--seed", default=S)
        p.add_argument("--precision", default=S, help="decimal digits for the exact BER")
        p.add_argument("--threads", default=S, help="worker processes for sweeps")

    def bounds(p):
        p.add_argument("--l-max", dest="l_max", default=S)
        p.add_argument("--w-max", dest="w_max", default=S)
        p.add_argument("--lambda-max", dest="lambda_max", default=S)

    p = sub.add_parser("ber", help="exact vs approximate BER over a user sweep")
    shared(p)
    p.add_argument("--N", default=S, help="user counts, e.g. 1:60 or 5,10,20")
    for flag in ("--M", "--L", "--W"):
        p.add_argument(flag, default=S)
    p.add_argument("--lam", "--lambda", dest="lam", default=S)

    p = sub.add_parser("design", help="rate- or power-optimized code design sweep")
    shared(p)
    bounds(p)
    p.add_argument("--N", default=S)
    p.add_argument("--M", default=S)
    p.add_argument("--pe-th", dest="pe_th", default=S)
    p.add_argument("--method", default=S, choices=["brute", "heuristic", "power"])
    p.add_argument("--L", default=S, help="fixed length for --method power")

    p = sub.add_parser("simulate", help="Monte-Carlo adaptive gains or message replay")
    shared(p)
    bounds(p)
    p.add_argument("--N", default=S)
    p.add_argument("--M", default=S)
    p.add_argument("--pe-th", dest="pe_th", default=S)
    p.add_argument("--mode", default=S, choices=["rate", "power"])
    p.add_argument("--method", default=S, choices=["brute", "heuristic"], help="table optimizer")
    p.add_argument("--p-active", dest="p_active", default=S)
    p.add_argument("--intervals", default=S)
    p.add_argument("--T", default=S, help="reallocation interval (message replay)")
    p.add_argument("--events", default=S, help="event trace CSV: time,user_id,activate|deactivate")
    p.add_argument("--ticks", default=S)

    p = sub.add_parser("complexity", help="brute-force / heuristic evaluation-count ratio")
    shared(p)
    bounds(p)
    p.add_argument("--N", default=S)
    p.add_argument("--M", default=S)
    p.add_argument("--pe-th", dest="pe_th", default=S)

    p = sub.add_parser("codebooks", help="offline codebook table")
    shared(p)
    bounds(p)
    p.add_argument("--N", default=S)
    p.add_argument("--M", default=S)
    p.add_argument("--pe-th", dest="pe_th", default=S)
    p.add_argument("--mode", default=S, choices=["rate", "power"])
    p.add_argument("--method", default=S, choices=["brute", "heuristic"])
    return parser


def _error(kind, command, **extra):
    record = {"error": kind, "command": command, **extra}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _write(cfg: RunConfig, header, rows):
    fh = open(cfg.out, "w", newline="", encoding="utf-8") if cfg.out else None
    try:
        target = fh if fh else (sys.stdout if cfg.command != "complexity" else None)
        if target is None:
            return
        w = csv.writer(target, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh:
            fh.close()


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        file_values = {}
        if config_path:
            with open(config_path, encoding="utf-8") as fh:
                file_values = json.load(fh)
            if not isinstance(file_values, dict):
                raise UsageError("config must be a JSON object")
        cfg = make_config(command, file_values, args)
        header, rows, bad = HANDLERS[command](cfg)
    except InfeasibleDesign as exc:
        _error("infeasible", command, message=str(exc))
        return EXIT_INFEASIBLE
    except (UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        _error("invalid_input", command, message=str(exc))
        return EXIT_INVALID
    _write(cfg, header, rows)
    if bad:
        _error("infeasible", command, points=bad)
        return EXIT_INFEASIBLE
    return 0


if __name__ == "__main__":
    sys.exit(main())
