"""Adaptive code reallocation for an OCDMA PON.

Offline, a codebook is designed for every possible number of active users
``n = 1..N``. Online, the control unit tracks ``n`` from activation and
deactivation messages and, once per reallocation interval ``T``, announces
the codebook for the current ``n``.

* rate mode: each ``n`` gets its own rate-optimized (shortest) code, so idle
  users' capacity becomes a higher per-user rate.
* power mode: the length designed for ``N`` users is kept and each ``n``
  gets the lightest code that still meets the BER target, so fewer pulses
  (less optical power) are sent per bit.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .ber import DEFAULT_PRECISION, ber_single
from .combinatorics import CodeParams, check_constraints
from .design import (
    SearchBounds,
    power_optimize_brute,
    rate_optimize_brute,
    rate_optimize_heuristic,
)

MODES = ("rate", "power")


class InfeasibleDesign(RuntimeError):
    pass


@dataclass(frozen=True)
class CodebookTable:
    mode: str
    N: int
    M: int
    pe_th: float
    entries: dict  # n -> (L, W, lam)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if sorted(self.entries) != list(range(1, self.N + 1)):
            raise ValueError("table needs exactly one entry per n = 1..N")

    def __getitem__(self, n: int) -> tuple[int, int, int]:
        return self.entries[n]

    def lengths(self) -> np.ndarray:
        """``L_n`` indexed by n (index 0 unused)."""
        return np.array([0] + [self.entries[n][0] for n in range(1, self.N + 1)], dtype=float)

    def weights(self) -> np.ndarray:
        return np.array([0] + [self.entries[n][1] for n in range(1, self.N + 1)], dtype=float)

    def is_feasible(self, n: int, precision: int = DEFAULT_PRECISION) -> bool:
        """Re-check C1-C4 for entry ``n`` serving ``n`` users."""
        L, W, lam = self.entries[n]
        p = CodeParams(self.M, L, W, lam)
        return check_constraints(n, p).all and ber_single(n, p, precision) <= self.pe_th


def build_codebooks(mode: str, N: int, M: int, pe_th: float, method: str = "heuristic",
                    bounds: SearchBounds = SearchBounds(), precision: int = DEFAULT_PRECISION,
                    executor=None) -> CodebookTable:
    """Design the offline table for every load level ``n = 1..N``.

    ``method`` picks the rate optimizer (``heuristic`` or ``brute``); in power
    mode it only fixes the shared length from the N-user rate design.
    ``executor`` may be a ``concurrent.futures`` executor to fan out the
    per-n designs. Any infeasible n aborts the whole table.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if N < 1:
        raise ValueError("N must be >= 1")
    if method not in ("heuristic", "brute"):
        raise ValueError("method must be 'heuristic' or 'brute'")
    rate_design = _RateDesign(M, pe_th, method, bounds, precision)

    mapper = executor.map if executor is not None else map
    users = range(1, N + 1)
    if mode == "rate":
        results = list(mapper(rate_design, users))
    else:
        top = rate_design(N)
        if not top.feasible:
            raise InfeasibleDesign(f"no rate-optimized design for N={N}")
        results = list(mapper(_PowerDesign(M, top.L, pe_th, bounds, precision), users))

    entries = {}
    for n, res in zip(users, results):
        if not res.feasible:
            raise InfeasibleDesign(f"no {mode} design for n={n} (M={M}, Pe_th={pe_th})")
        entries[n] = res.params
    return CodebookTable(mode, N, M, pe_th, entries)


# picklable stand-ins for closures, so process pools can run them
@dataclass(frozen=True)
class _RateDesign:
    M: int
    pe_th: float
    method: str
    bounds: SearchBounds
    precision: int

    def __call__(self, n):
        if self.method == "brute":
            return rate_optimize_brute(n, self.M, self.pe_th, self.bounds, self.precision)
        return rate_optimize_heuristic(n, self.M, self.pe_th, self.precision)


@dataclass(frozen=True)
class _PowerDesign:
    M: int
    L: int
    pe_th: float
    bounds: SearchBounds
    precision: int

    def __call__(self, n):
        return power_optimize_brute(n, self.M, self.L, self.pe_th, self.bounds, self.precision)


@dataclass(frozen=True)
class SimConfig:
    N: int
    M: int
    pe_th: float
    p_active: float
    intervals: int = 100_000
    seed: int = 42
    T: float = 1.0
    mode: str = "rate"

    def __post_init__(self):
        if not 0 <= self.p_active <= 1:
            raise ValueError("p_active must lie in [0, 1]")
        if self.intervals < 1:
            raise ValueError("intervals must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.T <= 0:
            raise ValueError("T must be positive")


@dataclass(frozen=True)
class GainReport:
    """Monte-Carlo gain estimate.

    ``gain``/``stderr`` are the default variant; ``variants`` holds every
    computed averaging as ``name -> (gain, stderr)``.
    """

    gain: float
    stderr: float
    intervals_used: int
    variant: str
    variants: dict = field(default_factory=dict)
    per_interval_trace: list | None = None


def _ratio_stderr(num: np.ndarray, den: np.ndarray) -> float:
    # delta-method standard error of sum(num) / sum(den)
    k = len(num)
    if k < 2:
        return 0.0
    r = num.sum() / den.sum()
    resid = num - r * den
    return float(np.sqrt(resid.var(ddof=1) / k) / den.mean())


def _mean_stderr(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / np.sqrt(len(x))) if len(x) > 1 else 0.0


def simulate_gain(cfg: SimConfig, table: CodebookTable, trace: bool = False) -> GainReport:
    """Estimate the rate gain or power gain of adaptive allocation.

    Each interval draws the active count ``n ~ Binomial(N, p_active)``;
    intervals with nobody active are skipped.

    rate: ``mean(L_N / L_n)``; the per-user rate is ``Rc / L`` at a fixed chip rate.
    power: ``sum(n W_n) / sum(n W_N)``, the ratio of total transmitted
    pulses per bit across active users (default, ``weighted``), alongside the
    per-interval code weight ratio ``mean(W_n) / W_N`` (``unweighted``).
    """
    if table.mode != cfg.mode:
        raise ValueError(f"table mode {table.mode!r} does not match simulation mode {cfg.mode!r}")
    if (table.N, table.M, table.pe_th) != (cfg.N, cfg.M, cfg.pe_th):
        raise ValueError("table was built for a different (N, M, Pe_th)")
    if cfg.p_active == 0:
        raise ValueError("p_active = 0 leaves no active users; the gain is undefined")

    rng = np.random.default_rng(cfg.seed)
    n = rng.binomial(cfg.N, cfg.p_active, size=cfg.intervals)
    n = n[n > 0]
    if len(n) == 0:
        raise ValueError("every interval was idle; increase intervals or p_active")

    if cfg.mode == "rate":
        L = table.lengths()
        ratios = L[cfg.N] / L[n]
        variants = {"mean_ratio": (float(ratios.mean()), _mean_stderr(ratios))}
        default = "mean_ratio"
        per = L[n]
    else:
        W = table.weights()
        used = W[n]
        full = W[cfg.N]
        weighted = float((n * used).sum() / (n * full).sum())
        unweighted_x = used / full
        variants = {
            "weighted": (weighted, _ratio_stderr(n * used, n * np.full_like(used, full))),
            "unweighted": (float(unweighted_x.mean()), _mean_stderr(unweighted_x)),
        }
        default = "weighted"
        per = used

    gain, err = variants[default]
    return GainReport(
        gain=gain,
        stderr=err,
        intervals_used=int(len(n)),
        variant=default,
        variants=variants,
        per_interval_trace=list(zip(n.tolist(), per.astype(int).tolist())) if trace else None,
    )


@dataclass(frozen=True)
class Assignment:
    time: float
    book: int
    L: int
    W: int
    lam: int


@dataclass(frozen=True)
class Event:
    time: float
    user: int
    action: str  # "activate" | "deactivate"


def read_event_trace(path) -> list[Event]:
    """Parse ``time,user_id,activate|deactivate`` lines. A header row is allowed."""
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() == "time":
                continue
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected time,user_id,action")
            t, user, action = (x.strip() for x in row)
            if action not in ("activate", "deactivate"):
                raise ValueError(f"line {lineno}: unknown action {action!r}")
            events.append(Event(float(t), int(user), action))
    return events


def write_event_trace(path, events: Iterable[Event]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "user_id", "action"])
        for e in events:
            w.writerow([repr(float(e.time)), e.user, e.action])


def run_message_simulation(cfg: SimConfig, table: CodebookTable, events: Iterable,
                           ticks: int | None = None) -> list[Assignment]:
    """Replay control messages through the online allocation loop.

    All N users start active and codebook N is announced at time 0. Timer
    interrupts fire at T, 2T, ...; a message arriving at the same instant as
    an interrupt is applied first. ``ticks`` sets how many interrupts to
    run; by default enough to pass the last message. No announcement is made
    at an interrupt where nobody is active.
    """
    events = [e if isinstance(e, Event) else Event(*e) for e in events]
    for a, b in zip(events, events[1:]):
        if b.time < a.time:
            raise ValueError("events must be sorted by time")
    if ticks is None:
        last = events[-1].time if events else 0.0
        ticks = int(math.floor(last / cfg.T)) + 1
    active = set(range(1, cfg.N + 1))

    def announce(t):
        n = len(active)
        if n:
            out.append(Assignment(t, n, *table[n]))

    out: list[Assignment] = []
    announce(0.0)
    i = 0
    for tick in range(1, ticks + 1):
        t_cr = tick * cfg.T
        while i < len(events) and events[i].time <= t_cr:
            e = events[i]
            if not 1 <= e.user <= cfg.N:
                raise ValueError(f"user id {e.user} outside 1..{cfg.N}")
            if e.action == "activate":
                if e.user in active:
                    raise ValueError(f"user {e.user} activated twice at t={e.time}")
                active.add(e.user)
            elif e.action == "deactivate":
                if e.user not in active:
                    raise ValueError(f"user {e.user} deactivated while inactive at t={e.time}")
                active.remove(e.user)
            else:
                raise ValueError(f"unknown action {e.action!r}")
            i += 1
        announce(t_cr)
    return out


def random_event_trace(cfg: SimConfig, ticks: int) -> list[Event]:
    """Per-interval Bernoulli activity turned into activation/deactivation messages.

    Each user's state is redrawn once per interval at a uniformly random
    instant inside it, so the trace is a message-level view of the same
    activity model used by :func:`simulate_gain`.
    """
    rng = np.random.default_rng(cfg.seed)
    active = np.ones(cfg.N, dtype=bool)
    events = []
    for k in range(ticks):
        want = rng.random(cfg.N) < cfg.p_active
        when = k * cfg.T + rng.random(cfg.N) * cfg.T
        for u in np.argsort(when, kind="stable"):
            if want[u] != active[u]:
                events.append(Event(float(when[u]), int(u) + 1, "activate" if want[u] else "deactivate"))
                active[u] = want[u]
    events.sort(key=lambda e: e.time)
    return events
