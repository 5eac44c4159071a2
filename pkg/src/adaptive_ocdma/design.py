"""Rate-optimized and power-optimized single-class code design.

Rate-optimized: minimize code length ``L`` (maximize ``Rc/L``) subject to

    C1  lam <= W <= M L
    C2  N W (W-1) ... (W-lam) <= M (ML-1) ... (ML-lam)
    C3  W^2 <= 2 M lam L
    C4  exact worst-case BER <= Pe_th
    C5  integrality

Power-optimized: with ``L`` fixed, minimize ``W`` under the same set.

Every optimizer counts the (L, W, lam) candidate points whose constraints
it evaluates; the ratio of those counts is the complexity gain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .ber import DEFAULT_PRECISION, approx_ber_single, ber_single
from .combinatorics import (
    CodeParams,
    check_constraints,
    min_length_for_cardinality,
    min_length_for_weight,
)

W_CAP = 200


@dataclass(frozen=True)
class SearchBounds:
    L_max: int = 4000
    W_max: int = 100
    lambda_max: int = 5

    def __post_init__(self):
        if min(self.L_max, self.W_max, self.lambda_max) < 1:
            raise ValueError("search bounds must be >= 1")
        if self.lambda_max > self.W_max:
            raise ValueError("lambda_max must not exceed W_max")

    @property
    def size(self) -> int:
        return self.L_max * self.W_max * self.lambda_max


@dataclass(frozen=True)
class DesignResult:
    L: int | None
    W: int | None
    lam: int | None
    feasible: bool
    eval_count: int
    method: str

    @property
    def params(self) -> tuple[int, int, int]:
        return self.L, self.W, self.lam


def _check_inputs(N, M, pe_th):
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    if not 0 < pe_th < 0.5:
        raise ValueError("Pe_th must lie in (0, 1/2)")


def is_feasible(N: int, p: CodeParams, pe_th: float, precision: int = DEFAULT_PRECISION) -> bool:
    """C1-C4 for one candidate point. C4 is only evaluated once C1-C3 pass."""
    if not check_constraints(N, p).all:
        return False
    return ber_single(N, p, precision) <= pe_th


class _BerThresholds:
    """C4 for a fixed (N, M, Pe_th) as a per-(W, lam) length threshold.

    The worst-case BER bound is nonincreasing in L at fixed (W, lam), so
    C4 holds exactly for L >= t(W, lam). Thresholds are found by bisection
    on first use; later queries cost one comparison.
    """

    def __init__(self, N, M, pe_th, L_max, precision):
        self.N, self.M, self.pe_th = N, M, pe_th
        self.L_max, self.precision = L_max, precision
        self._cache: dict[tuple[int, int], float] = {}
        self.ber_calls = 0

    def _ok(self, L, W, lam):
        self.ber_calls += 1
        return ber_single(self.N, CodeParams(self.M, L, W, lam), self.precision) <= self.pe_th

    def threshold(self, W, lam):
        key = (W, lam)
        if key not in self._cache:
            lo = max(min_length_for_weight(self.M, W, lam), -(-W // self.M))
            hi = max(lo, self.L_max)
            if not self._ok(hi, W, lam):
                self._cache[key] = math.inf
            else:
                while lo < hi:
                    mid = (lo + hi) // 2
                    if self._ok(mid, W, lam):
                        hi = mid
                    else:
                        lo = mid + 1
                self._cache[key] = lo
        return self._cache[key]

    def __call__(self, L, W, lam):
        return L >= self.threshold(W, lam)


def rate_optimize_brute(N: int, M: int, pe_th: float, bounds: SearchBounds = SearchBounds(),
                        precision: int = DEFAULT_PRECISION, memoize: bool = True) -> DesignResult:
    """Exhaustive search for the shortest feasible code.

    L ascends in the outer loop, then W, then lam, and the scan stops at
    the first feasible point, so ties in L go to the smaller W and then the
    smaller lam. With ``memoize`` C4 answers come from per-(W, lam) length
    thresholds; the visited points and the result are the same either way.
    """
    _check_inputs(N, M, pe_th)
    c4 = _BerThresholds(N, M, pe_th, bounds.L_max, precision) if memoize else None
    count = 0
    for L in range(1, bounds.L_max + 1):
        for W in range(1, bounds.W_max + 1):
            for lam in range(1, bounds.lambda_max + 1):
                count += 1
                p = CodeParams(M, L, W, lam)
                if not check_constraints(N, p).all:
                    continue
                ok = c4(L, W, lam) if memoize else ber_single(N, p, precision) <= pe_th
                if ok:
                    return DesignResult(L, W, lam, True, count, "brute")
    return DesignResult(None, None, None, False, count, "brute")


def power_optimize_brute(N: int, M: int, L: int, pe_th: float,
                         bounds: SearchBounds = SearchBounds(),
                         precision: int = DEFAULT_PRECISION) -> DesignResult:
    """Smallest code weight (then smallest lam) meeting C1-C4 at a fixed length ``L``."""
    _check_inputs(N, M, pe_th)
    if L < 1:
        raise ValueError("L must be >= 1")
    count = 0
    for W in range(1, bounds.W_max + 1):
        for lam in range(1, bounds.lambda_max + 1):
            count += 1
            if is_feasible(N, CodeParams(M, L, W, lam), pe_th, precision):
                return DesignResult(L, W, lam, True, count, "power")
    return DesignResult(L, None, None, False, count, "power")


class _Heuristic:
    """State of one heuristic run: problem data plus the evaluation counter."""

    def __init__(self, N, M, pe_th, precision, w_cap):
        self.N, self.M, self.pe_th = N, M, pe_th
        self.precision, self.w_cap = precision, w_cap
        self.count = 0

    def ber(self, L, W, lam):
        """Exact BER at a candidate point, or None if C1-C3 fail. Counted."""
        self.count += 1
        p = CodeParams(self.M, L, W, lam)
        if not check_constraints(self.N, p).all:
            return None
        return ber_single(self.N, p, self.precision)

    def feasible(self, L, W, lam) -> bool:
        b = self.ber(L, W, lam)
        return b is not None and b <= self.pe_th

    # boundaries in L as functions of W, each also honouring C1
    def c2_boundary(self, W, lam):
        return max(-(-W // self.M), min_length_for_cardinality(self.N, self.M, W, lam))

    def c3_boundary(self, W, lam):
        return max(-(-W // self.M), min_length_for_weight(self.M, W, lam))

    def all_boundary(self, W, lam):
        return max(self.c2_boundary(W, lam), self.c3_boundary(W, lam))

    def approx_ok(self, L, W, lam):
        return approx_ber_single(self.N, CodeParams(self.M, L, W, lam)) <= self.pe_th

    def smallest_weight_on(self, boundary, lam, weights):
        """Smallest W in ``weights`` (a contiguous range) with C4 met at L = boundary(W).

        The approximation picks the starting weight; exact checks then step
        down or up from it.
        """
        if not weights:
            return None
        start = next((W for W in weights if self.approx_ok(boundary(W, lam), W, lam)), weights[-1])
        W = start
        if self.feasible(boundary(W, lam), W, lam):
            while W > weights[0] and self.feasible(boundary(W - 1, lam), W - 1, lam):
                W -= 1
            return W
        while W < weights[-1]:
            W += 1
            if self.feasible(boundary(W, lam), W, lam):
                return W
        return None

    def shortest_length(self, W, lam, hi):
        """Smallest feasible L <= hi for this (W, lam), or None.

        log BER is close to linear in log L with slope -W/lam, which gives
        the next guess from each exact value; plain bisection takes over
        if that stalls.
        """
        lo = self.all_boundary(W, lam)
        if lo > hi:
            return None
        b = self.ber(hi, W, lam)
        if b is None or b > self.pe_th:
            return None
        L = hi
        for step in range(64):
            if lo >= hi:
                break
            if step < 4 and b > 0:
                guess = math.ceil(L * float(b / self.pe_th) ** (lam / W))
            else:
                guess = (lo + hi) // 2
            guess = min(max(guess, lo), hi - 1)
            b = self.ber(guess, W, lam)
            L = guess
            if b is not None and b <= self.pe_th:
                hi = guess
            else:
                lo = guess + 1
                if b is None:
                    b = self.pe_th * 2
        return hi

    def interior_search(self, w_star, lam, limit):
        """Best (L, W) with W < w_star, where C4 alone sets the length.

        Seeds are the weight just left of the intersection and the weights
        around the minimum of the approximate C4 length; the best seed is
        then walked outward while the exact length keeps improving. Only
        L <= limit counts.
        """
        w_min = lam * math.log(1 / (2 * self.pe_th))
        W0 = max(lam, min(w_star - 1, round(w_min)))
        found = {}
        for W in sorted({w_star - 1, W0 - 1, W0, W0 + 1}, reverse=True):
            if lam <= W < w_star:
                L = self.shortest_length(W, lam, limit)
                if L is not None:
                    found[W] = L
                    limit = min(limit, L)
        if not found:
            return None
        W_best = min(found, key=lambda w: (found[w], w))
        for step in (-1, 1):
            W = W_best + step
            while lam <= W < w_star and W not in found:
                L = self.shortest_length(W, lam, found[W_best])
                if L is None:
                    break
                found[W] = L
                if (L, W) < (found[W_best], W_best):
                    W_best = W
                W += step
        return found[W_best], W_best

    def stage(self, lam, limit):
        """Best (L, W) for one cross-correlation value with L <= limit, or None.

        Candidate t1 lies on the C2 boundary, candidate t2 on the C3
        boundary; each is searched only over weights where the other
        constraint does not reject it. Points left of the first
        intersection are C4-limited and come from :meth:`interior_search`.
        """
        weights = [W for W in range(lam, self.w_cap + 1) if self.all_boundary(W, lam) <= limit]
        on_c2 = [W for W in weights if self.c2_boundary(W, lam) >= self.c3_boundary(W, lam)]
        on_c3 = [W for W in weights if self.c2_boundary(W, lam) < self.c3_boundary(W, lam)]
        t1 = self.smallest_weight_on(self.c2_boundary, lam, on_c2)
        t2 = None if t1 is not None else self.smallest_weight_on(self.c3_boundary, lam, on_c3)
        w_star = t1 if t1 is not None else t2
        best = None
        if w_star is not None:
            best = (self.all_boundary(w_star, lam), w_star)
            limit = min(limit, best[0])
        else:
            w_star = (weights[-1] + 1) if weights else lam
        inner = self.interior_search(w_star, lam, limit) if limit < math.inf else None
        if inner is not None and (best is None or inner <= best):
            best = inner
        return best

    def run(self):
        # the lower corner of the box cannot be beaten; it is feasible only without interferers
        if self.feasible(1, 1, 1):
            return DesignResult(1, 1, 1, True, self.count, "heuristic")
        lam = 1
        best = self.stage(lam, math.inf)
        if best is None:
            return DesignResult(None, None, None, False, max(self.count, 1), "heuristic")
        L, W = best
        lam_t = lam + 1
        # a tie keeps the incumbent (smaller W) but does not end the search
        while lam_t <= self.w_cap:
            new = self.stage(lam_t, L)
            if new is None:
                break
            if new < (L, W):
                lam, (L, W) = lam_t, new
            lam_t += 1
        return DesignResult(L, W, lam, True, self.count, "heuristic")


def rate_optimize_heuristic(N: int, M: int, pe_th: float, precision: int = DEFAULT_PRECISION,
                            w_cap: int = W_CAP) -> DesignResult:
    """Boundary-intersection search for the shortest feasible code.

    For lam = 1, 2, ... the optimum sits where the descending C4 boundary
    meets the ascending C2 or C3 boundary, so only a few points around
    those intersections are evaluated. lam is raised while doing so
    shortens the code.
    """
    _check_inputs(N, M, pe_th)
    return _Heuristic(N, M, pe_th, precision, w_cap).run()


def complexity_gain(N: int, M: int, pe_th: float, bounds: SearchBounds = SearchBounds(),
                    precision: int = DEFAULT_PRECISION) -> float:
    brute = rate_optimize_brute(N, M, pe_th, bounds, precision)
    heur = rate_optimize_heuristic(N, M, pe_th, precision)
    if not (brute.feasible and heur.feasible):
        raise ValueError(f"design infeasible for N={N}, M={M}, Pe_th={pe_th}")
    return brute.eval_count / heur.eval_count
