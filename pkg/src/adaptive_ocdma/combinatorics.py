"""Exact combinatorial primitives and the code-design constraints C1-C3.

Everything here works on Python integers, so products such as the Johnson
bound numerator never overflow or round.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CodeParams:
    """Geometry of one code class: ``M`` wavelengths, length ``L`` chips,
    weight ``W`` pulses and maximum cross-correlation ``lam``.

    Only positivity is enforced on construction. The ordering
    ``lam <= W <= M*L`` is constraint C1 and is reported by
    :func:`check_constraints` rather than rejected here, so that search
    code can build candidate points that violate it.
    """

    M: int
    L: int
    W: int
    lam: int

    def __post_init__(self):
        for name in ("M", "L", "W", "lam"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @property
    def length(self) -> int:
        """Total number of wavelength-time chips, ``M*L``."""
        return self.M * self.L


def binomial(n: int, k: int) -> int:
    """C(n, k), with 0 for any out-of-range argument (k < 0, n < 0 or k > n)."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling(x: int, count: int) -> int:
    """``x (x-1) ... (x-count+1)``; the empty product is 1."""
    out = 1
    for t in range(count):
        out *= x - t
    return out


def _johnson_sides(N: int, p: CodeParams) -> tuple[int, int]:
    # N * W(W-1)...(W-lam)  vs  M * (ML-1)...(ML-lam)
    lhs = N * falling(p.W, p.lam + 1)
    rhs = p.M * falling(p.length - 1, p.lam)
    return lhs, rhs


def johnson_bound(p: CodeParams) -> int:
    """Upper bound on the number of codewords with parameters ``p``.

    ``floor(M (ML-1)...(ML-lam) / (W (W-1)...(W-lam)))``, evaluated exactly.
    """
    if p.W <= p.lam:
        raise ValueError(f"Johnson bound needs W > lambda, got W={p.W}, lambda={p.lam}")
    _, rhs = _johnson_sides(1, p)
    return rhs // falling(p.W, p.lam + 1)


@dataclass(frozen=True)
class ConstraintVerdict:
    C1: bool
    C2: bool
    C3: bool

    @property
    def all(self) -> bool:
        return self.C1 and self.C2 and self.C3


def check_constraints(N: int, p: CodeParams) -> ConstraintVerdict:
    """Evaluate the code-design (C1), cardinality (C2) and weight (C3) constraints.

    C2 is the Johnson bound in product form, ``N <= johnson_bound(p)``
    without the division, and C3 ``W <= sqrt(2 M lam L)`` is compared
    squared so that both stay in integers.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    c1 = p.lam <= p.W <= p.length
    lhs, rhs = _johnson_sides(N, p)
    c2 = lhs <= rhs
    c3 = p.W * p.W <= 2 * p.M * p.lam * p.L
    return ConstraintVerdict(c1, c2, c3)


def min_length_for_cardinality(N: int, M: int, W: int, lam: int) -> int:
    """Smallest ``L`` for which C2 holds with the other parameters fixed.

    Starts from the closed-form root ``(N W...(W-lam) / M)^(1/lam) / M``
    and corrects it by integer steps, since the rounded root can sit a
    few chips off the exact boundary.
    """
    target = N * falling(W, lam + 1)
    if target == 0:
        return 1

    def ok(L: int) -> bool:
        return M * falling(M * L - 1, lam) >= target

    L = max(1, math.ceil((target / M) ** (1.0 / lam) / M))
    while not ok(L):
        L += 1
    while L > 1 and ok(L - 1):
        L -= 1
    return L


def min_length_for_weight(M: int, W: int, lam: int) -> int:
    """Smallest ``L`` satisfying C3, ``ceil(W^2 / (2 M lam))``."""
    return max(1, -(-W * W // (2 * M * lam)))
