"""Bit-error rates of multi-class 1D/2D OCDMA systems limited by multi-access interference.

Two evaluators live here:

* :func:`exact_ber`, the inclusion-exclusion bound over the receiver's
  mark positions.  Its alternating sum cancels catastrophically (terms
  near ``C(W, W/2)`` against results near 1e-9), so it runs in MPFR at a
  caller-chosen number of decimal digits.
* :func:`approx_ber` / :func:`approx_ber_single`, the closed-form
  approximation in ordinary floats.

Class indices are 0-based throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .combinatorics import CodeParams, binomial

DEFAULT_PRECISION = 80
MIN_PRECISION = 30


def _as_matrix(rows, K: int, name: str) -> tuple[tuple, ...]:
    rows = tuple(tuple(r) for r in rows)
    if len(rows) != K or any(len(r) != K for r in rows):
        raise ValueError(f"{name} must be {K}x{K}")
    return rows


@dataclass(frozen=True)
class SystemSpec:
    """A K-class OCDMA system.

    ``Gamma[k][q]`` is the cross-correlation between class-k and class-q
    codewords, ``C[k][q]`` the integer power ratio of class k to class q
    and ``B[k]`` the diversity order. ``Rc`` only scales the reported class
    rates.
    """

    M: int
    N: tuple[int, ...]
    L: tuple[int, ...]
    W: tuple[int, ...]
    Gamma: tuple[tuple[int, ...], ...]
    C: tuple[tuple[int, ...], ...] = None
    B: tuple[int, ...] = None
    Rc: float = 1.0

    def __post_init__(self):
        K = len(self.N)
        object.__setattr__(self, "N", tuple(self.N))
        object.__setattr__(self, "L", tuple(self.L))
        object.__setattr__(self, "W", tuple(self.W))
        if K < 1 or len(self.L) != K or len(self.W) != K:
            raise ValueError("N, L and W must all have the same nonzero length")
        object.__setattr__(self, "Gamma", _as_matrix(self.Gamma, K, "Gamma"))
        C = [[1] * K for _ in range(K)] if self.C is None else self.C
        object.__setattr__(self, "C", _as_matrix(C, K, "C"))
        B = (1,) * K if self.B is None else tuple(self.B)
        if len(B) != K:
            raise ValueError("B must have one entry per class")
        object.__setattr__(self, "B", B)

        if self.M < 1:
            raise ValueError("M must be >= 1")
        for k in range(K):
            if self.N[k] < 0:
                raise ValueError("user counts must be nonnegative")
            if self.C[k][k] != 1:
                raise ValueError("power ratio of a class to itself must be 1")
            if self.B[k] < 1:
                raise ValueError("diversity orders must be >= 1")
            for q in range(K):
                if self.Gamma[k][q] < 1:
                    raise ValueError("cross-correlations must be >= 1")
                if self.C[k][q] < 1:
                    raise ValueError("power ratios are floored at 1")
            # constructing CodeParams checks positivity of the class geometry
            p = self.code(k)
            if not p.lam <= p.W <= p.length:
                raise ValueError(f"class {k} violates lambda <= W <= M*L")

    @classmethod
    def single(cls, N: int, p: CodeParams) -> "SystemSpec":
        return cls(M=p.M, N=(N,), L=(p.L,), W=(p.W,), Gamma=((p.lam,),))

    @property
    def K(self) -> int:
        return len(self.N)

    def code(self, k: int) -> CodeParams:
        return CodeParams(self.M, self.L[k], self.W[k], self.Gamma[k][k])

    def rate(self, k: int) -> float:
        return self.Rc / self.L[k]

    def interferers(self, k: int, q: int) -> int:
        return self.N[q] - (1 if q == k else 0)


@dataclass(frozen=True)
class InterferenceModel:
    """Hit-count probabilities for every ordered class pair.

    ``P[(k, q)][m-1]`` is the weight of a class-q interferer landing ``m``
    pulses on a class-k receiver. The weights are stored per hit pattern:
    the probability of *some* m-hit event is ``P * C(W_k, m)``.
    """

    P: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, probs in self.P.items():
            if any(p < 0 for p in probs):
                raise ValueError(f"negative hit probability for pair {key}")
            if sum(probs) > 1:
                raise ValueError(f"hit probabilities for pair {key} sum above 1")

    def hit_probability(self, spec: SystemSpec, k: int, q: int):
        """Total probability that one class-q user hits a class-k receiver at all."""
        return sum(p * binomial(spec.W[k], m) for m, p in enumerate(self.P[(k, q)], start=1))


def worst_case_model(spec: SystemSpec) -> InterferenceModel:
    """Every interfering user either misses or lands exactly ``lambda_kq`` hits.

    The lambda-hit event has probability ``W_k W_q / (2 M lambda_kq L_q)``,
    spread uniformly over the ``C(W_k, lambda_kq)`` mark subsets.
    """
    P = {}
    for k in range(spec.K):
        for q in range(spec.K):
            lam = spec.Gamma[k][q]
            hit = Fraction(spec.W[k] * spec.W[q], 2 * spec.M * lam * spec.L[q])
            if hit > 1:
                raise ValueError(
                    f"lambda-hit probability {float(hit):.4g} > 1 for classes ({k}, {q}); "
                    "code too short for its weight"
                )
            probs = [Fraction(0)] * lam
            probs[-1] = hit / binomial(spec.W[k], lam)
            P[(k, q)] = tuple(probs)
    return InterferenceModel(P)


def miss_counts(W: int, m: int, i: int) -> int:
    """Signed count ``sum_j (-1)^j C(i,j) C(W-j, m-j)`` over j = 1..m.

    Equals ``C(W-i, m) - C(W, m)``: minus the number of m-subsets of the W
    marks that touch a fixed set of ``i`` marks.
    """
    return sum((-1) ** j * binomial(i, j) * binomial(W - j, m - j) for j in range(1, m + 1))


def bracket_polynomial(spec: SystemSpec, model: InterferenceModel, k: int, q: int) -> list[Fraction]:
    """Coefficients (ascending powers of i) of the per-interferer factor
    ``1 + sum_m P_m (C(W_k - i, m) - C(W_k, m))``.

    Requires exact (Fraction) hit probabilities.
    """
    W = spec.W[k]
    probs = model.P[(k, q)]
    coeffs = [Fraction(0)] * (len(probs) + 1)
    coeffs[0] = Fraction(1)
    for j in range(1, len(probs) + 1):
        # C(i, j) = i (i-1) ... (i-j+1) / j!
        poly = [Fraction(1)]
        for t in range(j):
            shifted = [Fraction(0)] + poly
            for s, c in enumerate(poly):
                shifted[s] -= t * c
            poly = shifted
        scale = Fraction((-1) ** j, math.factorial(j)) * sum(
            Fraction(p) * binomial(W - j, m - j) for m, p in enumerate(probs, start=1) if m >= j
        )
        for s, c in enumerate(poly):
            coeffs[s] += scale * c
    return coeffs


def _bits(precision: int) -> int:
    return int(math.ceil(precision * math.log2(10))) + 16


def _to_mpfr(x):
    if isinstance(x, Fraction):
        return gmpy2.mpq(x.numerator, x.denominator)
    return x


def exact_ber(spec: SystemSpec, k: int, model: InterferenceModel | None = None,
              precision: int = DEFAULT_PRECISION):
    """MAI-limited BER bound of class ``k`` for unit power ratios and no diversity.

    ``model`` defaults to :func:`worst_case_model`.  The alternating sum is
    carried in MPFR with at least ``precision`` significant decimal digits
    and the result (an ``mpfr``) is clamped to ``[0, 1/2]``.
    """
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} digits")
    if any(c != 1 for row in spec.C for c in row) or any(b != 1 for b in spec.B):
        raise ValueError("exact BER covers unit power ratios and diversity order 1 only")
    if model is None:
        model = worst_case_model(spec)

    W = spec.W[k]
    pairs = []
    for q in range(spec.K):
        probs = model.P[(k, q)]
        if len(probs) != spec.Gamma[k][q]:
            raise ValueError(f"model has {len(probs)} hit levels for pair ({k}, {q}), "
                             f"expected {spec.Gamma[k][q]}")
        if spec.interferers(k, q):
            pairs.append((probs, spec.interferers(k, q)))

    with gmpy2.context(gmpy2.get_context(), precision=_bits(precision)):
        one = gmpy2.mpfr(1)
        eps = gmpy2.mpfr(10) ** (-precision // 2)
        coeffs = [[_to_mpfr(p) for p in probs] for probs, _ in pairs]
        total = gmpy2.mpfr(0)
        for i in range(W + 1):
            term = gmpy2.mpfr(binomial(W, i))
            for (probs, n_int), P in zip(pairs, coeffs):
                b = one
                for m, p in enumerate(P, start=1):
                    if p:
                        b += p * (binomial(W - i, m) - binomial(W, m))
                if b < -eps or b > one + eps:
                    raise ValueError(f"interference factor {float(b):.6g} outside [0, 1]; "
                                     "invalid interference model")
                term *= b ** n_int
            total += -term if i % 2 else term
        result = total / 2
        if result < 0:
            result = gmpy2.mpfr(0)
        elif result > 0.5:
            result = gmpy2.mpfr(0.5)
    return result


def ber_single(N: int, p: CodeParams, precision: int = DEFAULT_PRECISION):
    """Worst-case :func:`exact_ber` of a single-class system with ``N`` users."""
    return exact_ber(SystemSpec.single(N, p), 0, precision=precision)


def approx_ber(spec: SystemSpec, k: int) -> float:
    """Closed-form BER approximation of class ``k``; not clamped."""
    bases = [
        (spec.N[i] * spec.W[i] / (2 * spec.M * spec.Gamma[k][i] * spec.L[i]),
         spec.C[k][i] / spec.Gamma[k][i])
        for i in range(spec.K)
    ]
    outer = spec.W[k] * spec.B[k]
    if len(bases) == 1:
        # fold the exponents so K=1 is the same float expression as approx_ber_single
        x = bases[0][0]
        return 0.5 * x ** (spec.C[k][0] * outer / spec.Gamma[k][0])
    return 0.5 * sum(x ** e for x, e in bases) ** outer


def approx_ber_single(N: int, p: CodeParams) -> float:
    return 0.5 * (N * p.W / (2 * p.M * p.lam * p.L)) ** (p.W / p.lam)

