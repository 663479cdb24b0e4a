"""Integer coefficient search for computation rates.

The receiver is free to pick which integer combination it decodes.  Only
vectors inside the ball ``||a||^2 <= 1 + P ||h||^2`` can yield a positive
rate, and the rate depends on a only through the quadratic form

    f(a) = a' (I - c h h') a,   c = P / (1 + P ||h||^2),

with rate = 1/2 log2+(1/f(a)).  Minimising f over nonzero integer vectors is
a closest-vector style problem; this module solves it exactly by a pruned
sphere enumeration (Cholesky / Fincke-Pohst) with a warm-start radius from
cheap candidate vectors, falling back to nothing — the pruning is lossless.

Antipodal pairs a and -a give equal rates, so enumeration visits one
canonical representative per pair (first nonzero entry positive) and results
are re-oriented afterwards so that ``h . a >= 0``.
"""

from __future__ import annotations

import itertools
import math
from math import isqrt
from typing import Iterable, Iterator, Sequence

import numpy as np

from .rates import (
    DEGENERATE_TOL,
    RateResult,
    as_channel,
    as_coeffs,
    as_power,
    computation_rate,
    log_plus,
)

__all__ = [
    "GuardError",
    "align_signs",
    "best_sumrate_coeff",
    "best_unit_vector",
    "enumerate_candidates",
    "nonunit_win_bound",
    "optimal_coeff",
    "tradeoff_objective",
]

#: Hard ceiling on candidates any one search may visit before giving up.
SEARCH_GUARD = 2_000_000


class GuardError(RuntimeError):
    """Raised when a search would exceed its candidate budget."""


def _is_canonical(a: Sequence[int]) -> bool:
    for x in a:
        if x > 0:
            return True
        if x < 0:
            return False
    return False  # all zero


def _orient(a: Sequence[int], h: Sequence[float]) -> list[int]:
    """Flip a globally, if needed, so that h . a >= 0."""
    d = math.fsum(float(x) * y for x, y in zip(a, h))
    if d < 0.0:
        return [-x for x in a]
    return list(a)


def enumerate_candidates(dim: int, norm_bound: float) -> Iterator[tuple[int, ...]]:
    """Yield one representative per antipodal pair with ``||a||^2 <= norm_bound``.

    Representatives have their first nonzero entry positive and are produced
    in lexicographic order.  Intended for small, explicitly bounded scans
    (tests, scatter experiments); :func:`optimal_coeff` uses the pruned
    enumeration instead.
    """
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    if norm_bound < 1.0:
        raise ValueError("norm bound below 1 excludes every nonzero integer vector")
    m = isqrt(int(math.floor(norm_bound)))
    if (2 * m + 1) ** dim > SEARCH_GUARD:
        raise GuardError(
            f"box scan of (2*{m}+1)^{dim} candidates exceeds guard {SEARCH_GUARD}"
        )
    bound = int(math.floor(norm_bound))
    for a in itertools.product(range(-m, m + 1), repeat=dim):
        if not _is_canonical(a):
            continue
        if sum(x * x for x in a) > bound:
            continue
        yield a


def _ellipsoid_candidates(hv: Sequence[float], p: float, radius_sq: float,
                          cap: int = SEARCH_GUARD) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield canonical nonzero integer a with f(a) <= radius_sq, plus f(a).

    f(a) = a'Ga with G = I - c hh', c = P/(1+P||h||^2).  G is positive
    definite (its smallest eigenvalue is 1/(1+P||h||^2) on span(h), 1 off
    it), so {f <= r} is an ellipsoid and a Cholesky factorisation turns the
    membership test into a per-coordinate interval, enumerated depth-first.

    Coordinates are processed with the ORIGINAL first coordinate assigned
    last-to-first flipped: building G from the reversed channel means the
    recursion fixes a_0 in its outermost level, so the canonical constraint
    (first nonzero entry positive) is a simple lower bound of 0 while all
    earlier entries are zero.  Antipodes are therefore never generated.
    """
    k = len(hv)
    rev = np.asarray(hv[::-1], dtype=float)
    c = p / (1.0 + p * float(rev @ rev))
    G = np.eye(k) - c * np.outer(rev, rev)
    # Upper-triangular U with U'U = G, so f(x) = ||U x||^2.
    upper = np.linalg.cholesky(G).T
    u = upper.tolist()
    bound = radius_sq * (1.0 + 1e-9) + 1e-15
    xs = [0] * k
    count = 0

    def recurse(level: int, remaining: float, center_terms: list[float],
                leading_zero: bool) -> Iterator[tuple[tuple[int, ...], float]]:
        # level k-1 .. 0 assigns xs[level]; original coordinate order is
        # reversed, so level k-1 is the original a_0.
        nonlocal count
        uii = u[level][level]
        # Solving (uii*x + center)^2 <= remaining for integer x.
        center = center_terms[level]
        half = math.sqrt(max(0.0, remaining)) / uii
        mid = -center / uii
        lo = math.ceil(mid - half - 1e-12)
        hi = math.floor(mid + half + 1e-12)
        if leading_zero:
            lo = max(lo, 0)
        for x in range(lo, hi + 1):
            term = uii * x + center
            used = term * term
            if used > remaining + 1e-12:
                continue
            xs[level] = x
            if level == 0:
                count += 1
                if count > cap:
                    raise GuardError(
                        f"pruned search visited more than {cap} candidates"
                    )
                if any(xs):
                    # xs is in reversed coordinate order; restore before emit.
                    yield tuple(xs[::-1]), remaining_to_f(remaining - used)
            else:
                nxt = [
                    center_terms[j] + u[j][level] * x for j in range(level)
                ]
                yield from recurse(level - 1, remaining - used, nxt,
                                   leading_zero and x == 0)
        xs[level] = 0

    def remaining_to_f(slack: float) -> float:
        # f(a) = bound_used - slack where slack is what's left of the budget.
        return max(0.0, bound - slack)

    yield from recurse(k - 1, bound, [0.0] * k, True)


def _rate_from_f(f_val: float) -> float:
    if f_val <= DEGENERATE_TOL:
        return math.inf
    return 0.5 * log_plus(1.0 / f_val)


def _better(cand: tuple[float, int, tuple[int, ...]],
            best: tuple[float, int, tuple[int, ...]] | None) -> bool:
    """Deterministic comparator: higher score, then smaller ||a||^2, then lex."""
    if best is None:
        return True
    score, norm_sq, vec = cand
    b_score, b_norm, b_vec = best
    if score > b_score + 1e-12:
        return True
    if score < b_score - 1e-12:
        return False
    if norm_sq != b_norm:
        return norm_sq < b_norm
    return vec < b_vec


def best_unit_vector(h: Sequence[float], P: float) -> tuple[list[int], RateResult]:
    """Best single-coordinate combination: e_i at the strongest channel entry.

    The unit-vector rate is monotone in |h_i|, so the argmax entry wins
    (ties to the lowest index); the sign matches the channel's.
    """
    hv = as_channel(h)
    if all(x == 0.0 for x in hv):
        raise ValueError("no useful unit vector for an all-zero channel")
    i = max(range(len(hv)), key=lambda j: abs(hv[j]))
    e = [0] * len(hv)
    e[i] = 1 if hv[i] >= 0.0 else -1
    return e, computation_rate(hv, e, as_power(P))


def optimal_coeff(h: Sequence[float], P: float) -> tuple[list[int], RateResult]:
    """Exact rate-maximising integer coefficient vector for channel h.

    Searches the full positive-rate ball via pruned sphere enumeration with
    the best signed unit vector as warm start, then breaks ties toward the
    smaller coefficient norm and lexicographically smaller canonical vector.
    The returned vector is oriented so that ``h . a >= 0``.
    """
    hv = as_channel(h)
    p = as_power(P)
    hh = math.fsum(x * x for x in hv)
    e, _ = best_unit_vector(hv, p)
    c = p / (1.0 + p * hh)
    imax = max(range(len(hv)), key=lambda j: abs(hv[j]))
    radius = 1.0 - c * hv[imax] * hv[imax]
    e_canon = tuple(e) if _is_canonical(e) else tuple(-x for x in e)
    best: tuple[float, int, tuple[int, ...]] | None = (
        _rate_from_f(radius), 1, e_canon,
    )
    for vec, f_val in _ellipsoid_candidates(hv, p, radius):
        cand = (_rate_from_f(f_val), sum(x * x for x in vec), vec)
        if _better(cand, best):
            best = cand
    assert best is not None
    a = _orient(best[2], hv)
    return a, computation_rate(hv, a, p)


def best_sumrate_coeff(h: Sequence[float], P: float) -> tuple[list[int], RateResult]:
    """Integer vector maximising nnz(a) * rate(h, a) over the positive-rate ball.

    A candidate with m nonzero entries beats a known sum rate S only if its
    rate exceeds S/m >= S/k, i.e. only if f(a) < 2^(-2 S / k); that shrinks
    the enumeration radius sharply once any decent candidate is known.  Warm
    starts: the sign-matched all-ones vector and the best signed unit vector.
    """
    hv = as_channel(h)
    p = as_power(P)
    k = len(hv)
    ones = [1 if x >= 0.0 else -1 for x in hv]
    e, _ = best_unit_vector(hv, p)
    seeds = []
    for s in (ones, e):
        canon = tuple(s) if _is_canonical(s) else tuple(-x for x in s)
        seeds.append(canon)
    best: tuple[float, int, tuple[int, ...]] | None = None
    for canon in seeds:
        r = computation_rate(hv, list(canon), p)
        cand = (r.sum_rate, sum(x * x for x in canon), canon)
        if _better(cand, best):
            best = cand
    assert best is not None
    best_sum = best[0]
    if math.isinf(best_sum):
        radius = 4.0 * DEGENERATE_TOL
    elif best_sum <= 0.0:
        radius = 1.0
    else:
        # Rate needed for even a full-support vector to tie: best_sum/k.
        radius = min(1.0, 2.0 ** (-2.0 * (best_sum - 1e-9) / k))
    seen = set(seeds)
    for vec, f_val in _ellipsoid_candidates(hv, p, radius):
        if vec in seen:
            continue
        nnz = sum(1 for x in vec if x)
        cand = (nnz * _rate_from_f(f_val), sum(x * x for x in vec), vec)
        if _better(cand, best):
            best = cand
    a = _orient(best[2], hv)
    return a, computation_rate(hv, a, p)


def align_signs(a: Sequence[int], h: Sequence[float]) -> list[int]:
    """Give each coefficient the sign of its channel entry.

    Entries where a is zero stay zero; entries where h is zero keep the sign
    they had.  For any fixed magnitude profile this maximises h . a, hence
    the rate.
    """
    av = as_coeffs(a)
    hv = as_channel(h)
    if len(av) != len(hv):
        raise ValueError("a and h must have the same length")
    out = []
    for x, y in zip(av, hv):
        if x == 0 or y == 0.0:
            out.append(x)
        else:
            out.append(abs(x) if y > 0.0 else -abs(x))
    return out


def tradeoff_objective(h: Sequence[float], a: Sequence[int], P: float) -> float:
    """cos^2(theta(h,a)) / (1 + 1/(P ||h||^2)): alignment discounted by noise.

    Monotone proxy for the rate at fixed ||a||^2; useful for reasoning about
    which user subsets favour a given coefficient vector.
    """
    hv = as_channel(h)
    av = as_coeffs(a)
    if len(hv) != len(av):
        raise ValueError("h and a must have the same length")
    p = as_power(P)
    hh = math.fsum(x * x for x in hv)
    if hh == 0.0:
        raise ValueError("objective undefined for an all-zero channel")
    aa = float(sum(x * x for x in av))
    d = math.fsum(x * y for x, y in zip(hv, av))
    cos_sq = (d * d) / (hh * aa)
    return cos_sq / (1.0 + 1.0 / (p * hh))


def nonunit_win_bound(L: int, a: Sequence[int]) -> float:
    """Upper bound on the chance a fixed non-unit a beats every unit vector.

    For L independent standard normal channel entries the probability that
    the best window of the scheduler prefers the fixed vector a over all
    signed unit vectors decays like exp(-L (1 - 3/L) ln(||a||) ), clipped to
    1.  Only meaningful for ||a||^2 >= 2.
    """
    av = as_coeffs(a)
    if L < 1:
        raise ValueError("user count must be positive")
    na2 = sum(x * x for x in av)
    if na2 == 1:
        raise ValueError("bound applies to non-unit vectors only (||a||^2 >= 2)")
    expo = -float(L) * (1.0 - 3.0 / float(L)) * 0.5 * math.log(na2)
    return min(1.0, math.exp(expo))
