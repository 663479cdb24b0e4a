"""User-subset selection for a single relay.

Out of L available users only k may transmit in a phase.  The headline
strategy sorts users by channel magnitude and evaluates the all-ones
combination (with per-user signs) on each of the L-k+1 consecutive windows
of the sorted order: clustered magnitudes keep the channel close to a
scaled all-ones vector, which is the best-aligned full-support integer
vector.  Exhaustive references over all C(L, k) subsets back it up in tests
and small experiments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coeffs import best_sumrate_coeff, optimal_coeff
from .rates import as_channel, as_power, computation_rate, high_snr_rate

__all__ = [
    "ScheduleResult",
    "exhaustive_allones_schedule",
    "exhaustive_schedule",
    "min_angle_schedule",
    "random_schedule",
    "sorted_window_schedule",
]

#: Refuse exhaustive scans beyond this many subsets.
SUBSET_GUARD = 10**7


@dataclass(frozen=True)
class ScheduleResult:
    """Chosen transmitters plus the combination the relay decodes for them."""

    user_indices: tuple[int, ...]
    sub_channel: tuple[float, ...]
    coeffs: tuple[int, ...]
    rate: float
    sum_rate: float


def _window_rate(mags: Sequence[float], P: float) -> float:
    """Rate of the all-ones combination on a window of channel magnitudes."""
    return computation_rate(mags, [1] * len(mags), P).rate


def _check_k(L: int, k: int) -> None:
    if not 1 <= k <= L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")


def sorted_window_schedule(
    h_L: Sequence[float],
    k: int,
    P: float,
    on_window: Callable[[int, float], None] | None = None,
) -> ScheduleResult:
    """Pick the best window of k consecutive magnitude-sorted users.

    Users are ranked by |h|; each of the L-k+1 consecutive windows is scored
    by the all-ones rate on its magnitudes, and the best window (ties to the
    lowest start) wins.  Decoding coefficients are +/-1 matching each chosen
    user's channel sign, so ``h . a`` is a sum of magnitudes.  Runs in
    O(L log L + (L-k) k) against the exhaustive scan's C(L, k).

    ``on_window`` (start_index, rate) is invoked per window, for tracing.
    """
    h = as_channel(h_L)
    p = as_power(P)
    L = len(h)
    _check_k(L, k)
    order = sorted(range(L), key=lambda i: abs(h[i]))
    mags = [abs(h[i]) for i in order]
    best_start = 0
    best_rate = -math.inf
    for s in range(L - k + 1):
        r = _window_rate(mags[s:s + k], p)
        if on_window is not None:
            on_window(s, r)
        if r > best_rate:
            best_rate = r
            best_start = s
    idx = tuple(order[best_start:best_start + k])
    sub = tuple(h[i] for i in idx)
    coeffs = tuple(1 if v >= 0.0 else -1 for v in sub)
    return ScheduleResult(
        user_indices=idx,
        sub_channel=sub,
        coeffs=coeffs,
        rate=best_rate,
        sum_rate=k * best_rate,
    )


def exhaustive_allones_schedule(h_L: Sequence[float], k: int, P: float) -> ScheduleResult:
    """Best k-subset under the sign-matched all-ones combination, by full scan.

    Evaluates every C(L, k) subset with the same magnitude-sorted all-ones
    rate as :func:`sorted_window_schedule`, so the two agree bit for bit
    whenever the window heuristic is exactly optimal for this objective.
    """
    h = as_channel(h_L)
    p = as_power(P)
    L = len(h)
    _check_k(L, k)
    if math.comb(L, k) > SUBSET_GUARD:
        raise ValueError(f"C({L},{k}) subsets exceed the exhaustive-scan guard")
    best: tuple[float, tuple[int, ...]] | None = None
    for combo in itertools.combinations(range(L), k):
        mags = sorted(abs(h[i]) for i in combo)
        r = _window_rate(mags, p)
        if best is None or r > best[0]:
            best = (r, combo)
    assert best is not None
    rate, combo = best
    idx = tuple(sorted(combo, key=lambda i: abs(h[i])))
    sub = tuple(h[i] for i in idx)
    coeffs = tuple(1 if v >= 0.0 else -1 for v in sub)
    return ScheduleResult(
        user_indices=idx,
        sub_channel=sub,
        coeffs=coeffs,
        rate=rate,
        sum_rate=k * rate,
    )


def exhaustive_schedule(h_L: Sequence[float], k: int, P: float) -> ScheduleResult:
    """Best k-subset with a per-subset optimal coefficient search.

    The reference the window strategy is measured against: for every subset
    the sum-rate-optimal integer combination is found exactly, and the
    subset with the largest sum rate wins.  No combination can beat
    (k/2) log2(1 + P ||h_sub||^2) on its subset, so subsets are visited in
    decreasing norm order and skipped once that cap stops exceeding the
    incumbent (with the window schedule's subset searched first as a strong
    incumbent); exact ties therefore resolve toward the window subset, then
    toward larger subset norm, then scan order.
    """
    h = as_channel(h_L)
    p = as_power(P)
    L = len(h)
    _check_k(L, k)
    if math.comb(L, k) > SUBSET_GUARD:
        raise ValueError(f"C({L},{k}) subsets exceed the exhaustive-scan guard")

    def searched(combo: tuple[int, ...]) -> tuple[float, tuple[int, ...], tuple[int, ...], float]:
        sub = [h[i] for i in combo]
        a, res = best_sumrate_coeff(sub, p)
        return res.sum_rate, combo, tuple(a), res.rate

    win = sorted_window_schedule(h, k, p)
    best = searched(tuple(sorted(win.user_indices)))
    combos = list(itertools.combinations(range(L), k))
    norms = [math.fsum(h[i] * h[i] for i in combo) for combo in combos]
    for j in sorted(range(len(combos)), key=lambda i: -norms[i]):
        cap = 0.5 * k * math.log2(1.0 + p * norms[j])
        if cap <= best[0]:
            break
        if combos[j] == best[1]:
            continue
        cand = searched(combos[j])
        if cand[0] > best[0]:
            best = cand
    sum_rate, combo, coeffs, rate = best
    return ScheduleResult(
        user_indices=combo,
        sub_channel=tuple(h[i] for i in combo),
        coeffs=coeffs,
        rate=rate,
        sum_rate=sum_rate,
    )


def min_angle_schedule(
    h_L: Sequence[float],
    k: int,
    a: Sequence[int],
    P: float | None = None,
) -> ScheduleResult:
    """Best k-subset for a FIXED coefficient magnitude profile.

    For a given |a| the subset maximising the rate is the one maximising
    cos^2 of the angle between the magnitude-sorted sub-channel and the
    sorted profile (descending-descending pairing is optimal for the dot
    product, by the rearrangement inequality).  Signs of the coefficients
    are then matched to the chosen users' channel signs.  With ``P=None``
    the power-free high-SNR rate is reported instead.
    """
    h = as_channel(h_L)
    L = len(h)
    _check_k(L, k)
    a_int = [int(x) for x in a]
    if len(a_int) != k:
        raise ValueError("coefficient profile length must equal k")
    if not any(a_int):
        raise ValueError("coefficient profile must not be all zero")
    if math.comb(L, k) > SUBSET_GUARD:
        raise ValueError(f"C({L},{k}) subsets exceed the exhaustive-scan guard")
    a_desc = sorted((abs(x) for x in a_int), reverse=True)
    na2 = float(sum(x * x for x in a_desc))
    best: tuple[float, tuple[int, ...]] | None = None
    for combo in itertools.combinations(range(L), k):
        mags = sorted((abs(h[i]) for i in combo), reverse=True)
        hh = math.fsum(m * m for m in mags)
        if hh == 0.0:
            continue
        d = math.fsum(m * x for m, x in zip(mags, a_desc))
        cos_sq = d * d / (hh * na2)
        if best is None or cos_sq > best[0]:
            best = (cos_sq, combo)
    if best is None:
        raise ValueError("all candidate sub-channels are zero")
    _, combo = best
    idx = tuple(sorted(combo, key=lambda i: -abs(h[i])))
    sub = [h[i] for i in idx]
    coeffs = []
    for mag, v in zip(a_desc, sub):
        if mag == 0 or v == 0.0:
            coeffs.append(mag)
        else:
            coeffs.append(mag if v > 0.0 else -mag)
    if P is None:
        rate = high_snr_rate(sub, coeffs)
    else:
        rate = computation_rate(sub, coeffs, as_power(P)).rate
    nnz = sum(1 for x in coeffs if x)
    return ScheduleResult(
        user_indices=idx,
        sub_channel=tuple(sub),
        coeffs=tuple(coeffs),
        rate=rate,
        sum_rate=nnz * rate,
    )


def random_schedule(
    h_L: Sequence[float],
    k: int,
    P: float,
    rng: np.random.Generator | int | None = None,
) -> ScheduleResult:
    """Uniformly random k-subset with an optimal combination on it.

    Baseline policy: scheduling gain shows up as the gap between this and
    the sorted-window strategy.
    """
    h = as_channel(h_L)
    p = as_power(P)
    L = len(h)
    _check_k(L, k)
    gen = np.random.default_rng(rng)
    idx = tuple(sorted(int(i) for i in gen.choice(L, size=k, replace=False)))
    sub = [h[i] for i in idx]
    a, res = optimal_coeff(sub, p)
    return ScheduleResult(
        user_indices=idx,
        sub_channel=tuple(sub),
        coeffs=tuple(a),
        rate=res.rate,
        sum_rate=res.sum_rate,
    )
