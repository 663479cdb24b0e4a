"""Computation-rate primitives for integer-combination relaying.

A relay that hears ``sum_l h_l x_l + z`` and decodes the integer combination
``sum_l a_l x_l`` of lattice codewords achieves

    rate(h, a) = 1/2 * log2+( 1 / (||a||^2 - P (h.a)^2 / (1 + P ||h||^2)) )

where ``log2+(x) = max(log2(x), 0)`` and P is the per-user transmit power.
All rates in this package are in bits per channel use (base-2 logarithms
throughout).  The bracketed term is strictly positive for every nonzero
integer vector a unless a is an exact real multiple of h (Cauchy-Schwarz
equality); that measure-zero event is reported as ``math.inf`` rather than a
large float so callers must handle it deliberately.

Channel vectors are finite real sequences; coefficient vectors are integer
sequences of the same length, never all zero.  ``||a||^2`` is accumulated in
exact integer arithmetic before any float conversion, and all float dot
products use ``math.fsum`` so results do not depend on element order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum
from typing import Sequence

__all__ = [
    "DEGENERATE_TOL",
    "RateResult",
    "angle_between",
    "as_channel",
    "as_coeffs",
    "as_power",
    "computation_rate",
    "computation_rate_alpha",
    "high_snr_rate",
    "log_plus",
    "mmse_alpha",
]

#: Rate denominators at or below this threshold are treated as exactly
#: degenerate (a collinear with h) and reported as an infinite rate.
DEGENERATE_TOL = 1e-12


# ============================================================
# validation helpers
# ============================================================

def as_channel(h: Sequence[float]) -> list[float]:
    """Validate a channel vector: non-empty with finite real entries."""
    vals = [float(x) for x in h]
    if not vals:
        raise ValueError("channel vector must have at least one entry")
    if not all(math.isfinite(x) for x in vals):
        raise ValueError("channel vector entries must be finite")
    return vals


def as_coeffs(a: Sequence[int]) -> list[int]:
    """Validate a coefficient vector: integer entries, not all zero."""
    vals: list[int] = []
    for x in a:
        xf = float(x)
        if not xf.is_integer():
            raise ValueError(f"coefficient entries must be integers, got {x!r}")
        vals.append(int(xf))
    if not vals:
        raise ValueError("coefficient vector must have at least one entry")
    if not any(vals):
        raise ValueError("coefficient vector must not be all zero")
    return vals


def as_power(P: float) -> float:
    """Validate a transmit power: finite and strictly positive."""
    p = float(P)
    if not (math.isfinite(p) and p > 0.0):
        raise ValueError(f"power must be finite and positive, got {P!r}")
    return p


def _dot(u: Sequence[float], v: Sequence[float]) -> float:
    return fsum(x * y for x, y in zip(u, v))


def _sq_norm(u: Sequence[float]) -> float:
    return fsum(x * x for x in u)


def _int_sq_norm(a: Sequence[int]) -> int:
    return sum(int(x) * int(x) for x in a)


# ============================================================
# core operations
# ============================================================

def log_plus(x: float) -> float:
    """max(log2(x), 0).  Raises ValueError for a non-positive argument."""
    if not x > 0.0:
        raise ValueError(f"log_plus needs a positive argument, got {x!r}")
    return max(math.log2(x), 0.0)


@dataclass(frozen=True)
class RateResult:
    """Achievable-rate evaluation of one (channel, coefficients) pair.

    ``sum_rate`` is always ``nnz * rate``: the decoded combination serves
    every user with a nonzero coefficient at the common rate.
    """

    rate: float
    alpha: float
    angle: float
    nnz: int
    sum_rate: float

    @property
    def is_infinite(self) -> bool:
        """True when the pair was degenerate (a exactly collinear with h)."""
        return math.isinf(self.rate)


def angle_between(h: Sequence[float], a: Sequence[float]) -> float:
    """Angle in [0, pi] between two nonzero vectors.

    The cosine is clamped to [-1, 1] before ``acos`` so that rounding noise
    on nearly (anti)parallel inputs cannot push it out of domain.
    """
    hv = [float(x) for x in h]
    av = [float(x) for x in a]
    if len(hv) != len(av):
        raise ValueError("vectors must have the same length")
    nh = math.sqrt(_sq_norm(hv))
    na = math.sqrt(_sq_norm(av))
    if nh == 0.0 or na == 0.0:
        raise ValueError("angle undefined for a zero vector")
    c = _dot(hv, av) / (nh * na)
    c = min(1.0, max(-1.0, c))
    return math.acos(c)


def mmse_alpha(h: Sequence[float], a: Sequence[int], P: float) -> float:
    """Scaling factor minimising the effective noise: P(h.a)/(1 + P||h||^2)."""
    hv = as_channel(h)
    av = as_coeffs(a)
    if len(hv) != len(av):
        raise ValueError("h and a must have the same length")
    p = as_power(P)
    return p * _dot(hv, av) / (1.0 + p * _sq_norm(hv))


def computation_rate(h: Sequence[float], a: Sequence[int], P: float) -> RateResult:
    """Achievable rate for decoding combination a over channel h at power P.

    Evaluates 1/2 * log2+((||a||^2 - P(h.a)^2/(1+P||h||^2))^-1) together
    with the optimal scaling factor, the h-to-a angle and the sum rate.
    When the denominator falls at or below DEGENERATE_TOL (a collinear with
    h) the rate is ``math.inf``.
    """
    hv = as_channel(h)
    av = as_coeffs(a)
    if len(hv) != len(av):
        raise ValueError("h and a must have the same length")
    p = as_power(P)
    na2 = float(_int_sq_norm(av))
    hta = _dot(hv, av)
    hh = _sq_norm(hv)
    inner = na2 - p * hta * hta / (1.0 + p * hh)
    alpha = p * hta / (1.0 + p * hh)
    nnz = sum(1 for x in av if x)
    angle = angle_between(hv, av) if hh > 0.0 else math.nan
    if inner <= DEGENERATE_TOL:
        rate = math.inf
    else:
        rate = 0.5 * log_plus(1.0 / inner)
    return RateResult(rate=rate, alpha=alpha, angle=angle, nnz=nnz, sum_rate=nnz * rate)


def computation_rate_alpha(h: Sequence[float], a: Sequence[int], P: float,
                           alpha: float) -> float:
    """Rate of the explicit-scaling form 1/2 * log2+(P / (alpha^2 + P ||alpha h - a||^2)).

    Maximised over alpha this equals ``computation_rate``; the maximiser is
    ``mmse_alpha``.  Useful for checking that property and for studying
    suboptimal scalings.
    """
    hv = as_channel(h)
    av = as_coeffs(a)
    if len(hv) != len(av):
        raise ValueError("h and a must have the same length")
    p = as_power(P)
    af = float(alpha)
    if not math.isfinite(af):
        raise ValueError("alpha must be finite")
    den = af * af + p * fsum((af * x - y) ** 2 for x, y in zip(hv, av))
    if den <= 0.0:
        # Only reachable when alpha = 0 and the residual underflows; treat as
        # the same degenerate signal as computation_rate.
        return math.inf
    return 0.5 * log_plus(p / den)


def high_snr_rate(h: Sequence[float], a: Sequence[int]) -> float:
    """Power-independent rate ceiling 1/2 * log2+(1 / (||a||^2 sin^2 theta)).

    This is the limit of ``computation_rate`` as P grows without bound; only
    the angle between h and a and the coefficient norm survive.  Exact
    collinearity (theta = 0) is reported as ``math.inf``.
    """
    hv = as_channel(h)
    av = as_coeffs(a)
    if len(hv) != len(av):
        raise ValueError("h and a must have the same length")
    hh = _sq_norm(hv)
    if hh == 0.0:
        raise ValueError("high-SNR rate undefined for an all-zero channel")
    # ||a||^2 sin^2(theta) is the squared rejection of a from h.  Computing
    # it as the residual norm (rather than 1 - cos^2) keeps exactly
    # proportional pairs at exactly zero and avoids cancellation near
    # theta = 0.
    coef = _dot(hv, av) / hh
    val = math.fsum((y - coef * x) ** 2 for x, y in zip(hv, av))
    if val <= 0.0:
        return math.inf
    return 0.5 * log_plus(1.0 / val)
