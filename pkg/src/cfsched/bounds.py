"""Closed-form sum-rate bounds for magnitude-window scheduling.

With L independent standard normal channel gains, the number landing in a
narrow magnitude band [u, u + delta] near ``u = sqrt(2 ln(2 sqrt(L)))``
concentrates well enough that k users from one band are available with high
probability.  Conditioning on that event yields a closed-form lower bound on
the scheduled sum rate; an upper bound follows from the expected largest
magnitude.  Both scale like (k/2) log2 log2 L, and their ratio to that
scaling is what the asymptotic-optimality experiments track.

Everything here is deterministic arithmetic: no sampling, no vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .rates import log_plus

__all__ = [
    "BoundParams",
    "EULER_MASCHERONI",
    "band_edge",
    "band_probability",
    "lower_scaling_ratio",
    "shortfall_bound",
    "sumrate_lower_bound",
    "sumrate_upper_bound",
    "upper_scaling_ratio",
]

EULER_MASCHERONI = 0.5772156649015329


def band_edge(L: int, delta: float) -> float:
    """Lower edge u = sqrt(2 ln(2 sqrt(L))) - delta of the magnitude band."""
    if L < 1:
        raise ValueError("user count must be positive")
    if delta < 0.0:
        raise ValueError("band width must be nonnegative")
    u = math.sqrt(2.0 * math.log(2.0 * math.sqrt(L))) - delta
    if u <= 0.0:
        raise ValueError(f"band edge not positive for L={L}, delta={delta}")
    return u


def band_probability(u: float, delta: float) -> float:
    """P(u <= |g| <= u + delta) for a standard normal g.

    Written as a difference of two upper tails via erfc so the deep-tail
    cancellation stays accurate; ``delta=inf`` gives the whole tail beyond u.
    """
    if u < 0.0:
        raise ValueError("band edge must be nonnegative")
    if delta < 0.0:
        raise ValueError("band width must be nonnegative")
    upper = 0.0 if math.isinf(delta) else math.erfc((u + delta) / math.sqrt(2.0))
    return math.erfc(u / math.sqrt(2.0)) - upper


def shortfall_bound(L: int, k: int, p: float, *, strict: bool = True) -> float:
    """Chernoff bound exp(-(Lp-(k-1))^2 / (2pL)) on P(fewer than k of L band events).

    The tail inequality behind it requires the expected count Lp to exceed
    k - 1.  With ``strict=True`` (default) a ValueError marks that premise
    failing; ``strict=False`` evaluates the expression exactly as printed,
    which stays in (0, 1] but carries no probabilistic meaning below the
    premise — the continuation the closed-form sum-rate bound uses.
    """
    if L < 1 or k < 1:
        raise ValueError("need positive L and k")
    if not 0.0 < p <= 1.0:
        raise ValueError("band probability must lie in (0, 1]")
    mean = L * p
    slack = mean - (k - 1)
    if strict and slack <= 0.0:
        raise ValueError(
            f"Chernoff premise needs L*p > k-1 (got L*p={mean:.6g}, k={k})"
        )
    return math.exp(-slack * slack / (2.0 * mean))


def sumrate_lower_bound(L: int, k: int, P: float, delta: float,
                        *, with_correction: bool = True) -> float:
    """Closed-form lower bound on the expected scheduled sum rate.

    Combines three ingredients at the band edge u:

    * alignment loss of the all-ones combination on a band-confined window,
      (u / (u + delta))^2;
    * self-noise discount 1 / (1/(P k u^2) + 1);
    * with_correction=True multiplies in the complement 1 - g of the
      shortfall term g for actually finding k users in the band, evaluated
      exactly as the closed form prints it (``shortfall_bound`` with
      strict=False).  Below the Chernoff premise L p > k - 1 the term loses
      its probabilistic force: there it happens to track the asymptotic
      curve (g is negligible for small L), pinches the bound to 0 around
      L p = k - 1, and becomes a genuine tail bound beyond.

    ``with_correction=False`` drops the correction term entirely (it is
    o(1) in L) and exposes the smooth asymptotic shape.
    """
    if k < 1:
        raise ValueError("need at least one scheduled user")
    if not P > 0.0:
        raise ValueError("power must be positive")
    u = band_edge(L, delta)
    A = (u / (u + delta)) ** 2
    B = 1.0 / (1.0 / (P * k * u * u) + 1.0)
    if with_correction:
        p = band_probability(u, delta)
        g = shortfall_bound(L, k, p, strict=False)
    else:
        g = 0.0
    inner = k * (1.0 - A * B * (1.0 - g))
    if inner <= 0.0:
        # A*B*(1-g) >= 1 cannot happen for finite parameters (A, B < 1) but
        # guard the log anyway.
        return math.inf
    return 0.5 * k * log_plus(1.0 / inner)


def sumrate_upper_bound(L: int, k: int, P: float) -> float:
    """Upper bound (k/2) log2(1 + P E[max of L squared normal magnitudes]).

    The expected squared maximum is bounded by
    2 ln L - ln ln L - 2 ln Gamma(1/2) + gamma/2 for L >= 3, giving a cap on
    any scheduler that serves k users at a common rate.
    """
    if not isinstance(L, int):
        raise TypeError("user count must be an integer")
    if L < 3:
        raise ValueError("upper bound needs L >= 3 (ln ln L must be positive)")
    if k < 1:
        raise ValueError("need at least one scheduled user")
    if not P > 0.0:
        raise ValueError("power must be positive")
    term = (2.0 * math.log(L) - math.log(math.log(L))
            - 2.0 * math.lgamma(0.5) + EULER_MASCHERONI / 2.0)
    return 0.5 * k * math.log2(1.0 + P * term)


def lower_scaling_ratio(L: int, k: int, P: float, delta: float) -> float:
    """Lower bound over its target scaling (k/4) log2 log2 L.

    Uses the asymptotic form of the bound (no finite-L availability
    correction): the correction factor is an o(1) artefact that would mask
    the scaling limit at exactly the L where the Chernoff premise crosses
    over.  Approaches 1 from above as L grows.
    """
    denom = 0.25 * k * math.log2(math.log2(L))
    if denom <= 0.0:
        raise ValueError("scaling denominator not positive; need log2(L) > 1")
    return sumrate_lower_bound(L, k, P, delta, with_correction=False) / denom


def upper_scaling_ratio(L: int, k: int, P: float) -> float:
    """Upper bound over its target scaling (k/2) log2 log2 L; tends to 1."""
    denom = 0.5 * k * math.log2(math.log2(L))
    if denom <= 0.0:
        raise ValueError("scaling denominator not positive; need log2(L) > 1")
    return sumrate_upper_bound(L, k, P) / denom


@dataclass(frozen=True)
class BoundParams:
    """Validated parameter bundle for the bound family.

    ``chernoff_premise_ok`` and ``population_constraint_ok`` report whether
    the finite-L hypotheses behind the availability correction hold; they
    are advisory (the bound formulas stay evaluable either way) so that
    plotting ranges are not artificially restricted.
    """

    L: int
    k: int
    P: float
    delta: float

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValueError("need at least two users")
        if self.k < 1:
            raise ValueError("need at least one scheduled user")
        if not self.P > 0.0:
            raise ValueError("power must be positive")
        if not self.delta > 0.0:
            raise ValueError("band width must be positive")

    @property
    def u(self) -> float:
        return band_edge(self.L, self.delta)

    @property
    def band_p(self) -> float:
        return band_probability(self.u, self.delta)

    def chernoff_premise_ok(self) -> bool:
        """True when L * p exceeds k - 1 so the shortfall bound applies."""
        return self.L * self.band_p > self.k - 1

    def population_constraint_ok(self) -> bool:
        """True when k stays below the band's typical occupancy scale."""
        return self.k < (self.delta / (2.0 * math.sqrt(2.0 * math.pi))) \
            * math.sqrt(self.L) + 1.0
