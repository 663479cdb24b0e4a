import math

import pytest
from hypothesis import given, settings, strategies as st

from cfsched.rates import (
    DEGENERATE_TOL,
    RateResult,
    angle_between,
    as_channel,
    as_coeffs,
    as_power,
    computation_rate,
    computation_rate_alpha,
    high_snr_rate,
    log_plus,
    mmse_alpha,
)

finite_floats = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
powers = st.floats(1e-3, 1e6, allow_nan=False, allow_infinity=False)


def closed_form_dim1(h: float, n: int, P: float) -> float:
    # single transmitter: the quadratic form collapses to n^2 / (1 + P h^2)
    return max(0.0, 0.5 * math.log2((1.0 + P * h * h) / (n * n)))


def test_dim1_unit_coefficient_matches_closed_form():
    for h in (0.1, 0.5, 1.0, 3.7, -2.2):
        for P in (0.01, 1.0, 10.0, 1e4):
            got = computation_rate([h], [1], P).rate
            want = 0.5 * math.log2(1.0 + P * h * h)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_dim1_general_coefficient():
    # n > 1 subtracts two nearly equal terms at large P; only ask for 1e-9
    for h in (0.1, 0.5, 1.0, 3.7, -2.2):
        for n in (2, 3, -4):
            for P in (0.01, 1.0, 10.0, 1e4):
                got = computation_rate([h], [n], P).rate
                want = closed_form_dim1(h, n, P)
                assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_two_user_symmetric_example():
    res = computation_rate([1.0, 1.0], [1, 1], 10.0)
    assert res.rate == pytest.approx(1.6961587113893792, rel=1e-12)
    assert res.alpha == pytest.approx(20.0 / 21.0, rel=1e-12)
    assert res.sum_rate == pytest.approx(2 * res.rate)
    assert res.nnz == 2


def test_rate_result_fields():
    res = computation_rate([0.8, -1.4, 2.2], [1, -2, 3], 100.0)
    assert isinstance(res, RateResult)
    assert res.nnz == 3
    assert res.sum_rate == res.nnz * res.rate
    assert 0.0 <= res.angle <= math.pi / 2
    assert not res.is_infinite
    with pytest.raises(AttributeError):
        res.rate = 0.0  # frozen


def test_zero_channel_gives_zero_rate_nan_angle():
    res = computation_rate([0.0, 0.0], [1, 1], 10.0)
    assert res.rate == 0.0
    assert res.alpha == 0.0
    assert math.isnan(res.angle)


def test_collinear_finite_power_is_finite():
    # a parallel to h does NOT blow up at finite power: the residual term
    # is ||a||^2 / (1 + P ||h||^2) > 0
    res = computation_rate([1.0, 2.0], [1, 2], 10.0)
    assert not res.is_infinite
    assert res.rate == pytest.approx(0.5 * math.log2(51.0 / 5.0), rel=1e-12)


def test_collinear_extreme_power_hits_degenerate_guard():
    res = computation_rate([1.0, 2.0], [1, 2], 1e15)
    assert res.is_infinite
    assert res.rate == math.inf


def test_high_snr_rate_is_envelope():
    h, a = [0.3, -1.1, 0.7], [1, -2, 1]
    env = high_snr_rate(h, a)
    for P in (0.1, 1.0, 100.0, 1e6):
        assert computation_rate(h, a, P).rate <= env + 1e-12


def test_high_snr_exactly_collinear_is_infinite():
    assert high_snr_rate([1.0, 2.0], [1, 2]) == math.inf
    assert high_snr_rate([3.0, 0.0], [1, 0]) == math.inf


@settings(deadline=None, derandomize=True, max_examples=200)
@given(
    st.lists(finite_floats, min_size=1, max_size=5),
    st.lists(st.integers(-6, 6), min_size=1, max_size=5),
    powers,
)
def test_alpha_identity_and_optimality(h, a, P):
    if len(h) != len(a) or not any(a) or not any(h):
        return
    base = computation_rate(h, a, P)
    alpha = mmse_alpha(h, a, P)
    assert alpha == pytest.approx(base.alpha, rel=1e-12, abs=1e-12)
    at_mmse = computation_rate_alpha(h, a, P, alpha)
    if math.isfinite(base.rate):
        assert at_mmse == pytest.approx(base.rate, rel=1e-9, abs=1e-9)
    for eps in (1e-3, -1e-3):
        assert computation_rate_alpha(h, a, P, alpha + eps) <= base.rate + 1e-12


@settings(deadline=None, derandomize=True, max_examples=100)
@given(st.floats(1e-6, 1e6), st.lists(finite_floats, min_size=2, max_size=4))
def test_angle_scale_invariance(c, h):
    if all(abs(x) < 1e-9 for x in h):
        return
    a = [1] * len(h)
    assert angle_between([c * x for x in h], a) == pytest.approx(
        angle_between(h, a), abs=1e-7
    )


def test_angle_requires_nonzero():
    with pytest.raises(ValueError):
        angle_between([0.0, 0.0], [1, 1])


def test_log_plus():
    assert log_plus(8.0) == 3.0
    assert log_plus(0.5) == 0.0
    with pytest.raises(ValueError):
        log_plus(0.0)
    with pytest.raises(ValueError):
        log_plus(-1.0)


def test_input_validation():
    with pytest.raises(ValueError):
        as_channel([])
    with pytest.raises(ValueError):
        as_channel([1.0, math.nan])
    with pytest.raises(ValueError):
        as_coeffs([0, 0])
    with pytest.raises(ValueError):
        as_coeffs([1.5, 1])
    with pytest.raises(ValueError):
        as_power(0.0)
    with pytest.raises(ValueError):
        as_power(math.inf)
    with pytest.raises(ValueError):
        computation_rate([1.0, 2.0], [1], 10.0)  # length mismatch


def test_degenerate_tolerance_exported():
    assert DEGENERATE_TOL == 1e-12
