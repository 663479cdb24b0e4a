"""Acceptance gate: twelve pass/fail checks, one per stated guarantee.

Each test prints a single ``[criterion NN] PASS/FAIL`` line directly to the
terminal (bypassing capture) and then asserts, so the tee'd run log always
shows the verdict of every criterion.  Time budgets are part of the
contract and are asserted alongside the numeric condition.
"""
import itertools
import math
import time

import numpy as np

from cfsched.bounds import (
    lower_scaling_ratio,
    sumrate_lower_bound,
    sumrate_upper_bound,
    upper_scaling_ratio,
)
from cfsched.coeffs import best_unit_vector, enumerate_candidates, optimal_coeff
from cfsched.experiments import (
    ExperimentConfig,
    completion_times,
    run_beta_angle_check,
    run_fixed_a_comparison,
    run_sumrate_scatter,
    run_sumrate_vs_L,
)
from cfsched.rates import computation_rate, computation_rate_alpha, mmse_alpha
from cfsched.reporting import to_csv_text
from cfsched.scheduling import exhaustive_allones_schedule, sorted_window_schedule


def _verdict(capsys, num: int, ok: bool, label: str) -> bool:
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {label}"
    with capsys.disabled():
        print(line, flush=True)
    return ok


def _close(got, want, rel, abs_tol=0.0):
    return math.isclose(got, want, rel_tol=rel, abs_tol=abs_tol)


def test_criterion_01_single_user_closed_form(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    ok = True
    for _ in range(1000):
        h = float(rng.standard_normal())
        P = float(10.0 ** rng.uniform(-2, 3))
        got = computation_rate([h], [1], P).rate
        want = 0.5 * math.log2(1.0 + P * h * h)
        # sub-1e-12-bit rates carry no relative precision in doubles, so an
        # absolute floor of the same size backs the relative check
        ok = ok and _close(got, want, rel=1e-12, abs_tol=1e-12)
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1.0
    assert _verdict(capsys, 1, ok, f"single-user rate matches 1/2 log2(1+P h^2) "
                           f"({elapsed:.2f} s)")


def test_criterion_02_mmse_scaling_identity_and_optimality(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    agree = True
    never_beats = True
    for _ in range(1000):
        dim = int(rng.integers(2, 5))
        h = rng.standard_normal(dim).tolist()
        a = rng.integers(-4, 5, size=dim).tolist()
        if not any(a):
            a[int(rng.integers(dim))] = 1
        P = float(10.0 ** rng.uniform(-1, 3))
        base = computation_rate(h, a, P)
        if base.is_infinite:
            continue
        star = computation_rate_alpha(h, a, P, mmse_alpha(h, a, P))
        agree = agree and _close(star, base.rate, rel=1e-9, abs_tol=1e-9)
        for off in rng.standard_normal(5):
            trial = computation_rate_alpha(h, a, P, base.alpha + off)
            never_beats = never_beats and trial <= base.rate + 1e-12
    elapsed = time.perf_counter() - t0
    ok = agree and never_beats and elapsed < 1.0
    assert _verdict(capsys, 2, ok, f"scaled-receiver form agrees at the MMSE point and "
                           f"never beats it ({elapsed:.2f} s)")


def test_criterion_03_optimal_coefficients_copy_channel_signs(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    violations = 0
    for _ in range(500):
        dim = int(rng.integers(2, 4))
        h = rng.standard_normal(dim).tolist()
        P = float(rng.choice([1.0, 10.0, 100.0]))
        a, _ = optimal_coeff(h, P)
        if any(x * y < 0 for x, y in zip(h, a)):
            violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 30.0
    assert _verdict(capsys, 3, ok, f"sign pattern matched in 500/500 searches "
                           f"({elapsed:.2f} s)")


def test_criterion_04_window_scan_equals_all_ones_oracle(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    mismatches = 0
    for k, P in itertools.product((2, 3), (1.0, 100.0)):
        for _ in range(50):
            L = int(rng.integers(k + 1, 13))
            h = rng.standard_normal(L).tolist()
            win = sorted_window_schedule(h, k, P)
            orc = exhaustive_allones_schedule(h, k, P)
            if win.rate != orc.rate:  # must be the same float, not close
                mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30.0
    assert _verdict(capsys, 4, ok, f"sorted-window rate bit-identical to the all-ones "
                           f"oracle in 200/200 trials ({elapsed:.2f} s)")


def test_criterion_05_population_sweep_properties(capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(seed=0, trials=500, k=3, P=100.0,
                           L_grid=(10, 20, 45, 100, 200), oracle_max_L=20)
    tab = run_sumrate_vs_L(cfg)
    rows = {row[0]: row for row in tab.rows}
    grid = [10, 20, 45, 100, 200]

    nondecreasing = True
    for a, b in zip(grid, grid[1:]):
        mean_a, se_a = rows[a][1], rows[a][2]
        mean_b, se_b = rows[b][1], rows[b][2]
        slack = 2.0 * math.hypot(se_a, se_b)
        nondecreasing = nondecreasing and (mean_b >= mean_a - slack)

    oracle_ok = True
    for L in (10, 20):
        alg, orc = rows[L][1], rows[L][3]
        oracle_ok = oracle_ok and orc >= alg and (alg / orc) >= 0.75

    below_upper = True
    for L in grid:
        ub = rows[L][6]
        below_upper = below_upper and rows[L][1] <= ub
        if rows[L][3] is not None:
            below_upper = below_upper and rows[L][3] <= ub

    elapsed = time.perf_counter() - t0
    ok = nondecreasing and oracle_ok and below_upper and elapsed < 600.0
    assert _verdict(capsys, 5, ok, f"mean sum rate grows with population, oracle "
                           f"dominates within ratio 0.75, all below the upper "
                           f"bound ({elapsed:.1f} s)")


def test_criterion_06_unit_vectors_win_most_draws(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    P = 1000.0
    draws = [rng.standard_normal(3).tolist() for _ in range(10_000)]
    unit_rates = [best_unit_vector(h, P)[1].rate for h in draws]
    worst = 0.0
    for a in enumerate_candidates(3, 5):
        if sum(x * x for x in a) == 1:
            continue
        beaten = 0
        for h, ur in zip(draws, unit_rates):
            if ur <= computation_rate(h, list(a), P).rate:
                beaten += 1
        worst = max(worst, beaten / len(draws))
    elapsed = time.perf_counter() - t0
    ok = worst <= 0.30 + 0.02 and elapsed < 120.0
    assert _verdict(capsys, 6, ok, f"no fixed non-unit vector matches the best unit "
                           f"vector in more than {worst:.3f} of draws "
                           f"({elapsed:.1f} s)")


def test_criterion_07_squared_cosine_follows_beta_law(capsys):
    t0 = time.perf_counter()
    tab = run_beta_angle_check(ExperimentConfig(seed=0, trials=10_000, k=3, L=45))
    ks = {row[0]: row[4] for row in tab.rows if row[1] == "independent"}
    elapsed = time.perf_counter() - t0
    ok = ks[2] < 0.02 and ks[3] < 0.02 and elapsed < 10.0
    assert _verdict(capsys, 7, ok, f"KS distance to Beta(1/2,(k-1)/2): "
                           f"k=2 {ks[2]:.4f}, k=3 {ks[3]:.4f} ({elapsed:.1f} s)")


def test_criterion_08_single_user_completion_is_coupon_collecting(capsys):
    t0 = time.perf_counter()
    counts, capped = completion_times(30, 1, "unit", 2000, rng=42)
    mean = sum(counts) / len(counts)
    expected = 30.0 * sum(1.0 / i for i in range(1, 31))
    elapsed = time.perf_counter() - t0
    ok = capped == 0 and abs(mean - expected) / expected < 0.05 and elapsed < 30.0
    assert _verdict(capsys, 8, ok, f"mean phases {mean:.2f} vs L*H_L {expected:.2f} "
                           f"({elapsed:.1f} s)")


def test_criterion_09_scaling_ratios_tighten(capsys):
    t0 = time.perf_counter()
    grid = (10**4, 10**6, 10**9, 10**12)
    lower = [abs(lower_scaling_ratio(L, 3, 100.0, 0.005) - 1.0) for L in grid]
    upper = [abs(upper_scaling_ratio(L, 3, 100.0) - 1.0) for L in grid]
    elapsed = time.perf_counter() - t0
    strictly = all(a > b for a, b in zip(lower, lower[1:]))
    strictly = strictly and all(a > b for a, b in zip(upper, upper[1:]))
    ok = strictly and elapsed < 1.0
    assert _verdict(capsys, 9, ok, f"distance to the log-log scaling limit strictly "
                           f"shrinks over four decades ({elapsed:.3f} s)")


def test_criterion_10_bound_sandwich(capsys):
    t0 = time.perf_counter()
    ok = True
    for L in (10**3, 10**4, 10**5, 10**6):
        lo = sumrate_lower_bound(L, 3, 100.0, 0.005)
        up = sumrate_upper_bound(L, 3, 100.0)
        ok = ok and lo <= up
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 1.0
    assert _verdict(capsys, 10, ok, f"lower bound never exceeds the upper bound on the "
                            f"decade grid ({elapsed:.3f} s)")


def test_criterion_11_best_subsets_prefer_norm_three(capsys):
    t0 = time.perf_counter()
    hits = 0
    for seed in range(10):
        cfg = ExperimentConfig(seed=seed, L=45, k=3, P=1000.0, max_norm_sq=5)
        tab = run_sumrate_scatter(cfg)
        top = max(tab.rows, key=lambda row: row[4])
        if top[1] == 3:
            hits += 1
    elapsed = time.perf_counter() - t0
    ok = hits >= 7 and elapsed < 300.0
    assert _verdict(capsys, 11, ok, f"max-sum-rate subset used squared norm 3 in "
                            f"{hits}/10 seeds ({elapsed:.1f} s)")


def test_criterion_12_byte_identical_reruns(capsys):
    t0 = time.perf_counter()
    base = dict(seed=3, trials=40, k=3, P=100.0, L_grid=(10, 14), oracle_max_L=14)
    one = to_csv_text(run_sumrate_vs_L(ExperimentConfig(threads=1, **base)))
    two = to_csv_text(run_sumrate_vs_L(ExperimentConfig(threads=2, **base)))
    rerun = to_csv_text(run_sumrate_vs_L(ExperimentConfig(threads=1, **base)))
    fa = dict(seed=1, trials=30, k=3, L=10, P_grid=(1.0, 100.0))
    fa1 = to_csv_text(run_fixed_a_comparison(ExperimentConfig(threads=1, **fa)))
    fa2 = to_csv_text(run_fixed_a_comparison(ExperimentConfig(threads=2, **fa)))
    elapsed = time.perf_counter() - t0
    ok = one == two == rerun and fa1 == fa2 and elapsed < 60.0
    assert _verdict(capsys, 12, ok, f"same config gives byte-identical tables across "
                            f"reruns and thread counts ({elapsed:.1f} s)")
