import json
import math
import os

import numpy as np
import pytest

from cfsched.experiments import (
    COMPLETION_POLICIES,
    ExperimentConfig,
    completion_times,
    run_beta_angle_check,
    run_completion_time,
    run_fixed_a_comparison,
    run_rate_scatter,
    run_sumrate_scatter,
    run_sumrate_vs_L,
    sample_channel,
)
from cfsched.figures import render
from cfsched.reporting import (
    Table,
    figure_path_for,
    manifest_path_for,
    to_csv_text,
    write_csv,
    write_manifest,
)


# ----------------------------------------------------------------- config

def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(policy="greedy")
    with pytest.raises(ValueError):
        ExperimentConfig(rank_field="gf3")
    with pytest.raises(ValueError):
        ExperimentConfig(k_rule="sqrt")
    with pytest.raises(ValueError):
        ExperimentConfig(threads=0)


def test_too_few_users_fails_at_run_time():
    # k vs L is a per-experiment concern (grid runs ignore cfg.L), so the
    # config stays quiet and the runner raises
    cfg = ExperimentConfig(seed=0, trials=2, k=3, L_grid=(2,), oracle_max_L=0)
    with pytest.raises(ValueError):
        run_sumrate_vs_L(cfg)


def test_config_to_dict_is_json_ready():
    cfg = ExperimentConfig(seed=7, trials=3)
    d = cfg.to_dict()
    assert json.loads(json.dumps(d)) == d
    assert d["seed"] == 7


def test_sample_channel_deterministic():
    a = sample_channel(50, np.random.SeedSequence(3))
    b = sample_channel(50, np.random.SeedSequence(3))
    assert a.shape == (50,)
    assert np.array_equal(a, b)


# ------------------------------------------------------- reproducibility

def test_fixed_a_byte_identical_across_threads():
    base = dict(seed=1, trials=12, k=3, L=8, P_grid=(1.0, 100.0))
    t1 = to_csv_text(run_fixed_a_comparison(ExperimentConfig(threads=1, **base)))
    t2 = to_csv_text(run_fixed_a_comparison(ExperimentConfig(threads=2, **base)))
    t3 = to_csv_text(run_fixed_a_comparison(ExperimentConfig(threads=1, **base)))
    assert t1 == t2 == t3


def test_completion_byte_identical_across_threads():
    base = dict(seed=5, trials=40, L_grid=(10,), policy="unit")
    t1 = to_csv_text(run_completion_time(ExperimentConfig(threads=1, **base)))
    t2 = to_csv_text(run_completion_time(ExperimentConfig(threads=3, **base)))
    assert t1 == t2


# ------------------------------------------------------------ sum rate vs L

def test_sumrate_vs_L_shape_and_dominance():
    cfg = ExperimentConfig(seed=2, trials=25, k=2, P=10.0,
                           L_grid=(4, 6, 9), oracle_max_L=6)
    tab = run_sumrate_vs_L(cfg)
    assert tab.columns == ["L", "alg_mean", "alg_stderr", "oracle_mean",
                           "oracle_stderr", "lower_bound", "upper_bound"]
    assert [row[0] for row in tab.rows] == [4, 6, 9]
    for L, alg, alg_se, orc, orc_se, lo, up in tab.rows:
        assert alg > 0 and alg <= up
        if L <= 6:
            assert orc >= alg  # oracle dominates the window strategy
        else:
            assert orc is None and orc_se is None


# ------------------------------------------------------------- scatters

def test_rate_scatter_rows_and_envelope():
    cfg = ExperimentConfig(seed=0, k=3, P=100.0, L_grid=(8,), max_norm_sq=5)
    tab = run_rate_scatter(cfg)
    assert tab.columns == ["L", "angle", "norm_sq", "rate", "envelope"]
    assert len(tab.rows) == math.comb(8, 3) * 28
    for L, angle, n2, rate, env in tab.rows:
        assert 1 <= n2 <= 5
        if math.isfinite(rate):
            assert rate <= env + 1e-9


def test_sumrate_scatter_capped_family():
    cfg = ExperimentConfig(seed=0, L=10, k=3, P=1000.0, max_norm_sq=5)
    tab = run_sumrate_scatter(cfg)
    assert tab.columns == ["angle", "norm_sq", "nnz", "rate", "sum_rate"]
    assert len(tab.rows) == math.comb(10, 3)
    for angle, n2, nnz, rate, sr in tab.rows:
        assert 1 <= nnz <= 3 and 1 <= n2 <= 5
        assert sr == pytest.approx(nnz * rate)


# ------------------------------------------------------------ angle law

def test_beta_angle_check_schema():
    tab = run_beta_angle_check(ExperimentConfig(seed=0, trials=3000, k=3, L=25))
    assert tab.columns == ["k", "mode", "dependent", "n", "ks_distance",
                           "mean_cos_sq", "beta_mean"]
    rows = {(r[0], r[1]): r for r in tab.rows}
    for k in (2, 3):
        r = rows[(k, "independent")]
        assert r[2] == 0
        assert r[4] < 0.05  # KS at n=3000
        assert r[5] == pytest.approx(1.0 / k, abs=0.03)
    shared = rows[(3, "shared")]
    assert shared[2] == 1
    assert shared[3] == math.comb(25, 3)


# ------------------------------------------------------- completion times

def test_unit_policy_is_coupon_collecting():
    counts, capped = completion_times(12, 1, "unit", 300, rng=0)
    assert capped == 0
    assert min(counts) >= 12
    mean = sum(counts) / len(counts)
    expected = 12 * sum(1.0 / i for i in range(1, 13))
    assert mean == pytest.approx(expected, rel=0.15)


def test_random_policy_floor_and_speed():
    counts, capped = completion_times(10, 10, "random", 100, rng=1)
    assert capped == 0
    assert min(counts) >= 10  # rank grows by at most one per phase
    assert sum(counts) / len(counts) < 14  # full-width rows finish fast


def test_scheduled_policy_runs():
    counts, capped = completion_times(8, 2, "scheduled", 20, rng=2, P=100.0)
    assert capped == 0
    assert min(counts) >= 8


def test_dense_policy_needs_gf2():
    with pytest.raises(ValueError):
        completion_times(6, 3, "dense", 5, rng=0, rank_field="rational")
    counts, _ = completion_times(16, 16, "dense", 200, rng=3, rank_field="gf2")
    mean = sum(counts) / len(counts)
    # random binary matrices need ~L + 1.6 rows for full GF(2) rank
    assert mean == pytest.approx(16 + 1.6, abs=0.8)


def test_completion_policy_listing():
    assert COMPLETION_POLICIES == ("unit", "random", "scheduled", "dense")


def test_run_completion_time_log2_rule():
    cfg = ExperimentConfig(seed=0, trials=10, L_grid=(9, 16), policy="random",
                           k_rule="log2")
    tab = run_completion_time(cfg)
    ks = {row[0]: row[1] for row in tab.rows}
    assert ks[9] == 4 and ks[16] == 4  # ceil(log2 L)
    for row in tab.rows:
        assert row[2] == "random"


# ------------------------------------------------------------- reporting

def test_csv_formatting_rules():
    t = Table("demo", ["a", "b", "c"])
    t.append(1, 0.1, None)
    t.append(200, 2.0, "x")
    text = to_csv_text(t)
    lines = text.splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "1,0.10000000000000001,"   # %.17g round-trips exactly
    assert lines[2] == "200,2,x"
    assert text.endswith("\n")


def test_write_csv_and_manifest(tmp_path):
    t = Table("demo", ["x"])
    t.append(1.5)
    csv_path = os.path.join(tmp_path, "out.csv")
    write_csv(t, csv_path)
    assert open(csv_path).read() == "x\n1.5\n"
    mpath = write_manifest(t, csv_path, {"seed": 0})
    assert mpath == manifest_path_for(csv_path)
    payload = json.load(open(mpath))
    assert payload == {"experiment": "demo", "columns": ["x"],
                       "config": {"seed": 0}}
    assert figure_path_for(csv_path).endswith("out.png")


# -------------------------------------------------------------- figures

def _render_ok(tab, tmp_path, name):
    path = os.path.join(tmp_path, name)
    out = render(tab, path)
    assert out == path
    assert os.path.getsize(path) > 1000
    return path


def test_render_each_figure_kind(tmp_path):
    small = ExperimentConfig(seed=0, trials=8, k=2, P=10.0, L_grid=(4, 6),
                             oracle_max_L=6)
    _render_ok(run_sumrate_vs_L(small), tmp_path, "f1.png")
    _render_ok(
        run_rate_scatter(ExperimentConfig(seed=0, k=2, L_grid=(6,), max_norm_sq=4)),
        tmp_path, "f2.png")
    _render_ok(
        run_sumrate_scatter(ExperimentConfig(seed=0, L=8, k=2, max_norm_sq=4)),
        tmp_path, "f3.png")
    _render_ok(
        run_fixed_a_comparison(ExperimentConfig(seed=0, trials=6, k=2, L=6,
                                                P_grid=(1.0, 10.0),
                                                coeff_sets=((1, 1), (2, 1)))),
        tmp_path, "f4.png")
    _render_ok(run_beta_angle_check(ExperimentConfig(seed=0, trials=500, L=15)),
               tmp_path, "f5.png")
    _render_ok(
        run_completion_time(ExperimentConfig(seed=0, trials=10, L_grid=(6,),
                                             policy="unit")),
        tmp_path, "f6.png")


def test_render_rejects_unknown_table(tmp_path):
    with pytest.raises(ValueError):
        render(Table("mystery", ["x"]), os.path.join(tmp_path, "no.png"))
