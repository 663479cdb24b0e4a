"""Seeded Monte-Carlo experiments over the scheduling pipeline.

Each experiment consumes an :class:`ExperimentConfig` and returns a
:class:`~cfsched.reporting.Table`; the CLI handles writing.  Reproducibility
contract: the root seed is split with ``numpy.random.SeedSequence.spawn``
into one independent stream per trial, trials are mapped over in a fixed
order (serially or by an order-preserving process pool), and reductions use
numpy's pairwise summation — so byte-identical tables come out for any
``threads`` setting.

Experiments
-----------
- sum rate vs population size, with exhaustive-oracle and bound overlays;
- per-subset rate scatter against the angle/norm ceiling;
- per-subset best sum rate against the chosen coefficient norm;
- fixed-coefficient scheduling policies across power levels;
- the squared-cosine Beta law behind angle-based scheduling;
- phases until the collected coefficient rows reach full rank.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np
import scipy.stats

from .bounds import sumrate_lower_bound, sumrate_upper_bound
from .coeffs import best_sumrate_coeff, enumerate_candidates
from .ranks import GF2RankTracker, RationalRankTracker
from .rates import computation_rate, high_snr_rate
from .reporting import Table
from .scheduling import exhaustive_schedule, sorted_window_schedule

__all__ = [
    "MAX_PHASES",
    "ExperimentConfig",
    "completion_times",
    "run_beta_angle_check",
    "run_completion_time",
    "run_fixed_a_comparison",
    "run_rate_scatter",
    "run_sumrate_scatter",
    "run_sumrate_vs_L",
    "sample_channel",
]

#: Completion-time trials stop (and are flagged) after this many phases.
MAX_PHASES = 10**6

COMPLETION_POLICIES = ("unit", "random", "scheduled", "dense")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameterisation of one experiment run.

    The same config always produces the same table.  ``threads`` only sets
    how trials are farmed out, never what they compute.
    """

    seed: int = 0
    trials: int = 500
    k: int = 3
    P: float = 100.0
    L: int = 45
    L_grid: tuple[int, ...] = (10, 20, 45, 100, 200)
    P_grid: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0)
    delta: float = 0.005
    oracle_max_L: int = 20
    max_norm_sq: int = 5
    coeff_sets: tuple[tuple[int, ...], ...] = ((2, 1, 1), (2, 2, 1), (3, 2, 1))
    policy: str = "unit"
    rank_field: str = "rational"
    k_rule: str = "fixed"
    threads: int = 1

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.k < 1:
            raise ValueError("need at least one scheduled user")
        if self.policy not in COMPLETION_POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.rank_field not in ("rational", "gf2"):
            raise ValueError(f"unknown rank field {self.rank_field!r}")
        if self.k_rule not in ("fixed", "log2"):
            raise ValueError(f"unknown k rule {self.k_rule!r}")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "k": self.k,
            "P": self.P,
            "L": self.L,
            "L_grid": list(self.L_grid),
            "P_grid": list(self.P_grid),
            "delta": self.delta,
            "oracle_max_L": self.oracle_max_L,
            "max_norm_sq": self.max_norm_sq,
            "coeff_sets": [list(a) for a in self.coeff_sets],
            "policy": self.policy,
            "rank_field": self.rank_field,
            "k_rule": self.k_rule,
            "threads": self.threads,
        }


def sample_channel(L: int, rng: np.random.Generator | np.random.SeedSequence | int | None = None) -> np.ndarray:
    """L i.i.d. standard normal channel gains from the given seed/stream."""
    if L < 1:
        raise ValueError("need at least one user")
    gen = np.random.default_rng(rng)
    return gen.standard_normal(int(L))


def _stderr(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def _pmap(fn: Callable[[Any], Any], tasks: Sequence[Any], threads: int) -> list[Any]:
    """Order-preserving map, serial or over a process pool."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _chunked(seq: Sequence[Any], size: int) -> list[Sequence[Any]]:
    return [seq[i:i + size] for i in range(0, len(seq), size)]


# ============================================================
# sum rate vs population size
# ============================================================

def _sumrate_trial(task: tuple) -> tuple[float, float]:
    ss, L, k, P, with_oracle = task
    h = sample_channel(L, ss)
    alg = sorted_window_schedule(h, k, P).sum_rate
    if with_oracle:
        oracle = exhaustive_schedule(h, k, P).sum_rate
    else:
        oracle = math.nan
    return alg, oracle


def run_sumrate_vs_L(cfg: ExperimentConfig) -> Table:
    """Mean scheduled sum rate per population size, with oracle and bounds.

    The exhaustive oracle column is only computed for L at or below
    ``cfg.oracle_max_L`` (subset count explodes); larger rows leave those
    cells empty.
    """
    table = Table("sumrate_vs_L", [
        "L", "alg_mean", "alg_stderr", "oracle_mean", "oracle_stderr",
        "lower_bound", "upper_bound",
    ])
    root = np.random.SeedSequence(cfg.seed)
    groups = root.spawn(len(cfg.L_grid))
    for child, L in zip(groups, cfg.L_grid):
        with_oracle = L <= cfg.oracle_max_L
        tasks = [
            (ss, int(L), cfg.k, cfg.P, with_oracle)
            for ss in child.spawn(cfg.trials)
        ]
        pairs = _pmap(_sumrate_trial, tasks, cfg.threads)
        alg = np.array([a for a, _ in pairs])
        lb = sumrate_lower_bound(int(L), cfg.k, cfg.P, cfg.delta)
        ub = sumrate_upper_bound(int(L), cfg.k, cfg.P)
        if with_oracle:
            orc = np.array([o for _, o in pairs])
            table.append(int(L), float(alg.mean()), _stderr(alg),
                         float(orc.mean()), _stderr(orc), lb, ub)
        else:
            table.append(int(L), float(alg.mean()), _stderr(alg),
                         None, None, lb, ub)
    return table


# ============================================================
# per-subset rate scatter (angle / norm ceiling)
# ============================================================

def _rate_scatter_chunk(task: tuple) -> list[list[float]]:
    h, combos, P, max_norm_sq, L = task
    k = len(combos[0])
    cands = list(enumerate_candidates(k, max_norm_sq))
    rows: list[list[float]] = []
    for combo in combos:
        sub = [h[i] for i in combo]
        for a in cands:
            d = math.fsum(x * y for x, y in zip(sub, a))
            av = list(a) if d >= 0.0 else [-x for x in a]
            res = computation_rate(sub, av, P)
            rows.append([
                L, res.angle, sum(x * x for x in av), res.rate,
                high_snr_rate(sub, av),
            ])
    return rows


def run_rate_scatter(cfg: ExperimentConfig) -> Table:
    """Every (subset, small coefficient vector) pair for one channel draw.

    One seeded realization per L in the grid; rows carry the angle between
    the sub-channel and the (orientation-fixed) coefficient vector, the
    squared coefficient norm, the achieved rate at ``cfg.P``, and the
    power-free ceiling at that angle/norm.  No aggregation — this is the
    scatter the rate/angle trade-off plots are drawn from.
    """
    table = Table("rate_scatter", ["L", "angle", "norm_sq", "rate", "envelope"])
    root = np.random.SeedSequence(cfg.seed)
    groups = root.spawn(len(cfg.L_grid))
    for child, L in zip(groups, cfg.L_grid):
        h = tuple(float(x) for x in sample_channel(int(L), child))
        combos = list(itertools.combinations(range(int(L)), cfg.k))
        chunks = _chunked(combos, max(1, len(combos) // max(1, cfg.threads * 8)))
        tasks = [(h, chunk, cfg.P, cfg.max_norm_sq, int(L)) for chunk in chunks]
        for rows in _pmap(_rate_scatter_chunk, tasks, cfg.threads):
            for row in rows:
                table.append(*row)
    return table


# ============================================================
# per-subset best sum rate vs coefficient norm
# ============================================================

def _sumrate_scatter_chunk(task: tuple) -> list[list[float]]:
    h, combos, P = task
    rows: list[list[float]] = []
    for combo in combos:
        sub = [h[i] for i in combo]
        a, res = best_sumrate_coeff(sub, P)
        rows.append([
            res.angle, sum(x * x for x in a), res.nnz, res.rate, res.sum_rate,
        ])
    return rows


def run_sumrate_scatter(cfg: ExperimentConfig) -> Table:
    """Per-subset coefficient choice and sum rate for one channel draw.

    Each row is one subset of a single seeded length-``cfg.L`` channel: the
    chosen coefficient vector's angle to the sub-channel, its squared norm
    and support size, and the rate/sum-rate it achieves.

    With ``cfg.max_norm_sq`` set (default 5) the choice is the best-rate
    member of the same bounded candidate family the rate scatter plots,
    ties to the smaller norm; this is the family the norm-histogram claims
    are stated over.  Setting it to 0 switches to the unbounded per-subset
    sum-rate search, where occasionally a larger-norm vector that is almost
    collinear with the sub-channel takes the top spot.
    """
    table = Table("sumrate_scatter", ["angle", "norm_sq", "nnz", "rate", "sum_rate"])
    root = np.random.SeedSequence(cfg.seed)
    if math.comb(cfg.L, cfg.k) > 10**7:
        raise ValueError(f"C({cfg.L},{cfg.k}) subsets is beyond the scan guard")
    h = sample_channel(cfg.L, root)
    if not cfg.max_norm_sq:
        combos = list(itertools.combinations(range(cfg.L), cfg.k))
        h_tup = tuple(float(x) for x in h)
        chunks = _chunked(combos, max(1, len(combos) // max(1, cfg.threads * 8)))
        tasks = [(h_tup, chunk, cfg.P) for chunk in chunks]
        for rows in _pmap(_sumrate_scatter_chunk, tasks, cfg.threads):
            for row in rows:
                table.append(*row)
        return table
    cands = sorted(enumerate_candidates(cfg.k, cfg.max_norm_sq),
                   key=lambda a: (sum(x * x for x in a), a))
    C = np.array(cands, dtype=float)
    na2 = (C * C).sum(axis=1)
    nnz = (C != 0).sum(axis=1)
    combos = np.array(list(itertools.combinations(range(cfg.L), cfg.k)))
    subs = h[combos]
    hh = np.einsum("ij,ij->i", subs, subs)
    d = subs @ C.T
    inner = na2[None, :] - cfg.P * d * d / (1.0 + cfg.P * hh)[:, None]
    rate = np.where(
        inner <= 1e-12, np.inf,
        0.5 * np.maximum(0.0, np.log2(1.0 / np.maximum(inner, 1e-300))),
    )
    pick = rate.argmax(axis=1)
    rows_idx = np.arange(len(pick))
    r = rate[rows_idx, pick]
    cos = np.clip(np.abs(d[rows_idx, pick]) / np.sqrt(hh * na2[pick]), -1.0, 1.0)
    ang = np.arccos(cos)
    for i in range(len(pick)):
        table.append(float(ang[i]), int(na2[pick[i]]), int(nnz[pick[i]]),
                     float(r[i]), float(nnz[pick[i]] * r[i]))
    return table


# ============================================================
# fixed coefficient profiles across power levels
# ============================================================

def _fixed_a_trial(task: tuple) -> list[float]:
    ss, L, k, P_grid, coeff_sets = task
    gen = np.random.default_rng(ss)
    h = gen.standard_normal(L)
    combos = np.array(list(itertools.combinations(range(L), k)))
    mags = np.sort(np.abs(h)[combos], axis=1)[:, ::-1]
    hh = np.einsum("ij,ij->i", mags, mags)
    rand_row = int(gen.integers(len(combos)))
    out: list[float] = []
    for a in coeff_sets:
        a_desc = np.sort(np.abs(np.asarray(a, dtype=float)))[::-1]
        na2 = float(a_desc @ a_desc)
        dots = mags @ a_desc
        cos_rows = dots * dots / hh
        ang_row = int(np.argmax(cos_rows))
        a_int = [int(x) for x in a_desc]
        for P in P_grid:
            inner = na2 - P * dots * dots / (1.0 + P * hh)
            opt_row = int(np.argmin(inner))
            for row in (opt_row, ang_row, rand_row):
                out.append(computation_rate(list(mags[row]), a_int, P).rate)
    return out


FIXED_A_POLICIES = ("best_subset", "min_angle", "random")


def run_fixed_a_comparison(cfg: ExperimentConfig) -> Table:
    """Mean rate of three subset-selection policies for fixed coefficients.

    For each coefficient profile and power level: the subset maximising the
    rate for that profile, the subset minimising the angle to it (power-
    blind), and a uniformly random subset.  Signs are always matched to the
    chosen sub-channel, and the profile's largest entries ride on the
    largest channel magnitudes, so only magnitude patterns matter.
    """
    for a in cfg.coeff_sets:
        if len(a) != cfg.k:
            raise ValueError(f"profile {a} does not have k={cfg.k} entries")
        if not any(a):
            raise ValueError("all-zero coefficient profile")
    table = Table("fixed_a_comparison", ["P", "a", "policy", "mean_rate", "stderr"])
    root = np.random.SeedSequence(cfg.seed)
    tasks = [
        (ss, cfg.L, cfg.k, cfg.P_grid, cfg.coeff_sets)
        for ss in root.spawn(cfg.trials)
    ]
    results = np.array(_pmap(_fixed_a_trial, tasks, cfg.threads))
    col = 0
    cells: list[tuple[float, str, str, float, float]] = []
    for a in cfg.coeff_sets:
        label = "-".join(str(abs(int(x))) for x in sorted(a, reverse=True))
        for P in cfg.P_grid:
            for policy in FIXED_A_POLICIES:
                vals = results[:, col]
                cells.append((float(P), label, policy,
                              float(vals.mean()), _stderr(vals)))
                col += 1
    cells.sort(key=lambda c: (c[0], c[1], FIXED_A_POLICIES.index(c[2])))
    for cell in cells:
        table.append(*cell)
    return table


# ============================================================
# squared-cosine Beta law
# ============================================================

def _cos_sq_vs_ones(rows: np.ndarray) -> np.ndarray:
    k = rows.shape[1]
    s = rows.sum(axis=1)
    return s * s / (k * np.einsum("ij,ij->i", rows, rows))


def run_beta_angle_check(cfg: ExperimentConfig) -> Table:
    """Squared cosine of Gaussian channels against a fixed direction.

    Independent rows: n fresh k-dim channels; their cos^2 against the
    all-ones direction follows Beta(1/2, (k-1)/2), checked by KS distance.
    The shared-channel row reuses one length-L draw across all its subsets;
    those samples are mutually dependent (flagged), so the KS number is
    reported for context, not asserted.
    """
    table = Table("beta_angle", [
        "k", "mode", "dependent", "n", "ks_distance", "mean_cos_sq", "beta_mean",
    ])
    root = np.random.SeedSequence(cfg.seed)
    ks_children = root.spawn(3)
    for child, k in zip(ks_children[:2], (2, 3)):
        gen = np.random.default_rng(child)
        rows = gen.standard_normal((cfg.trials, k))
        samples = _cos_sq_vs_ones(rows)
        ks = scipy.stats.kstest(samples, "beta", args=(0.5, (k - 1) / 2.0)).statistic
        table.append(k, "independent", 0, samples.size, float(ks),
                     float(samples.mean()), 1.0 / k)
    h = sample_channel(cfg.L, ks_children[2])
    combos = np.array(list(itertools.combinations(range(cfg.L), cfg.k)))
    rows = h[combos]
    samples = _cos_sq_vs_ones(rows)
    ks = scipy.stats.kstest(samples, "beta", args=(0.5, (cfg.k - 1) / 2.0)).statistic
    table.append(cfg.k, "shared", 1, samples.size, float(ks),
                 float(samples.mean()), 1.0 / cfg.k)
    return table


# ============================================================
# phases until full rank
# ============================================================

def _completion_trial(task: tuple) -> tuple[int, bool]:
    ss, L, k, policy, P, rank_field, max_phases = task
    gen = np.random.default_rng(ss)
    tracker = GF2RankTracker(L) if rank_field == "gf2" else RationalRankTracker(L)
    phases = 0
    while not tracker.complete and phases < max_phases:
        phases += 1
        if policy == "unit":
            row = [0] * L
            row[int(gen.integers(L))] = 1
        elif policy == "random":
            row = [0] * L
            idx = gen.choice(L, size=k, replace=False)
            signs = gen.choice((-1, 1), size=k)
            for i, s in zip(idx, signs):
                row[int(i)] = int(s)
        elif policy == "scheduled":
            h = gen.standard_normal(L)
            res = sorted_window_schedule(h, k, P)
            row = [0] * L
            for i, c in zip(res.user_indices, res.coeffs):
                row[i] = c
        else:  # dense
            row = [int(b) for b in gen.integers(0, 2, size=L)]
        tracker.add_row(row)
    return phases, not tracker.complete


def completion_times(L: int, k: int, policy: str, trials: int,
                     rng: np.random.SeedSequence | int | None = None,
                     P: float = 100.0, rank_field: str = "rational",
                     max_phases: int = MAX_PHASES,
                     threads: int = 1) -> tuple[list[int], int]:
    """Phase counts until the collected rows span full rank, per trial.

    Policies: ``unit`` decodes one uniformly chosen user per phase (k is
    forced to 1); ``random`` a uniform k-subset with random signs;
    ``scheduled`` runs the sorted-window scheduler on a fresh channel draw
    each phase (block fading — a static channel would freeze the schedule);
    ``dense`` draws uniform binary rows and requires the GF(2) field.
    Returns the per-trial counts and how many trials hit ``max_phases``
    without completing (their count is recorded at the cap).
    """
    if policy not in COMPLETION_POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if rank_field not in ("rational", "gf2"):
        raise ValueError(f"unknown rank field {rank_field!r}")
    if policy == "dense" and rank_field != "gf2":
        raise ValueError("dense policy is defined over GF(2) only")
    if policy == "unit":
        k = 1
    if not 1 <= k <= L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")
    root = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    tasks = [
        (ss, int(L), int(k), policy, float(P), rank_field, int(max_phases))
        for ss in root.spawn(trials)
    ]
    out = _pmap(_completion_trial, tasks, threads)
    counts = [c for c, _ in out]
    capped = sum(1 for _, flag in out if flag)
    return counts, capped


def run_completion_time(cfg: ExperimentConfig) -> Table:
    """Completion-time statistics across the population grid.

    ``k_rule="fixed"`` uses cfg.k everywhere; ``"log2"`` grows the subset
    size as ceil(log2 L) for the conjecture-exploration sweeps.  Every trial
    needs at least L phases (one new row per phase at best); trials that hit
    the phase cap are counted in ``capped_trials``.
    """
    table = Table("completion_time", [
        "L", "k", "policy", "field", "trials", "mean_phases", "std_phases",
        "stderr", "min_phases", "max_phases", "capped_trials",
    ])
    root = np.random.SeedSequence(cfg.seed)
    groups = root.spawn(len(cfg.L_grid))
    for child, L in zip(groups, cfg.L_grid):
        L = int(L)
        if cfg.policy == "unit":
            k = 1
        elif cfg.k_rule == "log2":
            k = max(1, math.ceil(math.log2(L)))
        else:
            k = cfg.k
        counts, capped = completion_times(
            L, k, cfg.policy, cfg.trials, child, P=cfg.P,
            rank_field=cfg.rank_field, threads=cfg.threads,
        )
        x = np.array(counts, dtype=float)
        table.append(L, k, cfg.policy, cfg.rank_field, cfg.trials,
                     float(x.mean()), float(np.std(x, ddof=1)) if x.size > 1 else 0.0,
                     _stderr(x), int(x.min()), int(x.max()), capped)
    return table
