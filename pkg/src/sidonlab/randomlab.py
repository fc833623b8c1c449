"""Monte Carlo harness for Sidon sets in random grid subsets.

Sampling is driven by the Philox counter-based generator keyed on
(seed, trial), so every trial is reproducible from those two numbers
alone, independent of execution order and thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .constructions import dense_sidon_in_grid
from .enumeration import MaxSidonResult, max_sidon_subset
from .grid import GridParams, Point, rank, sum_rank, unrank

EXACT_SIZE_LIMIT = 400
# Practical per-trial node budget for bounded exact search.  (A much larger
# budget is sound but makes sweeps of hundreds of trials take hours.)
DEFAULT_HYBRID_BUDGET = 20_000


class InsufficientDataError(ValueError):
    """Not enough records to fit an exponent."""


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(trial)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_grid_ranks(g: GridParams, p: float, seed: int, trial: int = 0) -> np.ndarray:
    """Ranks of a p-random subset of the grid; reproducible from (seed, trial)."""
    if not (0 < p <= 1):
        raise ValueError(f"p must be in (0, 1], got {p}")
    rng = _trial_rng(seed, trial)
    keep = rng.random(g.size) < p
    return np.flatnonzero(keep)


def sample_grid(g: GridParams, p: float, seed: int, trial: int = 0) -> set[Point]:
    """Same sample as sample_grid_ranks, as a set of points."""
    return {unrank(int(r), g) for r in sample_grid_ranks(g, p, seed, trial)}


# ---------------------------------------------------------------------------
# Estimating F on a sample


def greedy_sidon_subset(
    ranks: Sequence[int], g: GridParams, rng: Optional[np.random.Generator] = None
) -> list[int]:
    """One random-order greedy pass keeping Sidon feasibility; returns ranks."""
    order = list(ranks)
    if rng is not None:
        order = [order[i] for i in rng.permutation(len(order))]
    chosen_pts: list[Point] = []
    chosen: list[int] = []
    sums: set[int] = set()
    for r in order:
        p = unrank(int(r), g)
        new = [sum_rank(p, q, g) for q in chosen_pts]
        new.append(sum_rank(p, p, g))
        if any(sr in sums for sr in new):
            continue
        sums.update(new)
        chosen_pts.append(p)
        chosen.append(int(r))
    return chosen


@lru_cache(maxsize=64)
def _dense_ranks(g: GridParams) -> frozenset:
    return frozenset(rank(p, g) for p in dense_sidon_in_grid(g))


@dataclass
class EstimateResult:
    F_lower: int
    F_exact: Optional[int]
    status: str  # "optimal" or "budget-exhausted"
    witness: tuple[int, ...]  # ranks
    nodes: int


def estimate_F(
    R: Iterable[int],
    g: GridParams,
    budget: int = 0,
    mode: str = "hybrid",
    seed: int = 0,
) -> EstimateResult:
    """Best Sidon subset of R found under the requested mode.

    exact  : branch and bound (budget 0 = unlimited).
    greedy : one random-order pass, no search.
    hybrid : greedy + dense-construction incumbents, then bounded search.
    """
    ranks = sorted(int(r) for r in R)
    rset = set(ranks)
    if mode not in ("exact", "hybrid", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")

    greedy = greedy_sidon_subset(ranks, g, _trial_rng(seed, 0xF00D))
    construction = sorted(_dense_ranks(g) & rset)
    incumbent_ranks = greedy if len(greedy) >= len(construction) else construction
    if mode == "greedy":
        if len(greedy) == len(ranks):  # R itself is Sidon, provably optimal
            return EstimateResult(len(greedy), len(greedy), "optimal", tuple(greedy), 0)
        return EstimateResult(len(greedy), None, "budget-exhausted", tuple(greedy), 0)

    if mode == "hybrid" and budget == 0:
        budget = DEFAULT_HYBRID_BUDGET
    points = [unrank(r, g) for r in ranks]
    incumbent = [unrank(r, g) for r in incumbent_ranks]
    res: MaxSidonResult = max_sidon_subset(points, g, budget=budget, incumbent=incumbent)
    witness = tuple(rank(p, g) for p in res.witness)
    if res.optimal:
        return EstimateResult(res.size, res.size, "optimal", witness, res.nodes_explored)
    return EstimateResult(res.size, None, "budget-exhausted", witness, res.nodes_explored)


# ---------------------------------------------------------------------------
# Sweeps and records


@dataclass
class ExperimentRecord:
    n: int
    d: int
    p: float
    a: Optional[float]
    seed: int
    trial: int
    sample_size: int
    F_lower: int
    F_exact: Optional[int]
    status: str
    elapsed_s: float


def run_trial(
    g: GridParams,
    p: float,
    seed: int,
    trial: int,
    mode: str = "hybrid",
    budget: int = 0,
    a: Optional[float] = None,
) -> ExperimentRecord:
    t0 = time.perf_counter()
    ranks = sample_grid_ranks(g, p, seed, trial)
    trial_mode = mode
    if mode != "greedy" and len(ranks) > EXACT_SIZE_LIMIT:
        trial_mode = "hybrid"
    est = estimate_F(ranks, g, budget=budget, mode=trial_mode, seed=seed ^ trial)
    return ExperimentRecord(
        g.n,
        g.d,
        p,
        a,
        seed,
        trial,
        len(ranks),
        est.F_lower,
        est.F_exact,
        est.status,
        time.perf_counter() - t0,
    )


def _sweep_task(args) -> ExperimentRecord:
    n, d, a, seed, trial, mode, budget = args
    g = GridParams(n, d)
    return run_trial(g, float(n) ** a, seed, trial, mode=mode, budget=budget, a=a)


def run_sweep(
    a: float,
    n_list: Sequence[int],
    d: int,
    trials: int,
    mode: str = "hybrid",
    seed: int = 0,
    budget: int = 0,
    threads: int = 1,
    on_record=None,
) -> list[ExperimentRecord]:
    """For each n: p = n^a, `trials` independent samples, estimate_F each.

    Records come back in (n, trial) order regardless of thread count;
    on_record (if given) is called with each record in that order so
    callers can append to disk incrementally.
    """
    if not (-d < a <= 0):
        raise ValueError(f"need -d < a <= 0, got a={a}, d={d}")
    tasks = [(n, d, a, seed, t, mode, budget) for n in n_list for t in range(trials)]
    records: list[ExperimentRecord] = []
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for rec in pool.map(_sweep_task, tasks, chunksize=1):
                records.append(rec)
                if on_record:
                    on_record(rec)
    else:
        for task in tasks:
            rec = _sweep_task(task)
            records.append(rec)
            if on_record:
                on_record(rec)
    return records


# ---------------------------------------------------------------------------
# Exponent fits


def predicted_b(a: float, d: int) -> float:
    """Piecewise exponent: F of a p = n^a random sample grows like n^b."""
    if not (-d < a <= 0):
        raise ValueError(f"need -d < a <= 0, got a={a}")
    if a <= -2 * d / 3:
        return a + d
    if a <= -d / 3:
        return d / 3
    return (a + d) / 2


@dataclass
class ExponentFit:
    a: float
    n_values: list[int]
    b_hat: float
    stderr: float
    b_predicted: float
    gap: float
    mean_logF: dict  # n -> mean of log F over trials with F >= 1
    dropped_zero_trials: int


def fit_exponent(records: Sequence[ExperimentRecord], d: Optional[int] = None) -> ExponentFit:
    """Least-squares slope of mean log F against log n (mean-of-logs)."""
    if not records:
        raise InsufficientDataError("no records")
    a_values = {r.a for r in records}
    if len(a_values) != 1 or None in a_values:
        raise InsufficientDataError(f"records must share one exponent a, got {a_values}")
    a = records[0].a
    if d is None:
        d = records[0].d
    by_n: dict[int, list[float]] = {}
    dropped = 0
    for r in records:
        f = r.F_exact if r.F_exact is not None else r.F_lower
        if f < 1:
            dropped += 1
            continue
        by_n.setdefault(r.n, []).append(math.log(f))
    if len(by_n) < 4:
        raise InsufficientDataError(f"need >= 4 distinct n, got {sorted(by_n)}")
    for n, logs in by_n.items():
        if len(logs) < 8:
            raise InsufficientDataError(f"need >= 8 usable trials at n={n}, got {len(logs)}")
    ns = sorted(by_n)
    xs = np.log(np.array(ns, dtype=float))
    ys = np.array([float(np.mean(by_n[n])) for n in ns])
    (slope, intercept), cov = np.polyfit(xs, ys, 1, cov=True)
    stderr = float(np.sqrt(cov[0, 0]))
    b_pred = predicted_b(a, d)
    return ExponentFit(
        a,
        ns,
        float(slope),
        stderr,
        b_pred,
        abs(float(slope) - b_pred),
        {n: float(np.mean(by_n[n])) for n in ns},
        dropped,
    )


# ---------------------------------------------------------------------------
# Chernoff concentration check


@dataclass
class ChernoffReport:
    n: int
    d: int
    p: float
    lam: float
    trials: int
    expectation: float
    violations: int
    empirical_rate: float
    ceiling: float
    stderr: float
    passed: bool


def chernoff_check(g: GridParams, p: float, lam: float, trials: int, seed: int) -> ChernoffReport:
    """Empirical frequency of | |R| - n^d p | >= lam * n^d p versus the
    ceiling 2 exp(-lam^2 E/3); passes within 3 binomial standard errors."""
    if not (0 < lam < 1):
        raise ValueError(f"need 0 < lam < 1, got {lam}")
    ex = g.size * p
    violations = 0
    for t in range(trials):
        size = int(np.count_nonzero(_trial_rng(seed, t).random(g.size) < p))
        if abs(size - ex) >= lam * ex:
            violations += 1
    rate = violations / trials
    ceiling = min(1.0, 2.0 * math.exp(-lam * lam * ex / 3.0))
    stderr = math.sqrt(max(ceiling * (1 - ceiling), 1e-12) / trials)
    return ChernoffReport(
        g.n, g.d, p, lam, trials, ex, violations, rate, ceiling, stderr,
        rate <= ceiling + 3 * stderr,
    )


# ---------------------------------------------------------------------------
# Regime report


@dataclass
class RegimeEnvelope:
    theorem: str
    lower_expr: float
    upper_expr: float
    c_hat_lower: Optional[float]
    c_hat_upper: Optional[float]


@dataclass
class RegimeReport:
    n: int
    d: int
    p: float
    eps: float
    regimes: list
    mean_F: Optional[float]


def regime_bounds_report(
    n: int,
    d: int,
    p: float,
    records: Optional[Sequence[ExperimentRecord]] = None,
    eps: Optional[float] = None,
) -> RegimeReport:
    """Identify which theorem range p falls in and evaluate its envelopes.

    On a regime boundary, every matching regime is reported.  With
    records supplied, measured ratios c_hat = mean F / expression are
    attached to each envelope.
    """
    if eps is None:
        eps = d / 9
    ln = math.log(n)
    mean_f = None
    if records:
        vals = [r.F_exact if r.F_exact is not None else r.F_lower for r in records]
        mean_f = float(np.mean(vals))

    def envelope(name: str, lo: float, hi: float) -> RegimeEnvelope:
        cl = mean_f / lo if (mean_f is not None and lo > 0) else None
        cu = mean_f / hi if (mean_f is not None and hi > 0) else None
        return RegimeEnvelope(name, lo, hi, cl, cu)

    regimes = []
    if n ** (-d) < p <= 2 * n ** (-2 * d / 3):
        ndp = n**d * p
        regimes.append(envelope("sparse (linear in |R|)", ndp / 3, ndp))
    if 2 * n ** (-2 * d / 3) <= p <= n ** (-d / 3 - eps):
        expr = n ** (d / 3) * math.log(n ** (2 * d) * p**3) ** (1 / 3)
        regimes.append(envelope("middle (cube-root log)", expr, expr))
    if n ** (-d / 3 - eps) <= p <= n ** (-d / 3) * ln ** (8 / 3):
        lo = n ** (d / 3) * ln ** (1 / 3)
        hi = n ** (d / 3) * ln ** (4 / 3)
        regimes.append(envelope("upper-middle (log-power gap)", lo, hi))
    if n ** (-d / 3) * ln ** (8 / 3) <= p <= 1:
        expr = n ** (d / 2) * p**0.5
        regimes.append(envelope("dense (sqrt(n^d p))", expr, expr))
    if not regimes:
        raise ValueError(f"p={p} below the n^-d floor for n={n}, d={d}")
    return RegimeReport(n, d, p, eps, regimes, mean_f)


# ---------------------------------------------------------------------------
# Transfer inequality via the digit bijection


@dataclass
class TransferReport:
    n: int
    d: int
    p: float
    trials: int
    failures: int
    pairs: list  # (trial, |R|, F_interval, F_grid)


def transfer_check(n: int, d: int, p: float, trials: int, seed: int) -> TransferReport:
    """Coupled samples: one Bernoulli draw per integer a < n^d shared by the
    interval [n^d] and (via the digit bijection) the grid [n]^d.  The grid
    maximum must dominate the interval maximum on every pair."""
    g_grid = GridParams(n, d)
    g_interval = GridParams(g_grid.size, 1)
    failures = 0
    pairs = []
    for t in range(trials):
        ranks = sample_grid_ranks(g_interval, p, seed, t)
        pts_interval = [unrank(int(r), g_interval) for r in ranks]
        pts_grid = [unrank(int(r), g_grid) for r in ranks]  # phi_d preserves rank
        # a greedy interval incumbent is Sidon in both encodings (the digit
        # bijection preserves the property), and it prunes both exact searches
        inc = greedy_sidon_subset([int(r) for r in ranks], g_interval)
        f1 = max_sidon_subset(
            pts_interval, g_interval, incumbent=[unrank(r, g_interval) for r in inc]
        ).size
        f2 = max_sidon_subset(
            pts_grid, g_grid, incumbent=[unrank(r, g_grid) for r in inc]
        ).size
        if f2 < f1:
            failures += 1
        pairs.append((t, len(ranks), f1, f2))
    return TransferReport(n, d, p, trials, failures, pairs)
