"""Threshold equilibria and optimal design when every agent shares one cost c.

With i.i.d. qualities and common participation cost c, the unique symmetric
equilibrium is a quality threshold theta: an agent enters iff q >= theta,
where theta solves c(1 - F(theta)) = c for the contest's expected-prize curve
(ties broken toward participation). Designing for maximal participation
reduces, through the rank-gap transform, to a linear program over the weights
whose optimum is one-hot: some simple contest M^j is always optimal. The
argmax over j of

    y_j(p) = (1/j) * sum_{k=1}^j C(n-1, k-1) p^(k-1) (1-p)^(n-k)

is found by a running-average recurrence, y_{j+1} - y_j = (x_{j+1} - y_j)/(j+1),
stopping at the first j with x_{j+1} <= y_j; unimodality of the binomial pmf
makes that first stop the global argmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .contest import PrizeVector, expected_prize, make_simple_contest
from .distributions import QualityDistribution, quantile
from .errors import InvalidCost, OutOfRange, PopulationTooLarge
from .numerics import bisect_decreasing

__all__ = [
    "ThresholdEquilibrium",
    "DesignResult",
    "BruteForceReport",
    "participation_rate",
    "equilibrium_threshold",
    "optimal_prize_count",
    "c_star",
    "feasible",
    "optimal_contest",
    "brute_force_design_check",
]

FULL_PARTICIPATION = "full_participation"
ZERO_PARTICIPATION = "zero_participation"

_TIE_TOL = 1e-12
_BISECT_STEPS = 60  # fixed-count vectorised bisection: 2^-60 < float resolution


@dataclass(frozen=True)
class ThresholdEquilibrium:
    """Symmetric equilibrium: enter iff quality >= theta."""

    theta: float
    p: float
    lam: float
    saturated: str | None = None


@dataclass(frozen=True)
class DesignResult:
    j_star: int
    contest: PrizeVector
    equilibrium: ThresholdEquilibrium
    c_star_at_p: float


@dataclass(frozen=True)
class BruteForceReport:
    best_grid_p: float
    best_grid_values: tuple[float, ...]
    best_simple_p: float
    best_simple_j: int
    gap: float


def participation_rate(contest: PrizeVector, c: float) -> tuple[float, str | None]:
    """Equilibrium participation probability p solving c(p) = c.

    Returns (p, flag): flag is ``zero_participation`` when c exceeds the top
    prize, ``full_participation`` when c is below the last prize, else None
    with residual |c(p) - c| <= 1e-10 * max(V, c).
    """
    if c <= 0.0:
        raise InvalidCost(f"participation cost must be positive, got {c!r}")
    v_top = contest.values[0]
    v_bottom = contest.values[-1]
    if c > v_top:
        return 0.0, ZERO_PARTICIPATION
    if c < v_bottom:
        return 1.0, FULL_PARTICIPATION
    tol = 1e-10 * max(contest.budget, c)
    result = bisect_decreasing(lambda p: expected_prize(contest, p), c, 0.0, 1.0, tol)
    return result.root, None


def equilibrium_threshold(
    contest: PrizeVector, qd: QualityDistribution, c: float
) -> ThresholdEquilibrium:
    """Threshold form of the equilibrium: theta = F^{-1}(1 - p), lambda = n*p."""
    p, flag = participation_rate(contest, c)
    theta = quantile(qd, 1.0 - p)
    return ThresholdEquilibrium(theta=theta, p=p, lam=contest.n * p, saturated=flag)


def _pmf_terms(n: int, p: float, start: int, stop: int) -> np.ndarray:
    """x_k = C(n-1, k-1) p^(k-1) (1-p)^(n-k) for k in [start, stop)."""
    return stats.binom.pmf(np.arange(start - 1, stop - 1), n - 1, p)


def optimal_prize_count(n: int, p: float) -> int:
    """argmax_j y_j(p), ties (within 1e-12) to the smallest j.

    Runs the running-average recurrence with early stop; pmf terms come in
    blocks so the usual case touches only O(j*) terms.
    """
    if not 0.0 < p < 1.0:
        raise OutOfRange(f"p must lie strictly in (0, 1), got {p!r}")
    if n < 2:
        return 1
    y = 0.0
    k = 0
    block = 512
    while k < n:
        stop = min(n, k + block)
        xs = _pmf_terms(n, p, k + 1, stop + 1)
        for x in xs:
            k += 1
            if k == 1:
                y = float(x)
                continue
            # x is x_k, the candidate (j+1)-th term with j = k-1; the tie
            # tolerance is relative, and y == 0 means the left tail has
            # underflowed, not that the average has peaked
            if y > 0.0 and x <= y * (1.0 + _TIE_TOL):
                return k - 1
            y += (float(x) - y) / k
    return n


def c_star(n: int, budget: float, p: float) -> float:
    """Largest cost supportable at participation rate p (the design frontier)."""
    j = optimal_prize_count(n, p)
    return (budget / j) * float(stats.binom.cdf(j - 1, n - 1, p))


def feasible(n: int, budget: float, c: float, p: float) -> bool:
    """Whether some contest with budget V sustains participation rate p at cost c."""
    return c <= c_star(n, budget, p)


def _simple_rates(n: int, budget: float, c: float, js: np.ndarray) -> np.ndarray:
    """Vectorised equilibrium participation of the simple contests M^j at cost c.

    Same bisection as participation_rate, run simultaneously across j with a
    fixed iteration count; used by the design scan where j ranges to V/c.
    The binomial cdf goes through the regularised incomplete beta directly
    (Pr[B(n-1, p) <= j-1] = I_{1-p}(n-j, j)), skipping the stats-layer
    overhead that would otherwise dominate this loop; j = n has cdf 1.
    """
    lo = np.zeros(js.shape)
    hi = np.ones(js.shape)
    scale = budget / js
    a = np.maximum(n - js, 1)
    interior = js < n
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        cdf = np.where(interior, special.betainc(a, js, 1.0 - mid), 1.0)
        above = scale * cdf > c
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def optimal_contest(
    n: int, budget: float, c: float, qd: QualityDistribution
) -> DesignResult:
    """Participation-maximizing contest: always a simple contest M^{j*}.

    Regimes: c <= V/n gives full participation with the equal split
    (j* = n); c >= V gives zero participation with winner-take-all (j* = 1);
    otherwise j* maximizes the per-j equilibrium participation over
    j = 1..min(n, floor(V/c)), smallest j on ties within 1e-12.
    """
    if c <= 0.0:
        raise InvalidCost(f"participation cost must be positive, got {c!r}")
    V = float(budget)
    if c <= V / n:
        contest = make_simple_contest(n, V, n)
        eq = ThresholdEquilibrium(
            theta=quantile(qd, 0.0), p=1.0, lam=float(n), saturated=FULL_PARTICIPATION
        )
        return DesignResult(n, contest, eq, c_star_at_p=V / n)
    if c >= V:
        contest = make_simple_contest(1, V, n)
        eq = ThresholdEquilibrium(
            theta=quantile(qd, 1.0), p=0.0, lam=0.0, saturated=ZERO_PARTICIPATION
        )
        return DesignResult(1, contest, eq, c_star_at_p=V)

    j_max = min(n, int(math.floor(V / c + 1e-12)))
    js = np.arange(1, j_max + 1)
    rates = _simple_rates(n, V, c, js)
    best = float(rates.max())
    j_star = int(js[rates >= best - _TIE_TOL][0])
    contest = make_simple_contest(j_star, V, n)
    # the scan already solved the winner's equilibrium; the fixed-count
    # bisection leaves p strictly inside (0, 1), so no saturation flag
    p = float(rates[j_star - 1])
    eq = ThresholdEquilibrium(
        theta=quantile(qd, 1.0 - p), p=p, lam=n * p, saturated=None
    )
    cs = c_star(n, V, p)
    return DesignResult(j_star, contest, eq, c_star_at_p=cs)


def _partitions(total: int, parts: int, cap: int):
    """Non-increasing integer compositions of ``total`` into ``parts`` slots."""
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for head in range(min(cap, total), -1, -1):
        rest = total - head
        if rest > head * (parts - 1):
            continue
        for tail in _partitions(rest, parts - 1, head):
            yield (head,) + tail


def brute_force_design_check(
    n: int, budget: float, c: float, grid_step: float
) -> BruteForceReport:
    """Exhaustive check that no grid contest beats the best simple contest.

    Enumerates every monotone nonnegative schedule with Sum v = V on the
    simplex grid of resolution ``grid_step`` and compares equilibrium
    participation against the best simple contest. The gap should never
    exceed solver slack; this is the desk-scale oracle for the one-hot
    optimality of the design LP.
    """
    if n > 6:
        raise PopulationTooLarge(f"exhaustive grid limited to n <= 6, got {n}")
    if grid_step <= 0.0 or grid_step > 1.0:
        raise OutOfRange(f"grid_step must lie in (0, 1], got {grid_step!r}")
    K = round(1.0 / grid_step)
    best_grid_p = -1.0
    best_grid_values: tuple[float, ...] = ()
    for partition in _partitions(K, n, K):
        values = tuple(budget * k / K for k in partition)
        contest = PrizeVector(values, budget)
        p, _ = participation_rate(contest, c)
        if p > best_grid_p:
            best_grid_p = p
            best_grid_values = values
    best_simple_p = -1.0
    best_simple_j = 1
    for j in range(1, n + 1):
        p, _ = participation_rate(make_simple_contest(j, budget, n), c)
        if p > best_simple_p + _TIE_TOL:
            best_simple_p = p
            best_simple_j = j
    return BruteForceReport(
        best_grid_p=best_grid_p,
        best_grid_values=best_grid_values,
        best_simple_p=best_simple_p,
        best_simple_j=best_simple_j,
        gap=best_grid_p - best_simple_p,
    )
