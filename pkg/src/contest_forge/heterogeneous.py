"""Equilibria and experiments for jointly distributed (quality, cost) types.

With heterogeneous costs the equilibrium is no longer a quality threshold,
but on a finite weighted support it is still pinned down by best-response
structure: an agent participates iff her cost is at most the expected prize
at her beat probability (ties toward participation). Because stronger
competition weakly lowers everyone's expected prize, the best-response map is
antitone, and iterating it twice from the empty and full profiles yields a
monotone bracket [A_k, B_k] that collapses onto the equilibrium in finitely
many rounds. When the bracket does not collapse, both endpoints are reported
and downstream estimates use the upper (participation-favoring) profile,
flagged in the output.

Participation profiles here are masks over the support of an
:class:`~contest_forge.distributions.EmpiricalTypes`; the distinct-q
invariant of that class is what makes strict rank comparisons safe.

Monte Carlo objective estimates are bitwise reproducible for a fixed
(seed, replicas, n): replicas are drawn and aggregated in index order from a
single deterministic stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contest import (
    PrizeVector,
    expected_prize,
    expected_prize_curve,
    lottery_decomposition,
    make_simple_contest,
)
from .distributions import (
    EmpiricalTypes,
    RectComponent,
    RectMixture,
    discretize,
    low_cost_max_cdf,
    median_max_quality,
    sample_joint,
)
from .errors import (
    BudgetTooSmall,
    IndexOutOfRange,
    IterationLimit,
    NotSubEquilibrium,
    ProfileNotSubEquilibrium,
    ValidationError,
)

__all__ = [
    "ParticipationProfile",
    "EquilibriumBracket",
    "ObjectiveEstimate",
    "MedianRule",
    "beat_probability",
    "expected_payoff",
    "best_response",
    "equilibrium",
    "is_sub_equilibrium",
    "output_cdf",
    "fosd_check",
    "rule_from_profile",
    "mc_objective",
    "median_subequilibrium",
    "highcost_subequilibrium",
    "wta_approx_experiment",
    "example_obj",
]

_IR_TOL = 1e-12
_FOSD_TOL = 1e-12

# one-sided 99% normal quantile, used for confidence margins in experiments
Z_99 = 2.3263478740408408


@dataclass(frozen=True, eq=False)
class ParticipationProfile:
    """Boolean participation mask aligned with an EmpiricalTypes support."""

    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))
        if self.mask.ndim != 1:
            raise ValidationError("profile mask must be one-dimensional")

    @classmethod
    def empty(cls, size: int) -> "ParticipationProfile":
        return cls(np.zeros(size, dtype=bool))

    @classmethod
    def full(cls, size: int) -> "ParticipationProfile":
        return cls(np.ones(size, dtype=bool))

    @property
    def size(self) -> int:
        return int(self.mask.size)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def same(self, other: "ParticipationProfile") -> bool:
        return bool(np.array_equal(self.mask, other.mask))

    def subset_of(self, other: "ParticipationProfile") -> bool:
        return bool(np.all(~self.mask | other.mask))

    def __eq__(self, other) -> bool:  # type: ignore[override]
        return isinstance(other, ParticipationProfile) and self.same(other)

    def __hash__(self):
        return hash(self.mask.tobytes())


@dataclass(frozen=True)
class EquilibriumBracket:
    lower: ParticipationProfile
    upper: ParticipationProfile
    converged: bool
    iterations: int

    @property
    def profile(self) -> ParticipationProfile:
        """The profile downstream code should use: upper endpoint (flagged when open)."""
        return self.upper


@dataclass(frozen=True)
class ObjectiveEstimate:
    mean: float
    std_error: float
    replicas: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "replicas": self.replicas,
            "seed": self.seed,
        }


def _population(contest: PrizeVector, types: EmpiricalTypes) -> int:
    if types.n is not None and types.n != contest.n:
        raise ValidationError(
            f"types expect population {types.n}, contest has {contest.n} ranks"
        )
    return contest.n


def _check_profile(types: EmpiricalTypes, profile: ParticipationProfile) -> None:
    if profile.size != types.support_size:
        raise ValidationError(
            f"profile size {profile.size} != support size {types.support_size}"
        )


def beat_probability(
    types: EmpiricalTypes, profile: ParticipationProfile, i: int
) -> float:
    """Probability that one opponent draw participates and outranks point i."""
    _check_profile(types, profile)
    if not 0 <= i < types.support_size:
        raise IndexOutOfRange(f"support index {i} outside 0..{types.support_size - 1}")
    above = profile.mask & (types.q > types.q[i])
    return float(np.sum(types.w[above]))


def expected_payoff(
    contest: PrizeVector,
    types: EmpiricalTypes,
    profile: ParticipationProfile,
    i: int,
) -> float:
    """Participation payoff of point i against the given opponent profile."""
    _population(contest, types)
    p = beat_probability(types, profile, i)
    return expected_prize(contest, p) - float(types.c[i])


def _beat_probabilities(
    types: EmpiricalTypes, profile: ParticipationProfile
) -> np.ndarray:
    """Vectorised beat_probability over the whole support."""
    order = np.argsort(-types.q, kind="stable")
    masked_w = np.where(profile.mask[order], types.w[order], 0.0)
    above = np.concatenate(([0.0], np.cumsum(masked_w)[:-1]))
    out = np.empty(types.support_size)
    out[order] = above
    return out


def best_response(
    contest: PrizeVector, types: EmpiricalTypes, profile: ParticipationProfile
) -> ParticipationProfile:
    """Pointwise best reply: participate iff cost <= expected prize (tie enters).

    Antitone: enlarging the opponent profile can only shrink the response.
    """
    _population(contest, types)
    _check_profile(types, profile)
    ps = _beat_probabilities(types, profile)
    prizes = expected_prize_curve(contest, ps)
    return ParticipationProfile(types.c <= prizes)


def equilibrium(contest: PrizeVector, types: EmpiricalTypes) -> EquilibriumBracket:
    """Bracket the equilibrium by double best-response iteration.

    A_{k+1} = BR(B_k) grows from the empty profile, B_{k+1} = BR(A_k)
    shrinks from the full profile, and every best-response fixed point stays
    between them. Returns once both sequences stabilize; ``converged`` means
    the bracket collapsed to the (then unique) equilibrium.
    """
    size = types.support_size
    lower = ParticipationProfile.empty(size)
    upper = ParticipationProfile.full(size)
    limit = 10 * size
    for iteration in range(1, limit + 1):
        new_lower = best_response(contest, types, upper)
        new_upper = best_response(contest, types, lower)
        if new_lower.same(lower) and new_upper.same(upper):
            return EquilibriumBracket(
                lower=lower,
                upper=upper,
                converged=lower.same(upper),
                iterations=iteration,
            )
        lower, upper = new_lower, new_upper
    raise IterationLimit(
        f"equilibrium bracketing did not stabilize in {limit} rounds"
    )


def is_sub_equilibrium(
    contest: PrizeVector, types: EmpiricalTypes, profile: ParticipationProfile
) -> bool:
    """Interim rationality of every participant (non-participants unconstrained)."""
    _population(contest, types)
    _check_profile(types, profile)
    if profile.count == 0:
        return True
    ps = _beat_probabilities(types, profile)
    prizes = expected_prize_curve(contest, ps)
    payoff = prizes - types.c
    return bool(np.all(payoff[profile.mask] >= -_IR_TOL * contest.budget))


def output_cdf(
    types: EmpiricalTypes, profile: ParticipationProfile, x: float
) -> float:
    """CDF at x of one draw's output q * participate (non-participants produce 0)."""
    _check_profile(types, profile)
    if x < 0.0:
        raise ValidationError(f"need x >= 0, got {x!r}")
    counted = ~profile.mask | (types.q <= x)
    return float(np.sum(types.w[counted]))


def fosd_check(
    types: EmpiricalTypes,
    eq_profile: ParticipationProfile,
    sub_profile: ParticipationProfile,
    contest: PrizeVector,
) -> bool:
    """Does equilibrium output first-order dominate the sub-equilibrium's?

    Verifies the premises first: ``sub_profile`` must pass is_sub_equilibrium
    and ``eq_profile`` must be a best-response fixed point for the same
    contest (:class:`ProfileNotSubEquilibrium` otherwise). Then checks
    output_cdf(eq, x) <= output_cdf(sub, x) + 1e-12 at 0 and at every
    support quality.
    """
    if not is_sub_equilibrium(contest, types, sub_profile):
        raise ProfileNotSubEquilibrium("sub profile violates interim rationality")
    if not best_response(contest, types, eq_profile).same(eq_profile):
        raise ProfileNotSubEquilibrium("eq profile is not a best-response fixed point")
    xs = np.concatenate(([0.0], np.sort(types.q)))
    eq_out = np.where(eq_profile.mask, types.q, 0.0)
    sub_out = np.where(sub_profile.mask, types.q, 0.0)
    cdf_eq = (eq_out[None, :] <= xs[:, None]) @ types.w
    cdf_sub = (sub_out[None, :] <= xs[:, None]) @ types.w
    return bool(np.all(cdf_eq <= cdf_sub + _FOSD_TOL))


def rule_from_profile(types: EmpiricalTypes, profile: ParticipationProfile):
    """Participation predicate over (q, c) arrays for draws from this support.

    Points are identified by their (distinct) quality; draws must be support
    atoms, which is what sampling from EmpiricalTypes produces.
    """
    _check_profile(types, profile)
    order = np.argsort(types.q, kind="stable")
    sorted_q = types.q[order]
    sorted_mask = profile.mask[order]

    def rule(qs, cs):
        pos = np.searchsorted(sorted_q, np.asarray(qs, dtype=float))
        pos = np.clip(pos, 0, sorted_q.size - 1)
        return sorted_mask[pos]

    return rule


def _draw_types(jd, rng: np.random.Generator, count: int):
    if isinstance(jd, EmpiricalTypes):
        idx = rng.choice(jd.support_size, size=count, p=jd.w)
        return jd.q[idx], jd.c[idx]
    if isinstance(jd, RectMixture):
        return sample_joint(jd, rng, size=count)
    raise ValidationError(f"cannot sample from {type(jd).__name__}")


def mc_objective(
    jd,
    rule,
    n: int,
    objective,
    replicas: int,
    seed,
) -> ObjectiveEstimate:
    """Monte Carlo estimate of an output objective under a participation rule.

    ``jd`` is a RectMixture or EmpiricalTypes; ``rule`` maps (q, c) arrays to
    a participation mask; ``objective`` is "max", "sum", or ("top_k", k).
    Non-participants produce 0, and empty participant sets score 0.
    """
    if replicas < 2:
        raise ValidationError(f"need at least 2 replicas, got {replicas!r}")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n!r}")
    rng = np.random.default_rng(seed)
    qs, cs = _draw_types(jd, rng, replicas * n)
    participate = np.asarray(rule(qs, cs), dtype=bool)
    outputs = np.where(participate, qs, 0.0).reshape(replicas, n)

    if objective == "max":
        per_replica = outputs.max(axis=1)
    elif objective == "sum":
        per_replica = outputs.sum(axis=1)
    elif isinstance(objective, tuple) and len(objective) == 2 and objective[0] == "top_k":
        k = int(objective[1])
        if not 1 <= k <= n:
            raise ValidationError(f"top_k needs 1 <= k <= n, got {k}")
        per_replica = np.partition(outputs, n - k, axis=1)[:, n - k :].sum(axis=1)
    else:
        raise ValidationError(f"unknown objective {objective!r}")

    mean = float(per_replica.mean())
    std_error = float(per_replica.std(ddof=1) / math.sqrt(replicas))
    seed_int = int(seed) if np.ndim(seed) == 0 else int(np.asarray(seed).flat[0])
    return ObjectiveEstimate(
        mean=mean, std_error=std_error, replicas=int(replicas), seed=seed_int
    )


@dataclass(frozen=True)
class MedianRule:
    """Enter iff q >= mu and c <= cost_cap; a winner-take-all sub-equilibrium.

    ``win_floor`` is the certified lower bound on a participant's win
    probability (at least 1/2 by the median construction).
    """

    mu: float
    cost_cap: float
    win_floor: float

    def __call__(self, qs, cs):
        qs = np.asarray(qs, dtype=float)
        cs = np.asarray(cs, dtype=float)
        return (qs >= self.mu) & (cs <= self.cost_cap)


def median_subequilibrium(jd: RectMixture, budget: float, n: int) -> MedianRule:
    """The median construction: threshold at the median of the best low-cost rival.

    mu is the median of max{q : c <= V/2} over n-1 draws; an entrant with
    q >= mu wins with probability at least 1/2, so the expected prize is at
    least V/2 >= her cost and the rule is interim-rational under
    winner-take-all.
    """
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    cap = budget / 2.0
    mu = median_max_quality(jd, cap, n - 1)
    win_floor = low_cost_max_cdf(jd, cap, n - 1, mu)
    if win_floor < 0.5 - 1e-9:
        raise NotSubEquilibrium(
            f"median construction certifies win probability {win_floor} < 1/2"
        )
    return MedianRule(mu=mu, cost_cap=cap, win_floor=win_floor)


def highcost_subequilibrium(
    contest: PrizeVector, types: EmpiricalTypes, budget: float
) -> ParticipationProfile:
    """Expensive participants of any budget-exhausting equilibrium, as a WTA profile.

    Takes the equilibrium of ``contest``, keeps participants with c > V/2,
    and verifies directly that the kept set is interim-rational under
    winner-take-all (the lottery decomposition argument says it must be:
    ranks below the top pay at most V/2 < c, so the top-rank term carries
    the rationality). A failure raises :class:`NotSubEquilibrium` loudly.
    """
    lottery_decomposition(contest)  # validates budget exhaustion
    n = _population(contest, types)
    bracket = equilibrium(contest, types)
    base = bracket.profile.mask
    kept = ParticipationProfile(base & (types.c > budget / 2.0))
    if kept.count > 0:
        wta = make_simple_contest(1, budget, n)
        ps = _beat_probabilities(types, kept)
        prizes = expected_prize_curve(wta, ps)
        payoff = prizes - types.c
        worst = float(payoff[kept.mask].min())
        if worst < -1e-9 * budget:
            raise NotSubEquilibrium(
                f"high-cost profile breaks winner-take-all rationality by {worst}"
            )
    return kept


def _mc_seed(seed: int, tag: int) -> int:
    # deterministic stream per (experiment seed, estimate index)
    return (int(seed) * 1000003 + tag) % (2**63)


def wta_approx_experiment(
    jd: RectMixture,
    n: int,
    budget: float,
    discretization: int,
    replicas: int,
    seed,
) -> dict:
    """Estimate how far winner-take-all falls below the best simple contest.

    Discretizes the joint law, computes the WTA equilibrium and its expected
    maximum output W, then the same for every simple contest with at most
    V / min-cost prizes; the best of those, B, is a certified lower bound on
    the optimum. Reports the ratio B / W and the check 3W >= B with a
    one-sided 99% confidence margin.
    """
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    seed = int(seed)
    if isinstance(jd, EmpiricalTypes):
        types = jd if jd.n == n else jd.with_n(n)
    else:
        types = discretize(jd, discretization, seed, n=n)
    min_cost = float(types.c.min())
    if min_cost > 0.0:
        j_cap = min(n, int(math.floor(budget / min_cost + 1e-12)))
    else:
        j_cap = n
    j_cap = max(1, j_cap)

    wta = make_simple_contest(1, budget, n)
    wta_bracket = equilibrium(wta, types)
    w_est = mc_objective(
        types,
        rule_from_profile(types, wta_bracket.profile),
        n,
        "max",
        replicas,
        _mc_seed(seed, 0),
    )

    contests = []
    all_collapsed = wta_bracket.converged
    best_mean = -math.inf
    best_j = 1
    best_se = 0.0
    for j in range(1, j_cap + 1):
        contest = make_simple_contest(j, budget, n)
        bracket = equilibrium(contest, types)
        all_collapsed = all_collapsed and bracket.converged
        est = mc_objective(
            types,
            rule_from_profile(types, bracket.profile),
            n,
            "max",
            replicas,
            _mc_seed(seed, j),
        )
        contests.append(
            {"j": j, "converged": bracket.converged, "estimate": est.as_dict()}
        )
        if est.mean > best_mean:
            best_mean = est.mean
            best_j = j
            best_se = est.std_error

    ratio = best_mean / w_est.mean if w_est.mean > 0.0 else math.inf
    margin = Z_99 * math.sqrt((3.0 * w_est.std_error) ** 2 + best_se**2)
    three_w_ok = 3.0 * w_est.mean - best_mean >= -margin
    return {
        "n": n,
        "budget": budget,
        "discretization": discretization,
        "wta": w_est.as_dict(),
        "contests": contests,
        "best_j": best_j,
        "best": best_mean,
        "ratio": ratio,
        "checks": {
            "three_w_geq_best": bool(three_w_ok),
            "ci_margin": margin,
            "all_brackets_collapsed": bool(all_collapsed),
        },
    }


def example_obj(
    budget: float, n: int, eps: float, seed, *, replicas: int = 200, m: int = 1600
) -> dict:
    """Two-cluster instance where max and sum objectives need different contests.

    Half the mass is a low cluster (q near 1, cost near 1), half a high
    cluster (q in [20, 21], cost near 0.9 V). Winner-take-all elicits a few
    expensive stars (good max, poor sum); spreading the budget as V/2 prizes
    of 2 elicits many cheap types (good sum, poor max). Four checks:

    a. WTA equilibrium expected max > 2;
    b. the spread contest's expected sum >= V/4;
    c. the spread contest's equilibrium contains no high-cost types;
    d. every tested top-heavy contest (v_1 >= 9V/10 - 1) keeps the expected
       sum below V/4, with a one-sided 99% confidence margin.
    """
    if budget < 160.0:
        raise BudgetTooSmall(
            f"the separation argument needs budget >= 160, got {budget!r}"
        )
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"need 0 < eps < 1, got {eps!r}")
    seed = int(seed)
    V = float(budget)
    jd = RectMixture(
        (
            RectComponent(1.0, 1.0 + eps, 1.0 - eps, 1.0, 0.5),
            RectComponent(20.0, 21.0, 0.9 * V - 1.0, 0.9 * V, 0.5),
        )
    )
    types = discretize(jd, m, seed, n=n)
    high_cost = V / 2.0  # separates the clusters for any budget >= 160

    wta = make_simple_contest(1, V, n)
    wta_bracket = equilibrium(wta, types)
    wta_max = mc_objective(
        types,
        rule_from_profile(types, wta_bracket.profile),
        n,
        "max",
        replicas,
        _mc_seed(seed, 0),
    )

    j_mid = int(round(V / 2.0))
    spread = make_simple_contest(j_mid, V, n)
    spread_bracket = equilibrium(spread, types)
    spread_sum = mc_objective(
        types,
        rule_from_profile(types, spread_bracket.profile),
        n,
        "sum",
        replicas,
        _mc_seed(seed, 1),
    )
    spread_high_count = int(
        np.sum(spread_bracket.profile.mask & (types.c > high_cost))
    )

    # top-heavy family: winner-take-all plus near-maximal first prizes with the
    # remainder spread over 1, 2, or 10 runner-up ranks
    v1_floor = 0.9 * V - 1.0
    top_heavy: list[tuple[str, PrizeVector]] = [("wta", wta)]
    rest = V - v1_floor
    top_heavy.append(
        ("floor_plus_one", PrizeVector((v1_floor, rest) + (0.0,) * (n - 2), V))
    )
    top_heavy.append(
        (
            "floor_plus_ten",
            PrizeVector((v1_floor,) + (rest / 10.0,) * 10 + (0.0,) * (n - 11), V),
        )
    )
    v1_mid = 0.95 * V
    top_heavy.append(
        (
            "mid_plus_two",
            PrizeVector((v1_mid,) + ((V - v1_mid) / 2.0,) * 2 + (0.0,) * (n - 3), V),
        )
    )

    top_heavy_rows = []
    all_below = True
    for tag, contest in enumerate(top_heavy):
        name, cv = contest
        bracket = equilibrium(cv, types)
        est = mc_objective(
            types,
            rule_from_profile(types, bracket.profile),
            n,
            "sum",
            replicas,
            _mc_seed(seed, 100 + tag),
        )
        below = est.mean + Z_99 * est.std_error < V / 4.0
        all_below = all_below and below
        top_heavy_rows.append(
            {
                "name": name,
                "v1": cv.values[0],
                "sum_estimate": est.as_dict(),
                "below_quarter": bool(below),
            }
        )

    return {
        "budget": V,
        "n": n,
        "eps": eps,
        "replicas": replicas,
        "discretization": m,
        "wta_max": wta_max.as_dict(),
        "spread_j": j_mid,
        "spread_sum": spread_sum.as_dict(),
        "spread_high_participants": spread_high_count,
        "top_heavy": top_heavy_rows,
        "checks": {
            "wta_max_exceeds_2": bool(wta_max.mean > 2.0),
            "spread_sum_geq_quarter": bool(spread_sum.mean >= V / 4.0),
            "spread_has_no_high_types": bool(spread_high_count == 0),
            "top_heavy_sum_below_quarter": bool(all_below),
        },
    }
