import math

import numpy as np
import pytest

from contest_forge.contest import PrizeVector, expected_prize, make_simple_contest
from contest_forge.distributions import (
    EmpiricalTypes,
    RectComponent,
    RectMixture,
    discretize,
)
from contest_forge.errors import (
    BudgetNotExhausted,
    BudgetTooSmall,
    IndexOutOfRange,
    NoLowCostMass,
    ProfileNotSubEquilibrium,
    ValidationError,
)
from contest_forge.heterogeneous import (
    ParticipationProfile,
    beat_probability,
    best_response,
    equilibrium,
    example_obj,
    expected_payoff,
    fosd_check,
    highcost_subequilibrium,
    is_sub_equilibrium,
    mc_objective,
    median_subequilibrium,
    output_cdf,
    rule_from_profile,
    wta_approx_experiment,
)
from contest_forge.homogeneous import participation_rate

TWO_POINT = EmpiricalTypes(q=[2.0, 1.0], c=[0.3, 0.3], w=[0.5, 0.5], n=2)
WTA2 = make_simple_contest(1, 1.0, 2)


def random_types(rng, size, n, c_hi=1.0):
    q = rng.uniform(0.0, 1.0, size=size)
    q += np.arange(size) * 1e-9  # distinct qualities
    c = rng.uniform(0.01, c_hi, size=size)
    w = rng.uniform(0.2, 1.0, size=size)
    w /= w.sum()
    w = w.round(12)
    w[-1] = 1.0 - w[:-1].sum()
    return EmpiricalTypes(q=q, c=c, w=w, n=n)


def random_profile(rng, size):
    return ParticipationProfile(rng.random(size) < rng.uniform(0.2, 0.8))


class TestParticipationProfile:
    def test_constructors(self):
        assert ParticipationProfile.empty(3).count == 0
        assert ParticipationProfile.full(3).count == 3

    def test_equality_and_subset(self):
        a = ParticipationProfile(np.array([True, False, True]))
        b = ParticipationProfile(np.array([True, False, True]))
        c = ParticipationProfile(np.array([True, True, True]))
        assert a == b and a != c
        assert a.subset_of(c) and not c.subset_of(a)
        assert hash(a) == hash(b)


class TestBeatProbability:
    def test_two_point(self):
        full = ParticipationProfile.full(2)
        assert beat_probability(TWO_POINT, full, 0) == 0.0
        assert beat_probability(TWO_POINT, full, 1) == 0.5

    def test_mask_matters(self):
        only_weak = ParticipationProfile(np.array([False, True]))
        assert beat_probability(TWO_POINT, only_weak, 1) == 0.0

    def test_index_gate(self):
        with pytest.raises(IndexOutOfRange):
            beat_probability(TWO_POINT, ParticipationProfile.full(2), 2)


class TestExpectedPayoff:
    def test_two_point_oracle(self):
        full = ParticipationProfile.full(2)
        np.testing.assert_allclose(
            expected_payoff(WTA2, TWO_POINT, full, 0), 0.7, atol=1e-14
        )
        np.testing.assert_allclose(
            expected_payoff(WTA2, TWO_POINT, full, 1), 0.2, atol=1e-14
        )

    def test_removing_competitor_never_hurts(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            types = random_types(rng, 12, 6)
            contest = make_simple_contest(int(rng.integers(1, 7)), 1.0, 6)
            profile = random_profile(rng, 12)
            i = int(rng.integers(0, 12))
            base = expected_payoff(contest, types, profile, i)
            drop = profile.mask.copy()
            drop[int(rng.integers(0, 12))] = False
            less = expected_payoff(contest, types, ParticipationProfile(drop), i)
            assert less >= base - 1e-12


class TestBestResponse:
    def test_empty_profile_draws_everyone_below_top_prize(self):
        rng = np.random.default_rng(1)
        types = random_types(rng, 20, 8, c_hi=1.5)
        contest = PrizeVector((0.6, 0.4) + (0.0,) * 6, 1.0)
        response = best_response(contest, types, ParticipationProfile.empty(20))
        np.testing.assert_array_equal(response.mask, types.c <= 0.6)

    def test_antitone_on_random_pairs(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            size = int(rng.integers(2, 25))
            n = int(rng.integers(2, 9))
            types = random_types(rng, size, n)
            contest = make_simple_contest(int(rng.integers(1, n + 1)), 1.0, n)
            small = random_profile(rng, size)
            grown = ParticipationProfile(small.mask | (rng.random(size) < 0.3))
            br_small = best_response(contest, types, small)
            br_grown = best_response(contest, types, grown)
            assert br_grown.subset_of(br_small)

    def test_matches_scalar_definition(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            types = random_types(rng, 15, 5)
            contest = make_simple_contest(2, 1.0, 5)
            profile = random_profile(rng, 15)
            response = best_response(contest, types, profile)
            for i in range(15):
                prize = expected_prize(
                    contest, beat_probability(types, profile, i)
                )
                assert response.mask[i] == (types.c[i] <= prize)


class TestEquilibrium:
    def test_two_point_full_participation(self):
        bracket = equilibrium(WTA2, TWO_POINT)
        assert bracket.converged
        assert bracket.upper == ParticipationProfile.full(2)

    def test_everyone_priced_out(self):
        types = EmpiricalTypes(q=[1.0, 2.0], c=[3.0, 4.0], w=[0.5, 0.5], n=3)
        bracket = equilibrium(make_simple_contest(1, 1.0, 3), types)
        assert bracket.converged
        assert bracket.upper.count == 0

    def test_fixed_point_when_converged(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            size = int(rng.integers(2, 40))
            n = int(rng.integers(2, 10))
            types = random_types(rng, size, n)
            contest = make_simple_contest(int(rng.integers(1, n + 1)), 1.0, n)
            bracket = equilibrium(contest, types)
            if bracket.converged:
                assert best_response(contest, types, bracket.upper) == bracket.upper

    def test_bracket_contains_all_fixed_points(self):
        rng = np.random.default_rng(5)
        for _ in range(8):
            size = 10
            n = 4
            types = random_types(rng, size, n)
            contest = make_simple_contest(int(rng.integers(1, n + 1)), 1.0, n)
            bracket = equilibrium(contest, types)
            for code in range(2**size):
                mask = np.array(
                    [(code >> b) & 1 == 1 for b in range(size)], dtype=bool
                )
                profile = ParticipationProfile(mask)
                if best_response(contest, types, profile) == profile:
                    assert bracket.lower.subset_of(profile)
                    assert profile.subset_of(bracket.upper)

    def test_homogeneous_cost_reduces_to_threshold(self):
        """With equal costs the empirical equilibrium is a quality cutoff
        whose participating count is within one support point of the
        continuous solver's rate."""
        rng = np.random.default_rng(42)
        m, n, c = 200, 6, 0.3
        q = np.sort(rng.uniform(0.0, 1.0, size=m))
        types = EmpiricalTypes(q=q, c=np.full(m, c), w=np.full(m, 1.0 / m), n=n)
        contest = make_simple_contest(2, 1.0, n)
        bracket = equilibrium(contest, types)
        assert bracket.converged
        mask = bracket.upper.mask
        # top set in quality
        assert np.all(mask[np.argsort(q)][: m - mask.sum()] == False)  # noqa: E712
        p_star, flag = participation_rate(contest, c)
        assert flag is None
        assert abs(mask.sum() - (math.floor(m * p_star) + 1)) <= 1

    def test_population_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            equilibrium(make_simple_contest(1, 1.0, 3), TWO_POINT)


class TestIsSubEquilibrium:
    def test_equilibrium_passes(self):
        bracket = equilibrium(WTA2, TWO_POINT)
        assert is_sub_equilibrium(WTA2, TWO_POINT, bracket.upper)

    def test_subsets_of_equilibrium_pass(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            size = int(rng.integers(2, 30))
            n = int(rng.integers(2, 8))
            types = random_types(rng, size, n)
            contest = make_simple_contest(int(rng.integers(1, n + 1)), 1.0, n)
            eq = equilibrium(contest, types).upper
            sub = ParticipationProfile(eq.mask & (rng.random(size) < 0.6))
            assert is_sub_equilibrium(contest, types, sub)

    def test_overpriced_participant_fails(self):
        types = EmpiricalTypes(q=[1.0, 2.0], c=[0.1, 5.0], w=[0.5, 0.5], n=2)
        profile = ParticipationProfile(np.array([False, True]))
        assert not is_sub_equilibrium(WTA2, types, profile)


class TestOutputCdf:
    def test_empty_profile(self):
        empty = ParticipationProfile.empty(2)
        for x in (0.0, 0.5, 10.0):
            assert output_cdf(TWO_POINT, empty, x) == 1.0

    def test_full_profile_is_empirical_cdf(self):
        full = ParticipationProfile.full(2)
        assert output_cdf(TWO_POINT, full, 0.5) == 0.0
        assert output_cdf(TWO_POINT, full, 1.0) == 0.5
        assert output_cdf(TWO_POINT, full, 2.0) == 1.0

    def test_half_masked_hand_sum(self):
        types = EmpiricalTypes(
            q=[1.0, 2.0, 3.0], c=[0.1, 0.1, 0.1], w=[0.2, 0.3, 0.5], n=2
        )
        profile = ParticipationProfile(np.array([True, False, True]))
        # at x = 1.5: point 0 participates and is below (0.2), point 1 does
        # not participate (0.3), point 2 produces 3 > 1.5
        np.testing.assert_allclose(output_cdf(types, profile, 1.5), 0.5)

    def test_rejects_negative_x(self):
        with pytest.raises(ValidationError):
            output_cdf(TWO_POINT, ParticipationProfile.full(2), -0.1)


class TestFosd:
    def test_reflexive(self):
        bracket = equilibrium(WTA2, TWO_POINT)
        assert fosd_check(TWO_POINT, bracket.upper, bracket.upper, WTA2)

    def test_random_ir_subsets_dominated(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            size = int(rng.integers(2, 30))
            n = int(rng.integers(2, 8))
            types = random_types(rng, size, n)
            contest = make_simple_contest(int(rng.integers(1, n + 1)), 1.0, n)
            eq = equilibrium(contest, types).upper
            sub = ParticipationProfile(eq.mask & (rng.random(size) < 0.6))
            assert fosd_check(types, eq, sub, contest)

    def test_gate_on_non_sub_equilibrium(self):
        types = EmpiricalTypes(q=[1.0, 2.0], c=[0.1, 5.0], w=[0.5, 0.5], n=2)
        eq = equilibrium(WTA2, types).upper
        bad = ParticipationProfile(np.array([True, True]))
        with pytest.raises(ProfileNotSubEquilibrium):
            fosd_check(types, eq, bad, WTA2)

    def test_gate_on_non_fixed_point(self):
        bad_eq = ParticipationProfile.empty(2)  # everyone wants in at c=0.3
        sub = ParticipationProfile.empty(2)
        with pytest.raises(ProfileNotSubEquilibrium):
            fosd_check(TWO_POINT, bad_eq, sub, WTA2)


class TestMcObjective:
    def test_never_rule(self):
        est = mc_objective(
            TWO_POINT, lambda q, c: np.zeros_like(q, dtype=bool), 2, "max", 50, 0
        )
        assert est.mean == 0.0 and est.std_error == 0.0

    def test_degenerate_type_exact(self):
        types = EmpiricalTypes(q=[1.0], c=[0.1], w=[1.0], n=3)
        est = mc_objective(
            types, lambda q, c: np.ones_like(q, dtype=bool), 3, "max", 100, 1
        )
        assert est.mean == 1.0 and est.std_error == 0.0

    def test_two_point_max_expectation(self):
        # max of two draws: 2 with prob 3/4, 1 with prob 1/4
        est = mc_objective(
            TWO_POINT, lambda q, c: np.ones_like(q, dtype=bool), 2, "max", 100_000, 42
        )
        assert abs(est.mean - 1.75) <= 3.0 * est.std_error

    def test_top_k_equals_sum_at_full_width(self):
        rule = lambda q, c: q > 1.5
        a = mc_objective(TWO_POINT, rule, 2, ("top_k", 2), 500, 7)
        b = mc_objective(TWO_POINT, rule, 2, "sum", 500, 7)
        np.testing.assert_allclose(a.mean, b.mean, rtol=1e-12)

    def test_bitwise_reproducible(self):
        rule = lambda q, c: c <= 0.3
        a = mc_objective(TWO_POINT, rule, 4, "max", 1000, 99)
        b = mc_objective(TWO_POINT, rule, 4, "max", 1000, 99)
        assert a.mean == b.mean and a.std_error == b.std_error

    def test_gates(self):
        rule = lambda q, c: np.ones_like(q, dtype=bool)
        with pytest.raises(ValidationError):
            mc_objective(TWO_POINT, rule, 2, "max", 1, 0)
        with pytest.raises(ValidationError):
            mc_objective(TWO_POINT, rule, 2, "median", 10, 0)
        with pytest.raises(ValidationError):
            mc_objective(TWO_POINT, rule, 2, ("top_k", 3), 10, 0)


class TestRuleFromProfile:
    def test_maps_support_points_to_mask(self):
        rng = np.random.default_rng(3)
        types = random_types(rng, 30, 5)
        profile = random_profile(rng, 30)
        rule = rule_from_profile(types, profile)
        np.testing.assert_array_equal(rule(types.q, types.c), profile.mask)


class TestMedianSubequilibrium:
    def test_single_rectangle(self):
        jd = RectMixture((RectComponent(0.0, 1.0, 0.0, 0.4, 1.0),))
        rule = median_subequilibrium(jd, 1.0, 2)
        np.testing.assert_allclose(rule.mu, 0.5, atol=1e-9)
        assert rule.cost_cap == 0.5
        assert rule.win_floor >= 0.5
        assert bool(rule(np.array([0.7]), np.array([0.3]))[0])
        assert not bool(rule(np.array([0.3]), np.array([0.3]))[0])

    def test_no_low_cost_mass(self):
        jd = RectMixture((RectComponent(0.0, 1.0, 2.0, 3.0, 1.0),))
        with pytest.raises(NoLowCostMass):
            median_subequilibrium(jd, 1.0, 5)

    def test_interim_rationality_via_win_floor(self):
        # expected WTA prize >= V * win_floor >= V/2 >= cost cap
        jd = RectMixture(
            (
                RectComponent(0.0, 2.0, 0.0, 1.0, 0.5),
                RectComponent(1.0, 3.0, 0.5, 4.0, 0.5),
            )
        )
        rule = median_subequilibrium(jd, 2.0, 6)
        assert 1.0 * rule.win_floor * 2.0 >= rule.cost_cap - 1e-9


class TestHighcostSubequilibrium:
    def test_cheap_population_empty(self):
        rng = np.random.default_rng(4)
        types = random_types(rng, 15, 5, c_hi=0.49)
        contest = make_simple_contest(3, 1.0, 5)
        profile = highcost_subequilibrium(contest, types, 1.0)
        assert profile.count == 0

    def test_lone_expensive_winner(self):
        types = EmpiricalTypes(q=[5.0, 1.0], c=[0.8, 2.0], w=[0.5, 0.5], n=2)
        profile = highcost_subequilibrium(WTA2, types, 1.0)
        assert profile.count == 1 and bool(profile.mask[0])
        assert is_sub_equilibrium(WTA2, types, profile)

    def test_random_instances_pass_wta_check(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            size = int(rng.integers(3, 25))
            n = int(rng.integers(2, 7))
            types = random_types(rng, size, n, c_hi=1.2)
            j = int(rng.integers(1, n + 1))
            contest = make_simple_contest(j, 1.0, n)
            profile = highcost_subequilibrium(contest, types, 1.0)
            wta = make_simple_contest(1, 1.0, n)
            assert is_sub_equilibrium(wta, types, profile)
            assert np.all(types.c[profile.mask] > 0.5)

    def test_requires_exhausted_budget(self):
        contest = PrizeVector((0.5, 0.0), 1.0)
        with pytest.raises(BudgetNotExhausted):
            highcost_subequilibrium(contest, TWO_POINT, 1.0)


class TestWtaApproxExperiment:
    def test_degenerate_single_type_ratio_one(self):
        types = EmpiricalTypes(q=[1.0], c=[0.05], w=[1.0], n=4)
        report = wta_approx_experiment(types, 4, 1.0, 1, 50, 0)
        assert report["ratio"] == 1.0
        assert report["checks"]["three_w_geq_best"]

    def test_homogeneous_wta_regime(self):
        # cost above the first breakpoint, so WTA is itself optimal
        jd = RectMixture((RectComponent(0.0, 1.0, 0.55, 0.56, 1.0),))
        report = wta_approx_experiment(jd, 8, 1.0, 300, 4000, 11)
        assert 0.9 <= report["ratio"] <= 1.1
        assert report["checks"]["three_w_geq_best"]

    def test_report_shape(self):
        jd = RectMixture((RectComponent(0.0, 1.0, 0.2, 0.9, 1.0),))
        report = wta_approx_experiment(jd, 5, 1.0, 40, 100, 2)
        assert {"wta", "contests", "ratio", "checks", "best_j"} <= report.keys()
        assert all({"j", "estimate"} <= row.keys() for row in report["contests"])
        js = [row["j"] for row in report["contests"]]
        assert js == sorted(js) and js[0] == 1


class TestExampleObj:
    def test_small_scale_all_checks(self):
        report = example_obj(200.0, 500, 0.01, seed=3, replicas=100, m=800)
        assert all(report["checks"].values()), report["checks"]

    def test_budget_gate(self):
        with pytest.raises(BudgetTooSmall):
            example_obj(100.0, 500, 0.01, seed=0)

    def test_eps_gate(self):
        with pytest.raises(ValidationError):
            example_obj(400.0, 500, 0.0, seed=0)
