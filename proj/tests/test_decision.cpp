#include <gtest/gtest.h>

#include <random>

#include "delib/decision.hpp"
#include "oracles.hpp"

using namespace delib;
using oracle::constant;
using oracle::exponential;
using oracle::two_actions;

namespace {

DecisionProblem random_static(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return two_actions(constant(u(rng)), constant(u(rng)), constant(u(rng)), constant(u(rng)));
}

}  // namespace

TEST(Threshold, SymmetricMatrixIsOneHalf) {
    const auto dp = two_actions(constant(1.0), constant(0.0), constant(0.0), constant(1.0));
    const auto r = threshold_pstar(dp, 0, 1, 0.0);
    ASSERT_TRUE(r.defined());
    EXPECT_EQ(*r.p_star, 0.5);
    EXPECT_EQ(r.favored_above, 0u);
    EXPECT_EQ(r.favored_below, 1u);
    EXPECT_STREQ(to_string(r.status), "defined");
}

TEST(Threshold, ParallelAndOutside) {
    const auto par = two_actions(constant(0.9), constant(0.4), constant(0.7), constant(0.2));
    const auto r = threshold_pstar(par, 0, 1, 0.0);
    EXPECT_EQ(r.status, ThresholdStatus::parallel);
    EXPECT_FALSE(r.defined());
    EXPECT_EQ(r.favored_above, 0u);

    const auto out = two_actions(constant(0.9), constant(0.8), constant(0.5), constant(0.1));
    const auto o = threshold_pstar(out, 0, 1, 0.0);
    EXPECT_EQ(o.status, ThresholdStatus::outside_unit_interval);
    EXPECT_FALSE(o.defined());
}

TEST(Threshold, MatchesBisectionAndOrientation) {
    std::mt19937_64 rng(1);
    int defined = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto dp = random_static(rng);
        const auto r = threshold_pstar(dp, 0, 1, 0.0);
        const auto diff = [&](double p) { return oracle::eu(dp, 0, p, 0.0) - oracle::eu(dp, 1, p, 0.0); };
        if (!r.defined()) {
            if (r.status == ThresholdStatus::outside_unit_interval) {
                EXPECT_GT(diff(0.0) * diff(1.0), 0.0);
            }
            continue;
        }
        ++defined;
        EXPECT_NEAR(*r.p_star, oracle::bisect(diff, 0.0, 1.0), 1e-9);
        const double above = std::min(1.0, *r.p_star + 0.01), below = std::max(0.0, *r.p_star - 0.01);
        if (above > *r.p_star) {
            EXPECT_EQ(best_action_at(dp, above, 0.0), r.favored_above);
        }
        if (below < *r.p_star) {
            EXPECT_EQ(best_action_at(dp, below, 0.0), r.favored_below);
        }
    }
    EXPECT_GT(defined, 100);
}

TEST(Threshold, DriftsUpWhileOnlyTheFirstCornerDecays) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double u21 = u(rng), u12 = u(rng);
        const double u11 = u21 + (1.0 - u21) * u(rng);
        const double u22 = u12 + (1.0 - u12) * u(rng);
        const auto dp = two_actions(exponential(u11, 0.1 * u(rng)), constant(u12), constant(u21), constant(u22));
        double prev = -1.0;
        for (double t = 0.0; t <= 100.0; t += 1.0) {
            const auto r = threshold_pstar(dp, 0, 1, t);
            if (!r.defined()) break;
            EXPECT_GE(*r.p_star, prev);
            prev = *r.p_star;
        }
    }
}

TEST(Dominance, EndpointsDecide) {
    const auto dp = two_actions(constant(1.0), constant(0.0), constant(0.0), constant(1.0));
    EXPECT_EQ(check_dominance(dp, {0.6, 0.9}, 0.0), std::optional<ActionId>{0});
    EXPECT_EQ(check_dominance(dp, {0.1, 0.4}, 0.0), std::optional<ActionId>{1});
    EXPECT_EQ(check_dominance(dp, {0.4, 0.6}, 0.0), std::nullopt);
    // Touching p* at one endpoint still dominates.
    EXPECT_EQ(check_dominance(dp, {0.5, 0.7}, 0.0), std::optional<ActionId>{0});
    EXPECT_EQ(check_dominance(dp, {0.5, 0.5}, 0.0), std::nullopt);
    EXPECT_THROW(check_dominance(DecisionProblem{{"a", "b", "c"}, "H1", "H2", {}}, {0.0, 1.0}, 0.0), Error);
}

TEST(Dominance, AgreesWithDenseGrid) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto dp = random_static(rng);
        double lb = u(rng), ub = u(rng);
        if (lb > ub) std::swap(lb, ub);
        const auto d = check_dominance(dp, {lb, ub}, 0.0);
        bool a0 = true, a1 = true;
        for (int k = 0; k <= 200; ++k) {
            const double p = lb + (ub - lb) * k / 200.0;
            const double diff = oracle::eu(dp, 0, p, 0.0) - oracle::eu(dp, 1, p, 0.0);
            a0 = a0 && diff >= -1e-15;
            a1 = a1 && diff <= 1e-15;
        }
        if (d == std::optional<ActionId>{0}) {
            EXPECT_TRUE(a0);
        }
        if (d == std::optional<ActionId>{1}) {
            EXPECT_TRUE(a1);
        }
        if (!d) {
            EXPECT_FALSE(a0 != a1);
        }
    }
}

TEST(ActAtMean, MaximizesAverageEu) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const auto dp = random_static(rng);
        double lb = u(rng), ub = u(rng);
        if (lb > ub) std::swap(lb, ub);
        const ActionId a = act_at_mean(dp, {lb, ub}, 0.0);
        EXPECT_GE(oracle::average_eu(dp, a, lb, ub, 0.0), oracle::average_eu(dp, 1 - a, lb, ub, 0.0) - 1e-12);
    }
}

TEST(InformedEu, WorkedIdentityCase) {
    const auto dp = two_actions(constant(1.0), constant(0.0), constant(0.0), constant(1.0));
    EXPECT_NEAR(expected_max_utility_uniform(dp, {0.4, 0.6}, 0.0), 0.55, 1e-15);
    EXPECT_NEAR(max_expected_utility(dp, 0.5, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(expected_max_utility_uniform(dp, {0.3, 0.3}, 0.0), 0.7, 1e-15);
}

TEST(InformedEu, MatchesMonteCarlo) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const auto dp = two_actions(exponential(u(rng), 0.05 * u(rng)), constant(u(rng)), constant(u(rng)),
                                    exponential(u(rng), 0.05 * u(rng)));
        double lb = u(rng), ub = u(rng);
        if (lb > ub) std::swap(lb, ub);
        const double t = 20.0 * u(rng);
        const auto mc = oracle::informed_eu_mc(dp, lb, ub, t, 100000, rng);
        EXPECT_NEAR(expected_max_utility_uniform(dp, {lb, ub}, t), mc.mean, 4.0 * mc.std_error + 1e-12);
    }
}

TEST(InformedEu, NeverBelowActingAtTheMean) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto dp = random_static(rng);
        double lb = u(rng), ub = u(rng);
        if (lb > ub) std::swap(lb, ub);
        const double informed = expected_max_utility_uniform(dp, {lb, ub}, 0.0);
        EXPECT_GE(informed, max_expected_utility(dp, 0.5 * (lb + ub), 0.0) - 1e-12);
        EXPECT_LE(informed, std::max(oracle::max_eu(dp, lb, 0.0), oracle::max_eu(dp, ub, 0.0)) + 1e-12);
    }
}

TEST(Problem, CheckRejectsMalformed) {
    DecisionProblem dp;
    dp.actions = {"only"};
    EXPECT_THROW(dp.check(), Error);
    dp = two_actions(constant(1.0), constant(0.0), constant(0.0), constant(1.0));
    EXPECT_NO_THROW(dp.check());
    dp.outcomes.pop_back();
    EXPECT_THROW(dp.check(), Error);
}
