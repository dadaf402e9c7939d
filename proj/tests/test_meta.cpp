#include <gtest/gtest.h>

#include <random>

#include "delib/meta.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace delib;
using oracle::constant;
using oracle::exponential;
using oracle::two_actions;

namespace {

DecisionProblem identity() { return two_actions(constant(1.0), constant(0.0), constant(0.0), constant(1.0)); }

// Cutset {A} with p(A=t) = 0.8 and p(B=t | A=t) = 0.5: after the first step
// the bounds on p(B=t) are (0.4, 0.6) and one step remains.
InferenceSession worked_session(VirtualClock clock = VirtualClock(0.0, 0.0, 0.0)) {
    auto net = fixture::diamond(0.8);
    net.variables[1].cpt = {0.5, 0.5, 0.3, 0.7};
    auto s = init_session(net, Evidence{}, {1, 0}, std::move(clock));
    s.refine();
    return s;
}

}  // namespace

TEST(Policy, ParseAndName) {
    EXPECT_EQ(Policy::parse("myopic").name(), "myopic");
    EXPECT_EQ(Policy::parse("dominance-only").kind, Policy::Kind::dominance_only);
    const auto p = Policy::parse("lookahead:3");
    EXPECT_EQ(p.kind, Policy::Kind::lookahead);
    EXPECT_EQ(p.horizon, 3u);
    EXPECT_EQ(p.name(), "lookahead:3");
    EXPECT_THROW(Policy::parse("lookahead:1"), Error);
    EXPECT_THROW(Policy::parse("lookahead:"), Error);
    EXPECT_THROW(Policy::parse("lookahead:x"), Error);
    EXPECT_THROW(Policy::parse("greedy"), Error);
}

TEST(Predict, BeforeAnyStepUsesUnitLikelihood) {
    auto s = init_session(fixture::diamond(), Evidence{{3, 0}}, {0, 0});
    const auto p = predict_bounds(s, 1);
    // b' = 0.7, r' = 0.3: width 0.3 / (0.7 + 0.3)
    EXPECT_NEAR(p.predicted_width, 0.3, 1e-12);
    EXPECT_THROW(predict_bounds(s, 0), Error);
    EXPECT_THROW(predict_bounds(s, 3), Error);
}

TEST(Predict, FinalHorizonCollapses) {
    auto s = worked_session();
    EXPECT_NEAR(s.bounds().lb, 0.4, 1e-15);
    EXPECT_NEAR(s.bounds().ub, 0.6, 1e-15);
    const auto p = predict_bounds(s, 1);
    EXPECT_EQ(p.predicted_width, 0.0);
}

TEST(Predict, WidthNeverGrowsOnRandomNetworks) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 40; ++i) {
        auto net = oracle::random_loopy_network(rng, 6 + i % 5);
        auto s = init_session(net, Evidence{{net.size() - 1, 0}}, {0, 0});
        while (!s.exhausted()) {
            double prev = s.bounds().width();
            for (std::size_t h = 1; h <= s.remaining_steps(); ++h) {
                const auto p = predict_bounds(s, h);
                EXPECT_LE(p.predicted_width, prev + 1e-15);
                EXPECT_GE(p.predicted_lb, 0.0);
                EXPECT_LE(p.predicted_ub, 1.0);
                prev = p.predicted_width;
            }
            EXPECT_EQ(prev, 0.0);
            s.refine();
        }
    }
}

TEST(Evc, WorkedCaseIsFiveHundredths) {
    const auto s = worked_session();
    const auto r = evc_myopic(identity(), s, s.clock().now());
    EXPECT_EQ(r.resolved_fraction, 1.0);
    EXPECT_NEAR(r.informed_eu, 0.55, 1e-12);
    EXPECT_NEAR(r.act_now_eu, 0.5, 1e-12);
    EXPECT_NEAR(r.evc, 0.05, 1e-12);
    EXPECT_EQ(r.delay, 0.0);
}

TEST(Evc, DelayChargesDecay) {
    const auto s = worked_session(VirtualClock(2.0, 0.5, 0.0));
    const auto dp = two_actions(exponential(1.0, 0.1), constant(0.0), constant(0.0), exponential(1.0, 0.1));
    const auto r = evc_myopic(dp, s, 0.0);
    EXPECT_EQ(r.delay, 2.5);
    EXPECT_EQ(r.clock_charge, 0.5);
    EXPECT_NEAR(r.evc, 0.55 * std::exp(-0.25) - 0.5, 1e-12);
}

TEST(Evc, FormulaHoldsOnRandomSessions) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        auto net = oracle::random_loopy_network(rng, 6 + i % 5);
        auto s = init_session(net, Evidence{{net.size() - 1, 0}}, {0, 0}, VirtualClock(1.0 + u(rng), 0.05));
        const auto dp = two_actions(exponential(u(rng), 0.02 * u(rng)), constant(u(rng)), constant(u(rng)),
                                    exponential(u(rng), 0.02 * u(rng)));
        while (!s.exhausted()) {
            const double t = s.clock().now();
            const auto r = evc_myopic(dp, s, t);
            const auto& b = s.bounds();
            const double lambda = b.width() > 0.0 ? 1.0 - predict_bounds(s, 1).predicted_width / b.width() : 0.0;
            const double td = t + r.delay;
            const double informed = b.width() > 0.0 ? oracle::informed_eu_mc(dp, b.lb, b.ub, td, 20000, rng).mean
                                                    : oracle::max_eu(dp, b.lb, td);
            const double expected = lambda * informed + (1.0 - lambda) * oracle::max_eu(dp, b.mean(), td) -
                                    oracle::max_eu(dp, b.mean(), t);
            EXPECT_NEAR(r.resolved_fraction, lambda, 1e-12);
            EXPECT_NEAR(r.evc, expected, 0.02);
            EXPECT_GE(r.resolved_fraction, 0.0);
            EXPECT_LE(r.resolved_fraction, 1.0);

            const auto look = evc_lookahead(dp, s, t, 4);
            EXPECT_GE(look.evc, r.evc);
            EXPECT_LE(look.horizon, std::min<std::size_t>(4, s.remaining_steps()));
            s.refine();
        }
    }
}

TEST(Evc, RejectsExhaustedSession) {
    auto s = worked_session();
    s.refine();
    EXPECT_THROW(evc_myopic(identity(), s, 0.0), Error);
    EXPECT_THROW(evc_lookahead(identity(), s, 0.0, 2), Error);
}

TEST(StepDecision, OrderOfChecks) {
    auto s = worked_session();
    const auto dp = identity();
    // Undominated, one step left, positive EVC.
    auto d = step_decision(dp, s, 0.0, Policy::myopic());
    EXPECT_EQ(d.kind, ControlDecision::Kind::proceed);
    ASSERT_TRUE(d.evc.has_value());

    d = step_decision(dp, s, 0.0, Policy::dominance_only());
    EXPECT_EQ(d.kind, ControlDecision::Kind::proceed);
    EXPECT_FALSE(d.evc.has_value());

    // Identical actions are never dominated, so exhaustion is what stops them.
    const auto same = two_actions(constant(0.5), constant(0.5), constant(0.5), constant(0.5));
    d = step_decision(same, s, 0.0, Policy::myopic());
    EXPECT_EQ(d.kind, ControlDecision::Kind::halt);
    EXPECT_EQ(d.reason, HaltReason::evc_nonpositive);
    s.refine();
    d = step_decision(same, s, 0.0, Policy::myopic());
    EXPECT_EQ(d.kind, ControlDecision::Kind::halt);
    EXPECT_EQ(d.reason, HaltReason::exhausted);
    EXPECT_EQ(step_decision(dp, s, 0.0, Policy::myopic()).kind, ControlDecision::Kind::dominant);

    // A point interval off p* is dominated before exhaustion is considered.
    auto t = init_session(fixture::diamond(), Evidence{}, {0, 0});
    run_to_convergence(t);
    d = step_decision(dp, t, 0.0, Policy::myopic());
    EXPECT_EQ(d.kind, ControlDecision::Kind::dominant);
    EXPECT_EQ(d.action, 0u);
}

TEST(StepDecision, HaltsWhenDelayCostsOutweighInformation) {
    const auto s = worked_session(VirtualClock(100.0, 0.05, 0.0));
    const auto dp = two_actions(exponential(1.0, 0.05), constant(0.0), constant(0.0), exponential(1.0, 0.05));
    const auto d = step_decision(dp, s, 0.0, Policy::myopic());
    EXPECT_EQ(d.kind, ControlDecision::Kind::halt);
    EXPECT_EQ(d.reason, HaltReason::evc_nonpositive);
    EXPECT_LE(d.evc->evc, 0.0);
}
