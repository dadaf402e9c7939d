#pragma once

// Binary-hypothesis decision calculus over time-dependent utilities.
// For a fixed time, eu(A_i) is linear in p = p(H1|E), so every question
// about an interval of p reduces to its endpoints and line crossings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "delib/bounded_conditioning.hpp"
#include "delib/errors.hpp"
#include "delib/utility.hpp"

namespace delib {

using ActionId = std::size_t;

inline constexpr double kParallelTolerance = 1e-12;

struct DecisionProblem {
    std::vector<std::string> actions;
    std::string h1 = "H1";
    std::string h2 = "H2";
    // outcomes[i] = {u(A_i H1, t), u(A_i H2, t)}
    std::vector<std::array<OutcomeUtility, 2>> outcomes;

    std::size_t action_count() const noexcept { return actions.size(); }

    void check() const {
        if (actions.size() < 2) throw Error("a decision needs at least 2 actions");
        if (outcomes.size() != actions.size()) throw Error("every action needs a utility for H1 and H2");
        for (const auto& pair : outcomes)
            for (const auto& ou : pair) check_utility(ou);
    }

    double utility(ActionId a, std::size_t hypothesis, double t) const {
        return utility_at(outcomes.at(a).at(hypothesis), t);
    }
};

// eu(A_i, t) = p u(A_i H1, t) + (1 - p) u(A_i H2, t)
inline double expected_utility(const DecisionProblem& dp, ActionId a, double p, double t) {
    const double u1 = dp.utility(a, 0, t);
    const double u2 = dp.utility(a, 1, t);
    return p * (u1 - u2) + u2;
}

enum class ThresholdStatus { defined, parallel, outside_unit_interval };

struct ThresholdReport {
    ThresholdStatus status = ThresholdStatus::parallel;
    std::optional<double> p_star;
    // Better action for p above the crossing (for parallel lines: the action
    // that is better everywhere, ties to the first of the pair).
    ActionId favored_above = 0;
    ActionId favored_below = 0;

    bool defined() const noexcept { return p_star.has_value(); }
};

inline const char* to_string(ThresholdStatus s) {
    switch (s) {
        case ThresholdStatus::defined: return "defined";
        case ThresholdStatus::parallel: return "none: parallel";
        case ThresholdStatus::outside_unit_interval: return "none: outside [0,1]";
    }
    return "?";
}

inline ThresholdReport threshold_pstar(const DecisionProblem& dp, ActionId i, ActionId j, double t) {
    const double ui1 = dp.utility(i, 0, t), ui2 = dp.utility(i, 1, t);
    const double uj1 = dp.utility(j, 0, t), uj2 = dp.utility(j, 1, t);
    const double slope_i = ui1 - ui2;
    const double slope_j = uj1 - uj2;
    const double denom = slope_i - slope_j;

    ThresholdReport report;
    if (std::abs(denom) < kParallelTolerance) {
        report.status = ThresholdStatus::parallel;
        report.favored_above = report.favored_below = (uj1 > ui1) ? j : i;
        return report;
    }
    // Orientation comes from the utilities: the steeper line has the larger
    // eu at p = 1, so it wins above the crossing.
    report.favored_above = slope_i > slope_j ? i : j;
    report.favored_below = slope_i > slope_j ? j : i;
    const double p = (uj2 - ui2) / denom;
    if (!(p >= 0.0 && p <= 1.0)) {
        report.status = ThresholdStatus::outside_unit_interval;
        return report;
    }
    report.status = ThresholdStatus::defined;
    report.p_star = p;
    return report;
}

// argmax_i eu(A_i, p, t); ties to the lowest index.
inline ActionId best_action_at(const DecisionProblem& dp, double p, double t) {
    ActionId best = 0;
    double best_eu = expected_utility(dp, 0, p, t);
    for (ActionId a = 1; a < dp.action_count(); ++a) {
        const double eu = expected_utility(dp, a, p, t);
        if (eu > best_eu) {
            best_eu = eu;
            best = a;
        }
    }
    return best;
}

inline double max_expected_utility(const DecisionProblem& dp, double p, double t) {
    return expected_utility(dp, best_action_at(dp, p, t), p, t);
}

// Acting at the mean of the uniform reading of the interval; by linearity
// this maximizes eu averaged over the interval as well.
inline ActionId act_at_mean(const DecisionProblem& dp, const ProbabilityBounds& bounds, double t) {
    return best_action_at(dp, bounds.mean(), t);
}

// Two-action dominance over [lb, ub]: the action at least as good at both
// endpoints and strictly better at one.
inline std::optional<ActionId> check_dominance(const DecisionProblem& dp, ActionId i, ActionId j,
                                               const ProbabilityBounds& bounds, double t) {
    const double di_lb = expected_utility(dp, i, bounds.lb, t) - expected_utility(dp, j, bounds.lb, t);
    const double di_ub = expected_utility(dp, i, bounds.ub, t) - expected_utility(dp, j, bounds.ub, t);
    if (di_lb >= 0.0 && di_ub >= 0.0 && (di_lb > 0.0 || di_ub > 0.0)) return i;
    if (di_lb <= 0.0 && di_ub <= 0.0 && (di_lb < 0.0 || di_ub < 0.0)) return j;
    return std::nullopt;
}

inline std::optional<ActionId> check_dominance(const DecisionProblem& dp, const ProbabilityBounds& bounds, double t) {
    if (dp.action_count() != 2) throw Error("dominance check needs exactly 2 actions");
    return check_dominance(dp, 0, 1, bounds, t);
}

// E[max_i eu(A_i, p, t)] for p ~ Uniform(lb, ub), exact: the upper envelope
// is piecewise linear with breaks only where two lines cross.
inline double expected_max_utility_uniform(const DecisionProblem& dp, const ProbabilityBounds& bounds, double t) {
    const double lb = bounds.lb, ub = bounds.ub;
    if (!(ub > lb)) return max_expected_utility(dp, lb, t);

    std::vector<double> cuts{lb, ub};
    for (ActionId i = 0; i < dp.action_count(); ++i) {
        for (ActionId j = i + 1; j < dp.action_count(); ++j) {
            const double si = dp.utility(i, 0, t) - dp.utility(i, 1, t);
            const double sj = dp.utility(j, 0, t) - dp.utility(j, 1, t);
            const double denom = si - sj;
            if (std::abs(denom) < kParallelTolerance) continue;
            const double p = (dp.utility(j, 1, t) - dp.utility(i, 1, t)) / denom;
            if (p > lb && p < ub) cuts.push_back(p);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (!(b > a)) continue;
        const ActionId best = best_action_at(dp, 0.5 * (a + b), t);
        integral += 0.5 * (b - a) * (expected_utility(dp, best, a, t) + expected_utility(dp, best, b, t));
    }
    return integral / (ub - lb);
}

}  // namespace delib
