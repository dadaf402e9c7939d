#pragma once

// Metareasoning over a bounded-conditioning session: predicted refinement,
// the expected value of computation under a uniform reading of the bounds
// (EVC/BC), and the continue / halt / dominant decision.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "delib/bounded_conditioning.hpp"
#include "delib/decision.hpp"
#include "delib/errors.hpp"

namespace delib {

struct RefinementPrediction {
    std::size_t horizon = 0;
    double predicted_lb = 0.0;
    double predicted_ub = 1.0;
    double predicted_width = 1.0;
};

// Bounds expected after `horizon` more steps. The next instantiations' prior
// masses are known; their evidence masses are extrapolated with the
// likelihood ratio B/P seen so far (1 before any step).
inline RefinementPrediction predict_bounds(const InferenceSession& session, std::size_t horizon) {
    if (horizon == 0) throw Error("prediction horizon must be >= 1");
    if (horizon > session.remaining_steps())
        throw Error("prediction horizon " + std::to_string(horizon) + " exceeds the " +
                    std::to_string(session.remaining_steps()) + " remaining steps");

    const auto& now = session.bounds();
    const double a = session.processed_query_mass();
    const double b = session.processed_evidence_mass();
    const double r = session.remaining_prior_mass();
    const double processed = session.processed_prior_mass();
    const double r_next = session.remaining_prior_mass_after(horizon);
    const double mass = r - r_next;

    const double likelihood = processed > 0.0 ? b / processed : 1.0;
    const double query_share = b > 0.0 ? a / b : now.mean();
    const double b_next = b + likelihood * mass;
    const double a_next = a + query_share * (b_next - b);

    RefinementPrediction out{horizon, now.lb, now.ub, now.width()};
    const double denom = b_next + r_next;
    if (!(denom > 0.0) || (b_next == 0.0 && r_next == 0.0)) return out;
    out.predicted_width = std::min(now.width(), r_next / denom);
    out.predicted_lb = std::clamp(a_next / denom, 0.0, 1.0);
    out.predicted_ub = std::clamp(out.predicted_lb + out.predicted_width, out.predicted_lb, 1.0);
    return out;
}

struct EvcReport {
    double evc = 0.0;
    std::size_t horizon = 1;
    double act_now_eu = 0.0;
    double informed_eu = 0.0;
    double delayed_mean_eu = 0.0;
    double resolved_fraction = 0.0;  // lambda
    double delay = 0.0;              // compute + metareasoning time assumed
    double clock_charge = 0.0;       // metareasoning time to charge the clock
};

namespace detail {

inline EvcReport evc_for_horizon(const DecisionProblem& dp, const InferenceSession& session, double t,
                                 std::size_t horizon, double compute_time, double meta_cost) {
    const auto& b = session.bounds();
    const double w = b.width();
    const double w_next = predict_bounds(session, horizon).predicted_width;

    EvcReport r;
    r.horizon = horizon;
    r.delay = compute_time + meta_cost;
    r.clock_charge = meta_cost;
    r.resolved_fraction = w > 0.0 ? 1.0 - w_next / w : 0.0;
    r.act_now_eu = max_expected_utility(dp, b.mean(), t);
    r.informed_eu = expected_max_utility_uniform(dp, b, t + r.delay);
    r.delayed_mean_eu = max_expected_utility(dp, b.mean(), t + r.delay);
    r.evc = r.resolved_fraction * r.informed_eu + (1.0 - r.resolved_fraction) * r.delayed_mean_eu - r.act_now_eu;
    return r;
}

}  // namespace detail

inline EvcReport evc_myopic(const DecisionProblem& dp, const InferenceSession& session, double t, double step_cost,
                            double meta_cost) {
    if (session.exhausted()) throw Error("session exhausted");
    return detail::evc_for_horizon(dp, session, t, 1, step_cost, meta_cost);
}

// Costs taken from the session's clock.
inline EvcReport evc_myopic(const DecisionProblem& dp, const InferenceSession& session, double t) {
    const auto& clock = session.clock();
    return evc_myopic(dp, session, t, clock.step_cost(session.cursor()), clock.meta_cost());
}

// Best EVC over horizons 1..k, each assuming action after h more steps.
inline EvcReport evc_lookahead(const DecisionProblem& dp, const InferenceSession& session, double t, std::size_t k,
                               const VirtualClock& costs) {
    if (session.exhausted()) throw Error("session exhausted");
    if (k == 0) throw Error("lookahead horizon must be >= 1");
    const std::size_t limit = std::min(k, session.remaining_steps());
    EvcReport best;
    double compute = 0.0;
    for (std::size_t h = 1; h <= limit; ++h) {
        compute += costs.step_cost(session.cursor() + h - 1);
        auto r = detail::evc_for_horizon(dp, session, t, h, compute, costs.meta_cost());
        if (h == 1 || r.evc > best.evc) best = r;
    }
    return best;
}

inline EvcReport evc_lookahead(const DecisionProblem& dp, const InferenceSession& session, double t, std::size_t k) {
    return evc_lookahead(dp, session, t, k, session.clock());
}

struct Policy {
    enum class Kind { myopic, lookahead, dominance_only };
    Kind kind = Kind::myopic;
    std::size_t horizon = 1;

    static Policy myopic() { return {Kind::myopic, 1}; }
    static Policy lookahead(std::size_t k) {
        if (k < 2) throw Error("lookahead horizon must be >= 2");
        return {Kind::lookahead, k};
    }
    static Policy dominance_only() { return {Kind::dominance_only, 0}; }

    // "myopic", "lookahead:K" (K >= 2) or "dominance-only".
    static Policy parse(std::string_view text) {
        if (text == "myopic") return myopic();
        if (text == "dominance-only") return dominance_only();
        constexpr std::string_view prefix = "lookahead:";
        if (text.substr(0, prefix.size()) == prefix) {
            const auto digits = text.substr(prefix.size());
            std::size_t k = 0;
            if (digits.empty() || digits.size() > 6 ||
                digits.find_first_not_of("0123456789") != std::string_view::npos)
                throw Error("invalid lookahead horizon '" + std::string(digits) + "'");
            for (char c : digits) k = k * 10 + static_cast<std::size_t>(c - '0');
            return lookahead(k);
        }
        throw Error("unknown policy '" + std::string(text) + "' (myopic | lookahead:K | dominance-only)");
    }

    std::string name() const {
        switch (kind) {
            case Kind::myopic: return "myopic";
            case Kind::lookahead: return "lookahead:" + std::to_string(horizon);
            case Kind::dominance_only: return "dominance-only";
        }
        return "?";
    }
};

enum class HaltReason { evc_nonpositive, exhausted };

struct ControlDecision {
    enum class Kind { proceed, halt, dominant };
    Kind kind = Kind::proceed;
    ActionId action = 0;  // candidate (act at mean) when continuing
    std::optional<HaltReason> reason;
    std::optional<EvcReport> evc;
};

// Action that is at least as good as every other at both interval endpoints
// and strictly better than each at one of them.
inline std::optional<ActionId> dominant_action(const DecisionProblem& dp, const ProbabilityBounds& bounds, double t) {
    for (ActionId a = 0; a < dp.action_count(); ++a) {
        bool dominates = true;
        for (ActionId o = 0; o < dp.action_count() && dominates; ++o)
            if (o != a) dominates = check_dominance(dp, a, o, bounds, t) == a;
        if (dominates) return a;
    }
    return std::nullopt;
}

// Checks in order: dominance, exhaustion, EVC <= 0, otherwise continue.
inline ControlDecision step_decision(const DecisionProblem& dp, const InferenceSession& session, double t,
                                     const Policy& policy) {
    const auto& bounds = session.bounds();
    ControlDecision d;
    d.action = act_at_mean(dp, bounds, t);
    if (auto a = dominant_action(dp, bounds, t)) {
        d.kind = ControlDecision::Kind::dominant;
        d.action = *a;
        return d;
    }
    if (session.exhausted()) {
        d.kind = ControlDecision::Kind::halt;
        d.reason = HaltReason::exhausted;
        return d;
    }
    if (policy.kind == Policy::Kind::dominance_only) return d;

    d.evc = policy.kind == Policy::Kind::lookahead ? evc_lookahead(dp, session, t, policy.horizon)
                                                   : evc_myopic(dp, session, t);
    if (d.evc->evc <= 0.0) {
        d.kind = ControlDecision::Kind::halt;
        d.reason = HaltReason::evc_nonpositive;
    }
    return d;
}

}  // namespace delib
