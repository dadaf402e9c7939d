#pragma once

// The run loop: metareason, then refine, until dominance, exhaustion or a
// nonpositive EVC. Metareasoning happens before the first inference step so
// a reflex action is possible.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "delib/bounded_conditioning.hpp"
#include "delib/decision.hpp"
#include "delib/elimination.hpp"
#include "delib/io/trace.hpp"
#include "delib/meta.hpp"
#include "delib/problem.hpp"

namespace delib {

enum class RunHalt { dominant, evc_nonpositive, exhausted };

inline const char* to_string(RunHalt h) {
    switch (h) {
        case RunHalt::dominant: return "dominant";
        case RunHalt::evc_nonpositive: return "evc-nonpositive";
        case RunHalt::exhausted: return "exhausted";
    }
    return "?";
}

struct RunConfig {
    std::optional<double> cost_per_instantiation;  // overrides the problem's clock
    std::optional<double> meta_cost;
    bool compute_exact = true;
    std::string network_label;
    std::string problem_label;
    std::uint64_t seed = 0;
    SessionOptions session;
};

struct RunResult {
    std::string recommendation;
    ActionId action = 0;
    RunHalt halt_reason = RunHalt::exhausted;
    std::size_t halt_step = 0;
    double halt_vtime = 0.0;
    ProbabilityBounds final_bounds;
    std::optional<double> exact_posterior;
    std::size_t schedule_length = 0;
    io::TraceFile trace;
    DecisionProblem decision;  // after customization
    std::vector<RuleOutcome> customization;
};

inline VirtualClock clock_for(const DecisionProblemSpec& spec, const RunConfig& config) {
    ClockConfig c = spec.clock;
    if (config.cost_per_instantiation) c.cost_per_instantiation = {*config.cost_per_instantiation};
    if (config.meta_cost) c.meta_cost = *config.meta_cost;
    return c.make_clock();
}

inline RunResult run_case(const BeliefNetwork& net, const DecisionProblemSpec& spec, const Policy& policy,
                          const RunConfig& config = {}) {
    auto bound = bind_problem(net, spec);
    const DecisionProblem& dp = bound.decision;
    if (dp.action_count() != 2) throw ValidationError("the controller needs exactly 2 actions");

    VirtualClock clock = clock_for(spec, config);
    const bool charges_meta = policy.kind != Policy::Kind::dominance_only;
    for (double c : clock.step_costs())
        if (!(c + (charges_meta ? clock.meta_cost() : 0.0) > 0.0))
            throw ValidationError("virtual clock must advance on every step: cost per instantiation must be > 0");

    InferenceSession session = init_session(net, bound.evidence, bound.query, std::move(clock), config.session);

    RunResult result;
    result.decision = dp;
    result.customization = bound.customization.report;
    result.schedule_length = session.schedule().size();
    result.trace.network = config.network_label;
    result.trace.problem = config.problem_label;
    result.trace.policy = policy.name();
    result.trace.seed = config.seed;

    for (;;) {
        const double t = session.clock().now();
        const ControlDecision d = step_decision(dp, session, t, policy);
        const auto& b = session.bounds();

        io::TraceRecord rec;
        rec.step = session.cursor();
        rec.vtime = t;
        rec.lb = b.lb;
        rec.ub = b.ub;
        rec.mean = std::clamp(b.mean(), b.lb, b.ub);
        rec.pstar = threshold_pstar(dp, 0, 1, t).p_star;
        if (d.evc) rec.evc = d.evc->evc;
        rec.candidate_action = dp.actions[d.action];

        bool stop = true;
        switch (d.kind) {
            case ControlDecision::Kind::dominant:
                rec.status = io::TraceStatus::dominant;
                result.halt_reason = RunHalt::dominant;
                break;
            case ControlDecision::Kind::halt:
                if (*d.reason == HaltReason::exhausted) {
                    rec.status = io::TraceStatus::exhausted;
                    result.halt_reason = RunHalt::exhausted;
                } else {
                    rec.status = session.cursor() == 0 ? io::TraceStatus::reflex : io::TraceStatus::halt_evc;
                    result.halt_reason = RunHalt::evc_nonpositive;
                }
                break;
            case ControlDecision::Kind::proceed:
                rec.status = io::TraceStatus::proceed;
                stop = false;
                break;
        }
        result.trace.records.push_back(std::move(rec));
        if (d.evc) session.clock().advance(d.evc->clock_charge);

        if (stop) {
            if (result.halt_reason == RunHalt::exhausted && session.processed_evidence_mass() == 0.0)
                throw ZeroEvidenceError();
            result.action = d.action;
            result.recommendation = dp.actions[d.action];
            result.halt_step = session.cursor();
            result.halt_vtime = t;
            result.final_bounds = b;
            break;
        }
        session.refine();
    }

    if (config.compute_exact) result.exact_posterior = exact_posterior(net, bound.query, bound.evidence);
    return result;
}

namespace detail {

inline std::string plot_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string plot_number(const std::optional<double>& x) { return x ? plot_number(*x) : std::string("nan"); }

inline std::string column_name(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }, '_');
    return s;
}

}  // namespace detail

inline constexpr std::size_t kPlotProbabilitySteps = 100;

// Three whitespace tables separated by two blank lines (gnuplot 'index').
inline std::string emit_plot_data(const io::TraceFile& trace, const DecisionProblem& dp) {
    if (trace.records.empty()) throw Error("empty trace");
    if (dp.action_count() != 2) throw Error("plot tables need exactly 2 actions");
    using detail::plot_number;
    const std::string a1 = detail::column_name(dp.actions[0]);
    const std::string a2 = detail::column_name(dp.actions[1]);
    std::ostringstream out;

    out << "# table 1: bounds and threshold over virtual time\n";
    out << "# vtime lb ub pstar\n";
    for (const auto& r : trace.records)
        out << plot_number(r.vtime) << ' ' << plot_number(r.lb) << ' ' << plot_number(r.ub) << ' '
            << plot_number(r.pstar) << '\n';

    out << "\n\n# table 2: outcome utilities over virtual time\n";
    out << "# vtime u(" << a1 << ",H1) u(" << a1 << ",H2) u(" << a2 << ",H1) u(" << a2 << ",H2)\n";
    for (const auto& r : trace.records)
        out << plot_number(r.vtime) << ' ' << plot_number(dp.utility(0, 0, r.vtime)) << ' '
            << plot_number(dp.utility(0, 1, r.vtime)) << ' ' << plot_number(dp.utility(1, 0, r.vtime)) << ' '
            << plot_number(dp.utility(1, 1, r.vtime)) << '\n';

    const auto& last = trace.records.back();
    const double t0 = 0.0;
    const double th = last.vtime;
    struct Row {
        double p;
        std::string marker;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i <= kPlotProbabilitySteps; ++i)
        rows.push_back({static_cast<double>(i) / static_cast<double>(kPlotProbabilitySteps), "-"});
    rows.push_back({last.lb, "lb"});
    rows.push_back({last.ub, "ub"});
    rows.push_back({last.mean, "mean"});
    if (auto ps = threshold_pstar(dp, 0, 1, th).p_star) rows.push_back({*ps, "pstar"});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.p < y.p; });

    out << "\n\n# table 3: expected utility against p at t=" << plot_number(t0) << " and at halt t="
        << plot_number(th) << "\n";
    out << "# p eu(" << a1 << ",t0) eu(" << a2 << ",t0) eu(" << a1 << ",halt) eu(" << a2 << ",halt) marker\n";
    for (const auto& row : rows)
        out << plot_number(row.p) << ' ' << plot_number(expected_utility(dp, 0, row.p, t0)) << ' '
            << plot_number(expected_utility(dp, 1, row.p, t0)) << ' '
            << plot_number(expected_utility(dp, 0, row.p, th)) << ' '
            << plot_number(expected_utility(dp, 1, row.p, th)) << ' ' << row.marker << '\n';
    return out.str();
}

inline std::string emit_plot_data(const RunResult& result) { return emit_plot_data(result.trace, result.decision); }

}  // namespace delib
