#pragma once

// A decision problem as loaded from disk, and its binding to a network.
// Outcomes are labelled H1 (the designated hypothesis state) and H2 (every
// other state of the hypothesis variable).

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "delib/bounded_conditioning.hpp"
#include "delib/decision.hpp"
#include "delib/network.hpp"
#include "delib/utility.hpp"

namespace delib {

inline constexpr const char* kH1 = "H1";
inline constexpr const char* kH2 = "H2";

struct ClockConfig {
    std::vector<double> cost_per_instantiation{1.0};
    double meta_cost = 0.05;
    double setup_factor = 0.01;

    VirtualClock make_clock() const { return VirtualClock(cost_per_instantiation, meta_cost, setup_factor); }
};

struct DecisionProblemSpec {
    std::string name;
    std::string hypothesis_variable;
    std::string hypothesis_state;
    std::vector<std::pair<std::string, std::string>> evidence;
    std::vector<std::string> actions;
    UtilityMap utilities;  // keyed by (action, "H1" | "H2")
    std::vector<CriticalityRule> rules;
    std::set<std::string> declared_vitals;
    Vitals vitals;  // observed values
    ClockConfig clock;
};

// Customized utilities arranged as a DecisionProblem.
inline DecisionProblem decision_from_spec(const DecisionProblemSpec& spec, Customization* applied = nullptr) {
    auto custom = customize(spec.utilities, spec.rules, spec.vitals);
    DecisionProblem dp;
    dp.actions = spec.actions;
    dp.h1 = spec.hypothesis_state;
    dp.h2 = "not " + spec.hypothesis_state;
    for (const auto& action : spec.actions) {
        auto h1 = custom.utilities.find({action, kH1});
        auto h2 = custom.utilities.find({action, kH2});
        if (h1 == custom.utilities.end() || h2 == custom.utilities.end())
            throw ValidationError("action '" + action + "' lacks a utility for H1 or H2");
        dp.outcomes.push_back({h1->second, h2->second});
    }
    dp.check();
    if (applied) *applied = std::move(custom);
    return dp;
}

struct BoundProblem {
    DecisionProblem decision;
    Query query;
    Evidence evidence;
    Customization customization;
};

inline BoundProblem bind_problem(const BeliefNetwork& net, const DecisionProblemSpec& spec) {
    BoundProblem out;
    out.decision = decision_from_spec(spec, &out.customization);
    auto var = net.find(spec.hypothesis_variable);
    if (!var) throw ValidationError("hypothesis variable '" + spec.hypothesis_variable + "' not in network");
    auto state = net[*var].find_state(spec.hypothesis_state);
    if (!state)
        throw ValidationError("hypothesis variable '" + spec.hypothesis_variable + "' has no state '" +
                              spec.hypothesis_state + "'");
    out.query = {*var, *state};
    for (const auto& [vname, sname] : spec.evidence) {
        auto v = net.find(vname);
        if (!v) throw ValidationError("evidence variable '" + vname + "' not in network");
        auto s = net[*v].find_state(sname);
        if (!s) throw ValidationError("evidence variable '" + vname + "' has no state '" + sname + "'");
        if (auto prior = out.evidence.get(*v); prior && *prior != *s)
            throw ValidationError("conflicting evidence on '" + vname + "'");
        out.evidence.set(*v, *s);
    }
    return out;
}

}  // namespace delib
