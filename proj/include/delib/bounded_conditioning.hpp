#pragma once

// Bounded conditioning: the posterior p(H1|E) is a ratio of sums over loop
// cutset instantiations. Processing instantiations one at a time in
// descending prior mass yields an interval that narrows monotonically and
// collapses to the exact value once every instantiation is solved.
//
//   A = sum of p(H1, c, E) over processed c
//   B = sum of p(c, E)     over processed c
//   R = sum of p(c)        over unprocessed c
//
// Unprocessed instantiations contribute between 0 and p(c) to both the
// numerator and the denominator, so p(H1|E) lies in [A/(B+R), (A+R)/(B+R)].

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <vector>

#include "delib/cutset.hpp"
#include "delib/elimination.hpp"
#include "delib/errors.hpp"
#include "delib/network.hpp"

namespace delib {

struct ProbabilityBounds {
    double lb = 0.0;
    double ub = 1.0;

    double width() const noexcept { return ub - lb; }
    double mean() const noexcept { return 0.5 * (lb + ub); }
    bool contains(double p) const noexcept { return lb <= p && p <= ub; }
    bool operator==(const ProbabilityBounds&) const = default;
};

// Deterministic simulated time. Step costs may vary by schedule index; the
// last entry repeats past the end of the sequence.
class VirtualClock {
public:
    explicit VirtualClock(double cost_per_instantiation = 1.0, double meta_cost = 0.05, double setup_factor = 0.01)
        : VirtualClock(std::vector<double>{cost_per_instantiation}, meta_cost, setup_factor) {}

    VirtualClock(std::vector<double> step_costs, double meta_cost, double setup_factor = 0.01)
        : step_costs_(std::move(step_costs)), meta_cost_(meta_cost), setup_factor_(setup_factor) {
        if (step_costs_.empty()) throw Error("clock needs at least one step cost");
        for (double c : step_costs_)
            if (!(c >= 0.0)) throw Error("step cost must be >= 0");
        if (!(meta_cost_ >= 0.0)) throw Error("metareasoning cost must be >= 0");
        if (!(setup_factor_ >= 0.0)) throw Error("setup factor must be >= 0");
    }

    double now() const noexcept { return now_; }
    double meta_cost() const noexcept { return meta_cost_; }
    double setup_factor() const noexcept { return setup_factor_; }
    const std::vector<double>& step_costs() const noexcept { return step_costs_; }

    double step_cost(std::size_t index) const {
        return index < step_costs_.size() ? step_costs_[index] : step_costs_.back();
    }

    void advance(double dt) {
        if (!(dt >= 0.0)) throw Error("clock cannot move backwards");
        now_ += dt;
    }

private:
    std::vector<double> step_costs_;
    double meta_cost_;
    double setup_factor_;
    double now_ = 0.0;
};

struct CutsetInstantiation {
    std::vector<StateId> states;  // aligned with InferenceSession::cutset()
    double prior_mass = 0.0;
};

struct ConditionedMasses {
    double evidence_mass = 0.0;  // p(c, E)
    double query_mass = 0.0;     // p(H1, c, E)
};

// Exact p(c,E) and p(H1,c,E) with the clamped variables treated as extra
// evidence. A clamp that contradicts the evidence yields (0, 0).
inline ConditionedMasses solve_conditioned(const BeliefNetwork& net, const Evidence& evidence,
                                           const Evidence& clamped, Query query) {
    Evidence combined = evidence;
    for (auto [v, s] : clamped) {
        if (auto observed = evidence.get(v); observed && *observed != s) return {};
        combined.set(v, s);
    }
    const auto joint = query_joint(net, combined, query.variable);
    ConditionedMasses out;
    out.evidence_mass = std::accumulate(joint.begin(), joint.end(), 0.0);
    out.query_mass = joint.at(query.state);
    return out;
}

struct SessionOptions {
    std::size_t instantiation_cap = 1'000'000;
};

class InferenceSession {
public:
    InferenceSession(BeliefNetwork net, Evidence evidence, Query query, VirtualClock clock,
                     SessionOptions options = {})
        : net_(std::move(net)), evidence_(std::move(evidence)), query_(query), clock_(std::move(clock)) {
        require_valid(net_);
        check_evidence(net_, evidence_);
        if (query_.variable >= net_.size() || query_.state >= net_.cardinality(query_.variable))
            throw Error("query out of range");

        auto cut = find_loop_cutset(net_);
        cutset_.assign(cut.begin(), cut.end());
        if (instantiation_count(net_, cut) > options.instantiation_cap)
            throw CapacityError("cutset has " + std::to_string(instantiation_count(net_, cut)) +
                                " instantiations, cap is " + std::to_string(options.instantiation_cap));

        const Factor prior = joint_marginal(net_, Evidence{}, cutset_);
        std::vector<StateId> digits(cutset_.size(), 0);
        std::size_t idx = 0;
        do {
            schedule_.push_back({digits, prior.values[idx++]});
        } while (next_assignment(digits, prior.cards));
        std::stable_sort(schedule_.begin(), schedule_.end(),
                         [](const CutsetInstantiation& a, const CutsetInstantiation& b) {
                             return a.prior_mass > b.prior_mass;
                         });

        remaining_.assign(schedule_.size() + 1, 0.0);
        for (std::size_t i = schedule_.size(); i-- > 0;) remaining_[i] = remaining_[i + 1] + schedule_[i].prior_mass;

        double setup = 0.0;
        for (std::size_t i = 0; i < schedule_.size(); ++i) setup += clock_.step_cost(i);
        clock_.advance(setup * clock_.setup_factor());
    }

    const BeliefNetwork& network() const noexcept { return net_; }
    const Evidence& evidence() const noexcept { return evidence_; }
    Query query() const noexcept { return query_; }
    const std::vector<VarId>& cutset() const noexcept { return cutset_; }
    const std::vector<CutsetInstantiation>& schedule() const noexcept { return schedule_; }
    std::size_t cursor() const noexcept { return cursor_; }
    std::size_t remaining_steps() const noexcept { return schedule_.size() - cursor_; }
    bool exhausted() const noexcept { return cursor_ == schedule_.size(); }

    double processed_query_mass() const noexcept { return a_; }
    double processed_evidence_mass() const noexcept { return b_; }
    double remaining_prior_mass() const noexcept { return remaining_[cursor_]; }
    // Prior mass still unprocessed after `steps` more steps.
    double remaining_prior_mass_after(std::size_t steps) const { return remaining_.at(cursor_ + steps); }
    double processed_prior_mass() const noexcept { return remaining_.front() - remaining_[cursor_]; }
    double total_prior_mass() const noexcept { return remaining_.front(); }

    const ProbabilityBounds& bounds() const noexcept { return bounds_; }
    const VirtualClock& clock() const noexcept { return clock_; }
    VirtualClock& clock() noexcept { return clock_; }

    Evidence clamp_of(const CutsetInstantiation& inst) const {
        Evidence c;
        for (std::size_t i = 0; i < cutset_.size(); ++i) c.set(cutset_[i], inst.states[i]);
        return c;
    }

    const ProbabilityBounds& refine() {
        if (exhausted()) throw Error("session exhausted");
        const auto& inst = schedule_[cursor_];
        const auto masses = solve_conditioned(net_, evidence_, clamp_of(inst), query_);
        a_ += masses.query_mass;
        b_ += masses.evidence_mass;
        clock_.advance(clock_.step_cost(cursor_));
        ++cursor_;
        tighten();
        return bounds_;
    }

private:
    // Intersect with the previous interval so rounding can never widen it.
    void tighten() {
        const double r = remaining_[cursor_];
        if (exhausted()) {
            if (b_ > 0.0) {
                const double point = std::clamp(a_ / b_, bounds_.lb, bounds_.ub);
                bounds_ = {point, point};
            }
            return;
        }
        if (b_ + r <= 0.0) return;
        const ProbabilityBounds raw{a_ / (b_ + r), (a_ + r) / (b_ + r)};
        ProbabilityBounds next{std::max(bounds_.lb, raw.lb), std::min(bounds_.ub, raw.ub)};
        if (next.lb > next.ub) {
            const double v = std::clamp(raw.mean(), bounds_.lb, bounds_.ub);
            next = {v, v};
        }
        bounds_ = next;
    }

    BeliefNetwork net_;
    Evidence evidence_;
    Query query_;
    VirtualClock clock_;
    std::vector<VarId> cutset_;
    std::vector<CutsetInstantiation> schedule_;
    std::vector<double> remaining_;  // suffix sums of prior mass; remaining_[n] == 0
    std::size_t cursor_ = 0;
    double a_ = 0.0;
    double b_ = 0.0;
    ProbabilityBounds bounds_;
};

inline InferenceSession init_session(BeliefNetwork net, Evidence evidence, Query query, VirtualClock clock = VirtualClock{},
                                     SessionOptions options = {}) {
    return InferenceSession(std::move(net), std::move(evidence), query, std::move(clock), options);
}

inline ProbabilityBounds refine_step(InferenceSession& session) { return session.refine(); }

// Steps to exhaustion and returns the collapsed point value.
inline double run_to_convergence(InferenceSession& session) {
    while (!session.exhausted()) session.refine();
    if (session.processed_evidence_mass() == 0.0) throw ZeroEvidenceError();
    return session.bounds().lb;
}

}  // namespace delib
