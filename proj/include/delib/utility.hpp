#pragma once

// Time-dependent utility of outcomes. Utilities are nonnegative and
// micromort-denominated (larger is better); delay is expressed as decay of
// u(t), never as negative values.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "delib/errors.hpp"

namespace delib {

inline constexpr double kMicromort = 1e-6;

struct ConstantDecay {
    bool operator==(const ConstantDecay&) const = default;
};

struct ExponentialDecay {
    double rate = 0.0;  // per second
    bool operator==(const ExponentialDecay&) const = default;
};

struct LinearDecay {
    double slope = 0.0;  // utility lost per second
    double floor = 0.0;
    bool operator==(const LinearDecay&) const = default;
};

using SimpleDecay = std::variant<ConstantDecay, ExponentialDecay, LinearDecay>;

struct DecaySegment {
    double start = 0.0;
    SimpleDecay law;
    bool operator==(const DecaySegment&) const = default;
};

// Laws chained in time. Each segment continues from the value reached at its
// start, so the curve is continuous.
struct PiecewiseDecay {
    std::vector<DecaySegment> segments;
    bool operator==(const PiecewiseDecay&) const = default;
};

using Decay = std::variant<ConstantDecay, ExponentialDecay, LinearDecay, PiecewiseDecay>;

struct OutcomeUtility {
    double u0 = 0.0;
    Decay decay = ConstantDecay{};
    bool operator==(const OutcomeUtility&) const = default;
};

namespace detail {

inline void check_simple(const SimpleDecay& law) {
    if (auto e = std::get_if<ExponentialDecay>(&law); e && !(e->rate >= 0.0))
        throw Error("exponential decay rate must be >= 0");
    if (auto l = std::get_if<LinearDecay>(&law)) {
        if (!(l->slope >= 0.0)) throw Error("linear decay slope must be >= 0");
        if (!(l->floor >= 0.0)) throw Error("linear decay floor must be >= 0");
    }
}

// Value after `dt` seconds under `law`, starting from `anchor`. A floor above
// the anchor never lifts the value.
inline double apply(const SimpleDecay& law, double anchor, double dt) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ConstantDecay>) {
                return anchor;
            } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
                return anchor * std::exp(-d.rate * dt);
            } else {
                return std::max(std::min(d.floor, anchor), anchor - d.slope * dt);
            }
        },
        law);
}

inline double flux(const SimpleDecay& law, double value, double floor_reached) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ConstantDecay>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
                return d.rate * value;
            } else {
                return floor_reached > 0.0 ? 0.0 : d.slope;
            }
        },
        law);
}

}  // namespace detail

inline void check_utility(const OutcomeUtility& ou) {
    if (!(ou.u0 >= 0.0)) throw Error("initial utility must be >= 0");
    if (auto pw = std::get_if<PiecewiseDecay>(&ou.decay)) {
        if (pw->segments.empty()) throw Error("piecewise decay needs at least one segment");
        if (pw->segments.front().start != 0.0) throw Error("piecewise decay must start at t = 0");
        for (std::size_t i = 0; i < pw->segments.size(); ++i) {
            detail::check_simple(pw->segments[i].law);
            if (i > 0 && !(pw->segments[i].start > pw->segments[i - 1].start))
                throw Error("piecewise segment starts must be strictly increasing");
        }
    } else {
        std::visit(
            [](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (!std::is_same_v<T, PiecewiseDecay>) detail::check_simple(SimpleDecay{d});
            },
            ou.decay);
    }
}

inline double utility_at(const OutcomeUtility& ou, double t) {
    if (!(t >= 0.0)) throw Error("utility queried at negative time");
    if (auto pw = std::get_if<PiecewiseDecay>(&ou.decay)) {
        double value = ou.u0;
        const auto& segs = pw->segments;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const bool last = i + 1 == segs.size() || segs[i + 1].start > t;
            const double end = last ? t : segs[i + 1].start;
            value = detail::apply(segs[i].law, value, end - segs[i].start);
            if (last) break;
        }
        return value;
    }
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PiecewiseDecay>) {
                return ou.u0;  // handled above
            } else {
                return detail::apply(SimpleDecay{d}, ou.u0, t);
            }
        },
        ou.decay);
}

// Instantaneous loss rate -du/dt in micromorts per second (right derivative).
inline double micromort_flux(const OutcomeUtility& ou, double t) {
    const double value = utility_at(ou, t);
    SimpleDecay law = ConstantDecay{};
    double floor = 0.0;
    if (auto pw = std::get_if<PiecewiseDecay>(&ou.decay)) {
        for (const auto& seg : pw->segments)
            if (seg.start <= t) law = seg.law;
    } else {
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (!std::is_same_v<T, PiecewiseDecay>) law = d;
            },
            ou.decay);
    }
    if (auto l = std::get_if<LinearDecay>(&law)) floor = value <= l->floor ? 1.0 : 0.0;
    return detail::flux(law, value, floor);
}

// ---------------------------------------------------------------------------
// Acute-challenge lottery assessments: for each treatment time t, the
// probability of instant painless death that makes the decision maker
// indifferent.

struct LotteryPoint {
    double t = 0.0;
    double p_death = 0.0;
};

struct LotteryAssessment {
    std::vector<LotteryPoint> points;

    void check() const {
        if (points.empty()) throw Error("empty lottery assessment");
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            if (!(p.t >= 0.0)) throw Error("assessment time must be >= 0");
            if (!(p.p_death >= 0.0 && p.p_death <= 1.0)) throw Error("assessed probability outside [0,1]");
            if (i > 0) {
                if (!(p.t > points[i - 1].t)) throw Error("assessment times must be strictly increasing");
                if (p.p_death < points[i - 1].p_death) throw Error("assessed death probability must not decrease");
            }
        }
    }

    // Linear interpolation between assessed points.
    double p_death_at(double t) const {
        if (points.empty() || t < points.front().t || t > points.back().t)
            throw Error("time outside the assessed range");
        auto hi = std::lower_bound(points.begin(), points.end(), t,
                                   [](const LotteryPoint& p, double x) { return p.t < x; });
        if (hi->t == t) return hi->p_death;
        auto lo = hi - 1;
        const double f = (t - lo->t) / (hi->t - lo->t);
        return lo->p_death + f * (hi->p_death - lo->p_death);
    }
};

// Utility lost by acting at tPrime instead of t, in micromorts.
inline double lottery_loss(const LotteryAssessment& a, double t, double t_prime) {
    if (!(t < t_prime)) throw Error("lottery loss needs t < t'");
    return (a.p_death_at(t_prime) - a.p_death_at(t)) / kMicromort;
}

inline double micromorts_to_dollars(double micromorts, double dollars_per_micromort) {
    if (!(dollars_per_micromort >= 0.0)) throw Error("dollars per micromort must be >= 0");
    return micromorts * dollars_per_micromort;
}

enum class DecayForm { exponential, linear };

// Least-squares fit of a decay law to assessed utilities
// u(t_i) = u0 - loss(t_0 -> t_i), anchored at u(t_0) = u0.
inline OutcomeUtility fit_decay(const LotteryAssessment& a, double u0, DecayForm form) {
    a.check();
    if (a.points.size() < 2) throw Error("fit needs at least 2 assessment points");
    if (!(u0 > 0.0)) throw Error("fit needs a positive initial utility");
    const double t0 = a.points.front().t;

    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : a.points) {
        const double dt = p.t - t0;
        const double u = u0 - (p.p_death - a.points.front().p_death) / kMicromort;
        double y = 0.0;
        if (form == DecayForm::exponential) {
            if (!(u > 0.0)) throw Error("nonpositive utility sample under exponential form");
            y = -std::log(u / u0);
        } else {
            y = u0 - u;
        }
        sxx += dt * dt;
        sxy += dt * y;
    }
    if (sxx == 0.0) throw Error("degenerate assessment: all times equal");
    const double rate = std::max(0.0, sxy / sxx);

    OutcomeUtility out;
    out.u0 = u0;
    if (form == DecayForm::exponential)
        out.decay = ExponentialDecay{rate};
    else
        out.decay = LinearDecay{rate, 0.0};
    return out;
}

// ---------------------------------------------------------------------------
// Criticality customization: deterministic rules that rewrite decay
// parameters of particular outcomes from observed vital signs.

struct OutcomeKey {
    std::string action;
    std::string state;
    auto operator<=>(const OutcomeKey&) const = default;
};

using UtilityMap = std::map<OutcomeKey, OutcomeUtility>;
using Vitals = std::map<std::string, double>;

enum class Comparator { less, less_equal, greater, greater_equal };
enum class DecayParameter { rate, slope, initial };

inline bool compare(Comparator c, double value, double threshold) {
    switch (c) {
        case Comparator::less: return value < threshold;
        case Comparator::less_equal: return value <= threshold;
        case Comparator::greater: return value > threshold;
        case Comparator::greater_equal: return value >= threshold;
    }
    return false;
}

inline const char* to_string(Comparator c) {
    switch (c) {
        case Comparator::less: return "<";
        case Comparator::less_equal: return "<=";
        case Comparator::greater: return ">";
        case Comparator::greater_equal: return ">=";
    }
    return "?";
}

inline const char* to_string(DecayParameter p) {
    switch (p) {
        case DecayParameter::rate: return "k";
        case DecayParameter::slope: return "c";
        case DecayParameter::initial: return "u0";
    }
    return "?";
}

struct CriticalityRule {
    std::string vital;
    Comparator comparator = Comparator::less;
    double threshold = 0.0;
    OutcomeKey target;
    DecayParameter parameter = DecayParameter::rate;
    double new_value = 0.0;
};

struct RuleOutcome {
    std::size_t rule = 0;
    bool applied = false;
    std::string note;
};

struct Customization {
    UtilityMap utilities;
    std::vector<RuleOutcome> report;
};

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline Customization customize(const UtilityMap& utilities, const std::vector<CriticalityRule>& rules,
                               const Vitals& vitals) {
    Customization out{utilities, {}};
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& rule = rules[i];
        RuleOutcome entry{i, false, {}};
        auto vital = vitals.find(rule.vital);
        auto target = out.utilities.find(rule.target);
        if (!(rule.new_value >= 0.0)) {
            entry.note = "new value must be >= 0";
        } else if (vital == vitals.end()) {
            entry.note = "vital '" + rule.vital + "' not observed";
        } else if (target == out.utilities.end()) {
            entry.note = "no outcome (" + rule.target.action + ", " + rule.target.state + ")";
        } else if (!compare(rule.comparator, vital->second, rule.threshold)) {
            entry.note = "condition false";
        } else {
            auto& ou = target->second;
            switch (rule.parameter) {
                case DecayParameter::initial:
                    ou.u0 = rule.new_value;
                    entry.applied = true;
                    break;
                case DecayParameter::rate:
                    if (std::holds_alternative<ExponentialDecay>(ou.decay) ||
                        std::holds_alternative<ConstantDecay>(ou.decay)) {
                        ou.decay = ExponentialDecay{rule.new_value};
                        entry.applied = true;
                    } else {
                        entry.note = "k applies only to exponential or constant decay";
                    }
                    break;
                case DecayParameter::slope:
                    if (auto l = std::get_if<LinearDecay>(&ou.decay)) {
                        l->slope = rule.new_value;
                        entry.applied = true;
                    } else if (std::holds_alternative<ConstantDecay>(ou.decay)) {
                        ou.decay = LinearDecay{rule.new_value, 0.0};
                        entry.applied = true;
                    } else {
                        entry.note = "c applies only to linear or constant decay";
                    }
                    break;
            }
        }
        if (entry.applied) {
            entry.note = rule.vital + " " + to_string(rule.comparator) + " " + format_number(rule.threshold) +
                         ": " + to_string(rule.parameter) + "(" + rule.target.action + ", " + rule.target.state +
                         ") = " + format_number(rule.new_value);
        }
        out.report.push_back(std::move(entry));
    }
    return out;
}

}  // namespace delib
