#pragma once

// Brute-force posterior by summing the chain-rule joint over every full
// assignment. Only usable on small networks; serves as ground truth.

#include <cstddef>
#include <vector>

#include "delib/network.hpp"

namespace delib {

inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

struct Query {
    VarId variable = 0;
    StateId state = 0;
    bool operator==(const Query&) const = default;
};

inline std::size_t state_space_size(const BeliefNetwork& net, std::size_t cap) {
    std::size_t total = 1;
    for (const auto& v : net.variables) {
        total *= v.cardinality();
        if (total > cap) return cap + 1;
    }
    return total;
}

inline double exact_posterior_enumeration(const BeliefNetwork& net, Query query, const Evidence& evidence,
                                          std::size_t cap = kEnumerationCap) {
    check_evidence(net, evidence);
    if (query.variable >= net.size() || query.state >= net.cardinality(query.variable))
        throw Error("query out of range");
    if (state_space_size(net, cap) > cap) throw CapacityError("state space too large");

    std::vector<std::size_t> radix(net.size());
    for (VarId v = 0; v < net.size(); ++v) radix[v] = net.cardinality(v);
    std::vector<StateId> assignment(net.size(), 0);

    double numerator = 0.0;
    double denominator = 0.0;
    do {
        bool consistent = true;
        for (auto [v, s] : evidence) {
            if (assignment[v] != s) {
                consistent = false;
                break;
            }
        }
        if (!consistent) continue;
        const double p = joint_probability(net, assignment);
        denominator += p;
        if (assignment[query.variable] == query.state) numerator += p;
    } while (next_assignment(assignment, radix));

    if (denominator == 0.0) throw ZeroEvidenceError();
    return numerator / denominator;
}

}  // namespace delib
