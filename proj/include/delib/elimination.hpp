#pragma once

// Exact inference by variable elimination over table factors. Works on any
// DAG; barren variables (not ancestors of the query or evidence) are pruned
// before elimination.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "delib/enumeration.hpp"
#include "delib/network.hpp"

namespace delib {

struct Factor {
    std::vector<VarId> vars;  // ascending
    std::vector<std::size_t> cards;
    std::vector<double> values;  // row-major, last variable fastest

    std::size_t position(VarId v) const {
        auto it = std::lower_bound(vars.begin(), vars.end(), v);
        return (it != vars.end() && *it == v) ? static_cast<std::size_t>(it - vars.begin()) : vars.size();
    }
    bool contains(VarId v) const { return position(v) != vars.size(); }
};

namespace detail {

inline std::vector<std::size_t> strides_in(const Factor& f, const std::vector<VarId>& scope) {
    std::vector<std::size_t> own(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
        own[i] = s;
        s *= f.cards[i];
    }
    std::vector<std::size_t> out(scope.size(), 0);
    for (std::size_t i = 0; i < scope.size(); ++i) {
        std::size_t p = f.position(scope[i]);
        if (p != f.vars.size()) out[i] = own[p];
    }
    return out;
}

inline Factor cpt_factor(const BeliefNetwork& net, VarId v, const Evidence& ev) {
    const auto& var = net.variables[v];
    std::vector<VarId> family = var.parents;
    family.push_back(v);

    Factor f;
    for (VarId u : family)
        if (!ev.contains(u)) f.vars.push_back(u);
    std::sort(f.vars.begin(), f.vars.end());
    for (VarId u : f.vars) f.cards.push_back(net.cardinality(u));
    std::size_t total = 1;
    for (auto c : f.cards) total *= c;
    f.values.resize(total);

    std::vector<StateId> states(net.size(), 0);
    for (auto [u, s] : ev) states[u] = s;
    std::vector<StateId> digits(f.vars.size(), 0);
    std::size_t idx = 0;
    do {
        for (std::size_t i = 0; i < f.vars.size(); ++i) states[f.vars[i]] = digits[i];
        f.values[idx++] = net.conditional(v, states);
    } while (next_assignment(digits, f.cards));
    return f;
}

inline Factor multiply(const Factor& a, const Factor& b) {
    Factor r;
    std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(r.vars));
    std::size_t total = 1;
    for (VarId v : r.vars) {
        std::size_t p = a.position(v);
        std::size_t c = p != a.vars.size() ? a.cards[p] : b.cards[b.position(v)];
        r.cards.push_back(c);
        total *= c;
    }
    r.values.resize(total);
    const auto sa = strides_in(a, r.vars);
    const auto sb = strides_in(b, r.vars);
    std::vector<StateId> digits(r.vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < total; ++i) {
        r.values[i] = a.values[ia] * b.values[ib];
        for (std::size_t d = r.vars.size(); d-- > 0;) {
            if (++digits[d] < r.cards[d]) {
                ia += sa[d];
                ib += sb[d];
                break;
            }
            digits[d] = 0;
            ia -= sa[d] * (r.cards[d] - 1);
            ib -= sb[d] * (r.cards[d] - 1);
        }
    }
    return r;
}

inline Factor sum_out(const Factor& f, VarId v) {
    const std::size_t p = f.position(v);
    Factor r;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
        if (i == p) continue;
        r.vars.push_back(f.vars[i]);
        r.cards.push_back(f.cards[i]);
    }
    std::size_t inner = 1;
    for (std::size_t i = p + 1; i < f.vars.size(); ++i) inner *= f.cards[i];
    const std::size_t card = f.cards[p];
    const std::size_t outer = f.values.size() / (inner * card);
    r.values.assign(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t s = 0; s < card; ++s)
            for (std::size_t i = 0; i < inner; ++i) r.values[o * inner + i] += f.values[(o * card + s) * inner + i];
    return r;
}

inline std::vector<bool> ancestral_closure(const BeliefNetwork& net, const std::vector<VarId>& seeds) {
    std::vector<bool> mark(net.size(), false);
    std::vector<VarId> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (mark[v]) continue;
        mark[v] = true;
        for (VarId p : net.variables[v].parents) stack.push_back(p);
    }
    return mark;
}

}  // namespace detail

// p(keep, E) as a factor over `keep` (sorted, must be disjoint from the
// evidence). With `keep` empty the single entry is p(E).
inline Factor joint_marginal(const BeliefNetwork& net, const Evidence& ev, std::vector<VarId> keep) {
    check_evidence(net, ev);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (VarId k : keep) {
        if (k >= net.size()) throw Error("variable index out of range");
        if (ev.contains(k)) throw Error("kept variable '" + net[k].name + "' is observed");
    }

    std::vector<VarId> seeds = keep;
    for (auto [v, s] : ev) seeds.push_back(v);
    const auto relevant = detail::ancestral_closure(net, seeds);

    std::vector<Factor> factors;
    std::vector<VarId> pending;
    for (VarId v = 0; v < net.size(); ++v) {
        if (!relevant[v]) continue;
        factors.push_back(detail::cpt_factor(net, v, ev));
        if (!ev.contains(v) && !std::binary_search(keep.begin(), keep.end(), v)) pending.push_back(v);
    }

    // Greedy min-weight elimination order, ties to the lowest index.
    while (!pending.empty()) {
        std::size_t best = 0;
        double best_weight = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pending.size(); ++i) {
            std::vector<VarId> scope;
            for (const auto& f : factors)
                if (f.contains(pending[i])) scope.insert(scope.end(), f.vars.begin(), f.vars.end());
            std::sort(scope.begin(), scope.end());
            scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
            double weight = 1.0;
            for (VarId u : scope) weight *= static_cast<double>(net.cardinality(u));
            if (weight < best_weight) {
                best_weight = weight;
                best = i;
            }
        }
        const VarId x = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));

        Factor product{{}, {}, {1.0}};
        std::vector<Factor> rest;
        for (auto& f : factors) {
            if (f.contains(x))
                product = detail::multiply(product, f);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(detail::sum_out(product, x));
        factors = std::move(rest);
    }

    Factor result{{}, {}, {1.0}};
    for (const auto& f : factors) result = detail::multiply(result, f);
    return result;
}

inline double evidence_probability(const BeliefNetwork& net, const Evidence& ev) {
    return joint_marginal(net, ev, {}).values.front();
}

// p(variable = s, E) for every state s. Handles an observed variable.
inline std::vector<double> query_joint(const BeliefNetwork& net, const Evidence& ev, VarId variable) {
    if (variable >= net.size()) throw Error("variable index out of range");
    std::vector<double> out(net.cardinality(variable), 0.0);
    if (auto observed = ev.get(variable)) {
        out[*observed] = evidence_probability(net, ev);
        return out;
    }
    auto f = joint_marginal(net, ev, {variable});
    return f.values;
}

inline double exact_posterior(const BeliefNetwork& net, Query query, const Evidence& ev) {
    if (query.variable >= net.size() || query.state >= net.cardinality(query.variable))
        throw Error("query out of range");
    auto joint = query_joint(net, ev, query.variable);
    const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
    if (total == 0.0) throw ZeroEvidenceError();
    return joint[query.state] / total;
}

}  // namespace delib
