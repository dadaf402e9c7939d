#pragma once

// Loop cutset selection. A set is a loop cutset here when removing its
// variables from the undirected skeleton leaves a forest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <vector>

#include "delib/network.hpp"

namespace delib {

namespace detail {

using Adjacency = std::vector<std::vector<VarId>>;

inline Adjacency skeleton(const BeliefNetwork& net, const std::vector<bool>& removed) {
    Adjacency adj(net.size());
    for (VarId v = 0; v < net.size(); ++v) {
        if (removed[v]) continue;
        for (VarId p : net.variables[v].parents) {
            if (removed[p]) continue;
            adj[v].push_back(p);
            adj[p].push_back(v);
        }
    }
    return adj;
}

// Strip degree <= 1 vertices until none remain; what survives is the 2-core.
inline std::vector<bool> two_core(const Adjacency& adj, const std::vector<bool>& removed) {
    const std::size_t n = adj.size();
    std::vector<bool> in_core(n);
    std::vector<std::size_t> degree(n, 0);
    std::vector<VarId> leaves;
    for (VarId v = 0; v < n; ++v) {
        in_core[v] = !removed[v];
        degree[v] = adj[v].size();
        if (in_core[v] && degree[v] <= 1) leaves.push_back(v);
    }
    while (!leaves.empty()) {
        VarId v = leaves.back();
        leaves.pop_back();
        if (!in_core[v]) continue;
        in_core[v] = false;
        for (VarId u : adj[v])
            if (in_core[u] && --degree[u] == 1) leaves.push_back(u);
    }
    return in_core;
}

// Vertices lying on at least one cycle of the subgraph induced by `keep`
// (i.e. with an incident non-bridge edge).
inline std::vector<bool> on_some_cycle(const Adjacency& adj, const std::vector<bool>& keep) {
    const std::size_t n = adj.size();
    std::vector<std::size_t> disc(n, 0), low(n, 0);
    std::vector<bool> result(n, false);
    std::size_t timer = 0;

    auto dfs = [&](auto&& self, VarId v, VarId parent, bool has_parent) -> void {
        disc[v] = low[v] = ++timer;
        bool skipped_parent_edge = false;
        for (VarId u : adj[v]) {
            if (!keep[u]) continue;
            if (has_parent && u == parent && !skipped_parent_edge) {
                skipped_parent_edge = true;
                continue;
            }
            if (disc[u] == 0) {
                self(self, u, v, true);
                low[v] = std::min(low[v], low[u]);
                if (low[u] <= disc[v]) {  // tree edge v-u is not a bridge
                    result[v] = true;
                    result[u] = true;
                }
            } else {
                low[v] = std::min(low[v], disc[u]);
                if (disc[u] < disc[v]) {  // back edge closes a cycle
                    result[v] = true;
                    result[u] = true;
                }
            }
        }
    };
    for (VarId v = 0; v < n; ++v)
        if (keep[v] && disc[v] == 0) dfs(dfs, v, 0, false);
    return result;
}

}  // namespace detail

// True when the undirected skeleton restricted to variables not in
// `clamped` is acyclic.
inline bool is_singly_connected(const BeliefNetwork& net, const std::set<VarId>& clamped = {}) {
    std::vector<VarId> root(net.size());
    std::iota(root.begin(), root.end(), VarId{0});
    auto find = [&](VarId v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
    };
    for (VarId v = 0; v < net.size(); ++v) {
        if (clamped.count(v)) continue;
        for (VarId p : net.variables[v].parents) {
            if (clamped.count(p)) continue;
            VarId a = find(v), b = find(p);
            if (a == b) return false;
            root[a] = b;
        }
    }
    return true;
}

// Greedy cutset: repeatedly clamp the variable on a remaining undirected
// cycle with the largest (degree - 1) * log(cardinality), ties to the lowest
// index, then drop any member whose release keeps the rest singly connected.
inline std::set<VarId> find_loop_cutset(const BeliefNetwork& net) {
    const std::size_t n = net.size();
    std::vector<bool> removed(n, false);
    std::vector<VarId> picked;

    for (;;) {
        auto adj = detail::skeleton(net, removed);
        auto core = detail::two_core(adj, removed);
        if (std::none_of(core.begin(), core.end(), [](bool b) { return b; })) break;
        auto cyclic = detail::on_some_cycle(adj, core);

        VarId best = n;
        double best_score = -1.0;
        for (VarId v = 0; v < n; ++v) {
            if (!cyclic[v]) continue;
            std::size_t degree = 0;
            for (VarId u : adj[v]) degree += core[u] ? 1 : 0;
            const double score =
                static_cast<double>(degree - 1) * std::log(static_cast<double>(net.cardinality(v)));
            if (score > best_score) {
                best_score = score;
                best = v;
            }
        }
        removed[best] = true;
        picked.push_back(best);
    }

    std::set<VarId> cutset(picked.begin(), picked.end());
    for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
        cutset.erase(*it);
        if (!is_singly_connected(net, cutset)) cutset.insert(*it);
    }
    return cutset;
}

inline std::size_t instantiation_count(const BeliefNetwork& net, const std::set<VarId>& vars) {
    std::size_t count = 1;
    for (VarId v : vars) count *= net.cardinality(v);
    return count;
}

}  // namespace delib
