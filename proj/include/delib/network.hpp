#pragma once

// Discrete belief networks: representation, validation, ordering and the
// chain-rule joint. Variables, states and parents are index-addressed;
// names are only used at I/O boundaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "delib/errors.hpp"

namespace delib {

using VarId = std::size_t;
using StateId = std::size_t;

inline constexpr double kCptTolerance = 1e-9;

struct Variable {
    std::string name;
    std::vector<std::string> states;
    std::vector<VarId> parents;
    // Row-major: one row per parent-state combination (lexicographic, first
    // parent most significant), one column per own state.
    std::vector<double> cpt;

    std::size_t cardinality() const noexcept { return states.size(); }

    std::optional<StateId> find_state(std::string_view s) const {
        auto it = std::find(states.begin(), states.end(), s);
        if (it == states.end()) return std::nullopt;
        return static_cast<StateId>(it - states.begin());
    }
};

struct BeliefNetwork {
    std::string name;
    // Free-text description of the background knowledge the model encodes.
    // Carried through I/O, never reasoned over.
    std::string provenance;
    std::vector<Variable> variables;

    std::size_t size() const noexcept { return variables.size(); }
    const Variable& operator[](VarId v) const { return variables.at(v); }
    std::size_t cardinality(VarId v) const { return variables.at(v).cardinality(); }

    std::optional<VarId> find(std::string_view var_name) const {
        for (VarId v = 0; v < variables.size(); ++v)
            if (variables[v].name == var_name) return v;
        return std::nullopt;
    }

    VarId index_of(std::string_view var_name) const {
        if (auto v = find(var_name)) return *v;
        throw Error("unknown variable '" + std::string(var_name) + "'");
    }

    StateId state_index(VarId v, std::string_view state) const {
        if (auto s = variables.at(v).find_state(state)) return *s;
        throw Error("variable '" + variables[v].name + "' has no state '" + std::string(state) + "'");
    }

    std::size_t row_count(VarId v) const {
        std::size_t rows = 1;
        for (VarId p : variables.at(v).parents) rows *= variables.at(p).cardinality();
        return rows;
    }

    // Row of v's CPT selected by the parent states in a full assignment.
    std::size_t parent_row(VarId v, std::span<const StateId> assignment) const {
        std::size_t row = 0;
        for (VarId p : variables[v].parents) row = row * variables[p].cardinality() + assignment[p];
        return row;
    }

    double conditional(VarId v, std::span<const StateId> assignment) const {
        const auto& var = variables[v];
        return var.cpt[parent_row(v, assignment) * var.cardinality() + assignment[v]];
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& var : variables) n += var.parents.size();
        return n;
    }
};

// Observed states keyed by variable; a variable appears at most once.
class Evidence {
public:
    Evidence() = default;
    Evidence(std::initializer_list<std::pair<const VarId, StateId>> obs) : obs_(obs) {}

    void set(VarId v, StateId s) { obs_[v] = s; }
    void erase(VarId v) { obs_.erase(v); }
    bool contains(VarId v) const { return obs_.count(v) != 0; }
    std::optional<StateId> get(VarId v) const {
        auto it = obs_.find(v);
        if (it == obs_.end()) return std::nullopt;
        return it->second;
    }
    bool empty() const noexcept { return obs_.empty(); }
    std::size_t size() const noexcept { return obs_.size(); }
    auto begin() const { return obs_.begin(); }
    auto end() const { return obs_.end(); }

    bool operator==(const Evidence&) const = default;

private:
    std::map<VarId, StateId> obs_;
};

inline void check_evidence(const BeliefNetwork& net, const Evidence& ev) {
    for (auto [v, s] : ev) {
        if (v >= net.size()) throw ValidationError("evidence on unknown variable index " + std::to_string(v));
        if (s >= net.cardinality(v))
            throw ValidationError("evidence state " + std::to_string(s) + " out of range for '" + net[v].name + "'");
    }
}

enum class Severity { warning, error };

struct Issue {
    Severity severity;
    std::string message;
    std::string location;
    std::optional<VarId> variable;  // offending variable, when there is one
};

struct ValidationReport {
    std::vector<Issue> issues;

    bool ok() const {
        return std::none_of(issues.begin(), issues.end(),
                            [](const Issue& i) { return i.severity == Severity::error; });
    }

    std::size_t error_count() const {
        return static_cast<std::size_t>(std::count_if(
            issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; }));
    }
};

namespace detail {

inline std::string format_real(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

// Every elementary cycle reachable through a DFS back edge, as variable index
// paths that start and end on the same node.
inline std::vector<std::vector<VarId>> directed_cycles(const BeliefNetwork& net) {
    const std::size_t n = net.size();
    std::vector<std::vector<VarId>> children(n);
    for (VarId v = 0; v < n; ++v)
        for (VarId p : net.variables[v].parents)
            if (p < n) children[p].push_back(v);

    enum Color { white, grey, black };
    std::vector<Color> color(n, white);
    std::vector<VarId> stack;
    std::vector<std::vector<VarId>> cycles;

    auto visit = [&](auto&& self, VarId v) -> void {
        color[v] = grey;
        stack.push_back(v);
        for (VarId c : children[v]) {
            if (color[c] == grey) {
                auto it = std::find(stack.begin(), stack.end(), c);
                std::vector<VarId> cyc(it, stack.end());
                cyc.push_back(c);
                cycles.push_back(std::move(cyc));
            } else if (color[c] == white) {
                self(self, c);
            }
        }
        stack.pop_back();
        color[v] = black;
    };
    for (VarId v = 0; v < n; ++v)
        if (color[v] == white) visit(visit, v);
    return cycles;
}

}  // namespace detail

inline ValidationReport validate_network(const BeliefNetwork& net) {
    ValidationReport report;
    std::optional<VarId> current;
    auto error = [&](std::string msg, std::string where) {
        report.issues.push_back({Severity::error, std::move(msg), std::move(where), current});
    };

    std::set<std::string> names;
    bool structure_ok = true;
    for (VarId v = 0; v < net.size(); ++v) {
        const auto& var = net.variables[v];
        current = v;
        const std::string where = "variable '" + var.name + "'";
        if (var.name.empty()) error("empty variable name", "variable #" + std::to_string(v));
        if (!names.insert(var.name).second) error("duplicate variable name", where);
        if (var.states.size() < 2) error("fewer than 2 states", where);
        std::set<std::string> seen_states(var.states.begin(), var.states.end());
        if (seen_states.size() != var.states.size()) error("duplicate state name", where);

        std::set<VarId> seen_parents;
        for (VarId p : var.parents) {
            if (p >= net.size()) {
                error("parent index " + std::to_string(p) + " out of range", where);
                structure_ok = false;
            } else if (p == v) {
                error("variable is its own parent", where);
            } else if (!seen_parents.insert(p).second) {
                error("duplicate parent '" + net.variables[p].name + "'", where);
            }
        }
    }
    if (!structure_ok) return report;

    for (const auto& cyc : detail::directed_cycles(net)) {
        std::string path;
        current = cyc.front();
        for (std::size_t i = 0; i < cyc.size(); ++i) path += (i ? " -> " : "") + net.variables[cyc[i]].name;
        error("directed cycle: " + path, "variable '" + net.variables[cyc.front()].name + "'");
    }

    for (VarId v = 0; v < net.size(); ++v) {
        const auto& var = net.variables[v];
        current = v;
        const std::size_t rows = net.row_count(v);
        const std::size_t width = var.cardinality();
        if (var.cpt.size() != rows * width) {
            error("cpt has " + std::to_string(var.cpt.size()) + " entries, expected " + std::to_string(rows) + " rows x " +
                      std::to_string(width),
                  "variable '" + var.name + "'");
            continue;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string where = "variable '" + var.name + "' cpt row " + std::to_string(r);
            double sum = 0.0;
            for (std::size_t s = 0; s < width; ++s) {
                const double p = var.cpt[r * width + s];
                if (!(p >= 0.0 && p <= 1.0)) error("cpt entry " + detail::format_real(p) + " outside [0,1]", where);
                sum += p;
            }
            if (!(std::abs(sum - 1.0) <= kCptTolerance))
                error("cpt row sum " + detail::format_real(sum) + " ≠ 1", where);
        }
    }
    return report;
}

// Throws ValidationError listing every error in the report.
inline void require_valid(const BeliefNetwork& net) {
    auto report = validate_network(net);
    if (report.ok()) return;
    std::string msg = "invalid network";
    for (const auto& issue : report.issues)
        if (issue.severity == Severity::error) msg += "\n  " + issue.location + ": " + issue.message;
    throw ValidationError(msg);
}

// Parents before children; ties broken by ascending index.
inline std::vector<VarId> topological_order(const BeliefNetwork& net) {
    const std::size_t n = net.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<VarId>> children(n);
    for (VarId v = 0; v < n; ++v) {
        for (VarId p : net.variables[v].parents) {
            if (p >= n) throw ValidationError("parent index out of range");
            children[p].push_back(v);
            ++indegree[v];
        }
    }
    std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
    for (VarId v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);

    std::vector<VarId> order;
    order.reserve(n);
    while (!ready.empty()) {
        VarId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (VarId c : children[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (order.size() != n) throw ValidationError("not a DAG");
    return order;
}

inline double joint_probability(const BeliefNetwork& net, std::span<const StateId> assignment) {
    if (assignment.size() != net.size())
        throw Error("incomplete assignment: " + std::to_string(assignment.size()) + " of " + std::to_string(net.size()) +
                    " variables");
    for (VarId v = 0; v < net.size(); ++v)
        if (assignment[v] >= net.cardinality(v)) throw Error("state out of range for '" + net[v].name + "'");
    double p = 1.0;
    for (VarId v = 0; v < net.size(); ++v) {
        p *= net.conditional(v, assignment);
        if (p == 0.0) break;
    }
    return p;
}

// Advances a mixed-radix counter; false once it wraps to all zeros.
inline bool next_assignment(std::span<StateId> digits, std::span<const std::size_t> radix) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

}  // namespace delib
