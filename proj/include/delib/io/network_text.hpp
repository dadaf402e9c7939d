#pragma once

// Native network format and the BIF subset.
//
// Native format:
//
//   delib-network 1;
//   name "diamond";
//   provenance "hand-built fixture";
//   variable A { states F T; cpt 0.3 0.7; }
//   variable B { states F T; parents A; cpt 0.9 0.1 0.2 0.8; }
//
// `cpt` lists rows in lexicographic parent-state order (first parent most
// significant), own state fastest. Parents may be declared later in the file.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "delib/io/lexer.hpp"
#include "delib/network.hpp"

namespace delib::io {

inline constexpr int kNetworkSchemaVersion = 1;

// A network straight out of the parser, before validation, with the source
// position of each variable for diagnostics.
struct ParsedNetwork {
    BeliefNetwork network;
    std::vector<Token> positions;  // one per variable
};

// Validate and convert the first error into a positioned diagnostic.
inline BeliefNetwork finalize(ParsedNetwork parsed) {
    const auto report = validate_network(parsed.network);
    if (report.ok()) return std::move(parsed.network);
    for (const auto& issue : report.issues) {
        if (issue.severity != Severity::error) continue;
        Token at = parsed.positions.empty() ? Token{} : parsed.positions.front();
        if (issue.variable && *issue.variable < parsed.positions.size()) at = parsed.positions[*issue.variable];
        Lexer::fail(at, issue.location + ": " + issue.message);
    }
    return std::move(parsed.network);
}

inline ParsedNetwork read_network_text(std::string_view text) {
    Lexer lex(text);
    ParsedNetwork out;

    const Token head = lex.expect_name("'delib-network' header");
    if (head.text != "delib-network") Lexer::fail(head, "expected 'delib-network' header, found " + Lexer::describe(head));
    const Token version_tok = lex.peek();
    const double version = lex.expect_number("schema version");
    if (version != kNetworkSchemaVersion)
        Lexer::fail(version_tok, "unsupported schema version " + version_tok.text);
    lex.expect(";");

    struct PendingParents {
        std::vector<Token> names;
    };
    std::vector<PendingParents> pending;
    std::map<std::string, VarId> index;

    while (!lex.at_end()) {
        const Token kw = lex.next();
        if (kw.is("name")) {
            out.network.name = lex.expect_name("network name").text;
            lex.expect(";");
        } else if (kw.is("provenance")) {
            out.network.provenance = lex.expect_name("provenance text").text;
            lex.expect(";");
        } else if (kw.is("variable")) {
            const Token name = lex.expect_name("variable name");
            if (index.count(name.text)) Lexer::fail(name, "duplicate variable '" + name.text + "'");
            index[name.text] = out.network.variables.size();
            Variable var;
            var.name = name.text;
            PendingParents parents;
            bool have_states = false;
            lex.expect("{");
            while (!lex.accept("}")) {
                const Token field = lex.next();
                if (field.is("states")) {
                    if (have_states) Lexer::fail(field, "duplicate 'states'");
                    have_states = true;
                    while (!lex.peek().is(";")) var.states.push_back(lex.expect_name("state name").text);
                } else if (field.is("parents")) {
                    while (!lex.peek().is(";")) parents.names.push_back(lex.expect_name("parent name"));
                } else if (field.is("cpt")) {
                    while (!lex.peek().is(";")) var.cpt.push_back(lex.expect_number("probability"));
                } else {
                    Lexer::fail(field, "unknown variable field " + Lexer::describe(field));
                }
                lex.expect(";");
            }
            if (!have_states) Lexer::fail(name, "variable '" + name.text + "' has no states");
            out.network.variables.push_back(std::move(var));
            out.positions.push_back(name);
            pending.push_back(std::move(parents));
        } else {
            Lexer::fail(kw, "unexpected " + Lexer::describe(kw));
        }
    }

    for (std::size_t v = 0; v < pending.size(); ++v) {
        for (const Token& p : pending[v].names) {
            auto it = index.find(p.text);
            if (it == index.end()) Lexer::fail(p, "undeclared parent '" + p.text + "'");
            out.network.variables[v].parents.push_back(it->second);
        }
    }
    return out;
}

inline BeliefNetwork parse_network_text(std::string_view text) { return finalize(read_network_text(text)); }

inline std::string serialize_network(const BeliefNetwork& net) {
    std::ostringstream body;
    body << "delib-network " << kNetworkSchemaVersion << ";\n";
    if (!net.name.empty()) body << "name " << quote_if_needed(net.name) << ";\n";
    if (!net.provenance.empty()) {
        std::string q = quote_if_needed(net.provenance);
        if (q.front() != '"') q = "\"" + q + "\"";
        body << "provenance " << q << ";\n";
    }
    for (const auto& var : net.variables) {
        body << "\nvariable " << quote_if_needed(var.name) << " {\n  states";
        for (const auto& s : var.states) body << ' ' << quote_if_needed(s);
        body << ";\n";
        if (!var.parents.empty()) {
            body << "  parents";
            for (VarId p : var.parents) body << ' ' << quote_if_needed(net.variables.at(p).name);
            body << ";\n";
        }
        body << "  cpt";
        const std::size_t width = std::max<std::size_t>(var.cardinality(), 1);
        for (std::size_t i = 0; i < var.cpt.size(); ++i) {
            body << ((i % width == 0 && i > 0) ? "\n     " : " ") << format_exact(var.cpt[i]);
        }
        body << ";\n}\n";
    }
    return body.str();
}

// ---------------------------------------------------------------------------
// BIF subset: `network`, discrete `variable` blocks with explicit state
// lists, and `probability` blocks holding a `table` or one entry per parent
// combination. `property` statements are ignored.

inline constexpr double kBifRenormalizeTolerance = 1e-6;

inline ParsedNetwork read_bif(std::string_view text) {
    Lexer lex(text);
    ParsedNetwork out;
    std::map<std::string, VarId> index;
    std::vector<bool> has_cpt;

    auto skip_properties_block = [&]() {
        lex.expect("{");
        while (!lex.accept("}")) {
            const Token t = lex.next();
            if (!t.is("property")) Lexer::fail(t, "unsupported construct " + Lexer::describe(t) + " in network block");
            lex.skip_statement();
        }
    };

    auto lookup = [&](const Token& t) -> VarId {
        auto it = index.find(t.text);
        if (it == index.end()) Lexer::fail(t, "undeclared variable '" + t.text + "'");
        return it->second;
    };

    while (!lex.at_end()) {
        const Token kw = lex.next();
        if (kw.is("network")) {
            out.network.name = lex.expect_name("network name").text;
            skip_properties_block();
        } else if (kw.is("variable")) {
            const Token name = lex.expect_name("variable name");
            if (index.count(name.text)) Lexer::fail(name, "duplicate variable '" + name.text + "'");
            Variable var;
            var.name = name.text;
            bool typed = false;
            lex.expect("{");
            while (!lex.accept("}")) {
                const Token t = lex.next();
                if (t.is("property")) {
                    lex.skip_statement();
                } else if (t.is("type")) {
                    const Token kind = lex.expect_name("variable type");
                    if (!kind.is("discrete")) Lexer::fail(kind, "unsupported construct: variable type '" + kind.text + "'");
                    lex.expect("[");
                    const Token count_tok = lex.peek();
                    const double count = lex.expect_number("state count");
                    lex.expect("]");
                    lex.expect("{");
                    while (!lex.accept("}")) {
                        var.states.push_back(lex.expect_name("state name").text);
                        if (!lex.peek().is("}")) lex.expect(",");
                    }
                    lex.expect(";");
                    if (count != static_cast<double>(var.states.size()))
                        Lexer::fail(count_tok, "declared " + count_tok.text + " states but listed " +
                                                   std::to_string(var.states.size()));
                    typed = true;
                } else {
                    Lexer::fail(t, "unsupported construct " + Lexer::describe(t) + " in variable block");
                }
            }
            if (!typed) Lexer::fail(name, "variable '" + name.text + "' has no type declaration");
            index[var.name] = out.network.variables.size();
            out.network.variables.push_back(std::move(var));
            out.positions.push_back(name);
            has_cpt.push_back(false);
        } else if (kw.is("probability")) {
            lex.expect("(");
            const Token child_tok = lex.expect_name("variable name");
            const VarId child = lookup(child_tok);
            std::vector<VarId> parents;
            if (lex.accept("|")) {
                do {
                    parents.push_back(lookup(lex.expect_name("parent name")));
                } while (lex.accept(","));
            }
            lex.expect(")");
            if (has_cpt[child]) Lexer::fail(child_tok, "second probability block for '" + child_tok.text + "'");
            has_cpt[child] = true;

            auto& var = out.network.variables[child];
            var.parents = parents;
            std::size_t rows = 1;
            for (VarId p : parents) rows *= out.network.variables[p].cardinality();
            const std::size_t width = var.cardinality();
            var.cpt.assign(rows * width, 0.0);
            std::vector<bool> row_seen(rows, false);
            bool table_seen = false;

            auto read_values = [&](std::size_t expected, const Token& at) {
                std::vector<double> values;
                while (!lex.peek().is(";")) {
                    values.push_back(lex.expect_number("probability"));
                    if (!lex.peek().is(";")) lex.expect(",");
                }
                lex.expect(";");
                if (values.size() != expected)
                    Lexer::fail(at, "CPT arity mismatch for '" + var.name + "': expected " + std::to_string(expected) +
                                        " values, found " + std::to_string(values.size()));
                return values;
            };

            lex.expect("{");
            while (!lex.accept("}")) {
                const Token t = lex.peek();
                if (t.is("property")) {
                    lex.next();
                    lex.skip_statement();
                } else if (t.is("table")) {
                    lex.next();
                    auto values = read_values(rows * width, t);
                    var.cpt = std::move(values);
                    row_seen.assign(rows, true);
                    table_seen = true;
                } else if (t.is("(")) {
                    lex.next();
                    std::size_t row = 0;
                    for (std::size_t k = 0; k < parents.size(); ++k) {
                        const Token st = lex.expect_name("parent state");
                        const auto& pv = out.network.variables[parents[k]];
                        auto s = pv.find_state(st.text);
                        if (!s) Lexer::fail(st, "'" + pv.name + "' has no state '" + st.text + "'");
                        row = row * pv.cardinality() + *s;
                        if (k + 1 < parents.size()) lex.expect(",");
                    }
                    lex.expect(")");
                    if (parents.empty()) Lexer::fail(t, "parent-state entry for a variable without parents");
                    if (row_seen[row]) Lexer::fail(t, "duplicate CPT row for '" + var.name + "'");
                    row_seen[row] = true;
                    auto values = read_values(width, t);
                    std::copy(values.begin(), values.end(), var.cpt.begin() + static_cast<std::ptrdiff_t>(row * width));
                } else {
                    Lexer::fail(t, "unsupported construct " + Lexer::describe(t) + " in probability block");
                }
            }
            (void)table_seen;
            for (std::size_t r = 0; r < rows; ++r)
                if (!row_seen[r])
                    Lexer::fail(child_tok, "CPT arity mismatch for '" + var.name + "': row " + std::to_string(r) +
                                               " missing");

            // Published tables often carry rounded entries (0.3333333 x 3).
            for (std::size_t r = 0; r < rows; ++r) {
                double sum = 0.0;
                for (std::size_t s = 0; s < width; ++s) sum += var.cpt[r * width + s];
                if (sum != 1.0 && std::abs(sum - 1.0) <= kBifRenormalizeTolerance)
                    for (std::size_t s = 0; s < width; ++s) var.cpt[r * width + s] /= sum;
            }
        } else {
            Lexer::fail(kw, "unsupported construct " + Lexer::describe(kw));
        }
    }

    for (VarId v = 0; v < out.network.size(); ++v)
        if (!has_cpt[v]) Lexer::fail(out.positions[v], "no probability block for '" + out.network.variables[v].name + "'");
    return out;
}

inline BeliefNetwork parse_bif_subset(std::string_view text) { return finalize(read_bif(text)); }

enum class NetworkFormat { automatic, native, bif };

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline NetworkFormat detect_format(const std::filesystem::path& path, NetworkFormat requested) {
    if (requested != NetworkFormat::automatic) return requested;
    return path.extension() == ".bif" ? NetworkFormat::bif : NetworkFormat::native;
}

// Unvalidated read, for reporting.
inline ParsedNetwork read_network_file(const std::filesystem::path& path,
                                       NetworkFormat format = NetworkFormat::automatic) {
    const std::string text = read_file(path);
    return detect_format(path, format) == NetworkFormat::bif ? read_bif(text) : read_network_text(text);
}

inline BeliefNetwork load_network(const std::filesystem::path& path, NetworkFormat format = NetworkFormat::automatic) {
    return finalize(read_network_file(path, format));
}

}  // namespace delib::io
