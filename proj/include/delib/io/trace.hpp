#pragma once

// Run traces: one record per metareasoning evaluation.
//
// CSV form:
//   # delib-trace 1
//   # network alarm.bif
//   # problem respiratory_steep.problem
//   # policy myopic
//   # seed 0
//   step,vtime,lb,ub,mean,pstar,evc,candidate_action,status
//   0,1.44,0,1,0.5,0.42,-3.1,treat,reflex
//
// Empty pstar / evc fields mean "none". Numbers carry 12 significant digits.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "delib/errors.hpp"
#include "delib/io/lexer.hpp"

namespace delib::io {

inline constexpr int kTraceSchemaVersion = 1;

enum class TraceStatus { reflex, proceed, halt_evc, dominant, exhausted };

inline const char* to_string(TraceStatus s) {
    switch (s) {
        case TraceStatus::reflex: return "reflex";
        case TraceStatus::proceed: return "continue";
        case TraceStatus::halt_evc: return "halt-evc";
        case TraceStatus::dominant: return "dominant";
        case TraceStatus::exhausted: return "exhausted";
    }
    return "?";
}

inline std::optional<TraceStatus> parse_trace_status(std::string_view s) {
    for (auto st : {TraceStatus::reflex, TraceStatus::proceed, TraceStatus::halt_evc, TraceStatus::dominant,
                    TraceStatus::exhausted})
        if (s == to_string(st)) return st;
    return std::nullopt;
}

struct TraceRecord {
    std::size_t step = 0;
    double vtime = 0.0;
    double lb = 0.0;
    double ub = 1.0;
    double mean = 0.5;
    std::optional<double> pstar;
    std::optional<double> evc;
    std::string candidate_action;
    TraceStatus status = TraceStatus::proceed;

    bool operator==(const TraceRecord&) const = default;
};

struct TraceFile {
    std::string network;
    std::string problem;
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<TraceRecord> records;

    bool operator==(const TraceFile&) const = default;
};

// lb <= mean <= ub and strictly increasing vtime.
inline void check_trace(const TraceFile& trace) {
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        if (!(r.lb <= r.mean && r.mean <= r.ub))
            throw ValidationError("trace record " + std::to_string(i) + ": mean outside [lb, ub]");
        if (i > 0 && !(r.vtime > trace.records[i - 1].vtime))
            throw ValidationError("trace record " + std::to_string(i) + ": vtime not increasing");
    }
}

enum class TraceFormat { csv, text };

namespace detail {

inline std::string trace_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string optional_number(const std::optional<double>& x) { return x ? trace_number(*x) : std::string{}; }

inline void check_header_value(std::string_view what, const std::string& v) {
    if (v.find('\n') != std::string::npos) throw ValidationError(std::string(what) + " contains a newline");
}

}  // namespace detail

inline std::string write_trace_csv(const TraceFile& trace) {
    detail::check_header_value("network", trace.network);
    detail::check_header_value("problem", trace.problem);
    detail::check_header_value("policy", trace.policy);
    std::ostringstream out;
    out << "# delib-trace " << kTraceSchemaVersion << '\n';
    out << "# network " << trace.network << '\n';
    out << "# problem " << trace.problem << '\n';
    out << "# policy " << trace.policy << '\n';
    out << "# seed " << trace.seed << '\n';
    out << "step,vtime,lb,ub,mean,pstar,evc,candidate_action,status\n";
    for (const auto& r : trace.records) {
        if (r.candidate_action.find_first_of(",\n\"") != std::string::npos)
            throw ValidationError("action name '" + r.candidate_action + "' cannot be written to CSV");
        using detail::trace_number;
        out << r.step << ',' << trace_number(r.vtime) << ',' << trace_number(r.lb) << ',' << trace_number(r.ub) << ','
            << trace_number(r.mean) << ',' << detail::optional_number(r.pstar) << ','
            << detail::optional_number(r.evc) << ',' << r.candidate_action << ',' << to_string(r.status) << '\n';
    }
    return out.str();
}

inline std::string write_trace_text(const TraceFile& trace) {
    std::ostringstream out;
    out << "delib-trace " << kTraceSchemaVersion << ";\n";
    out << "network " << quote_if_needed(trace.network) << ";\n";
    out << "problem " << quote_if_needed(trace.problem) << ";\n";
    out << "policy " << quote_if_needed(trace.policy) << ";\n";
    out << "seed " << trace.seed << ";\n";
    using detail::trace_number;
    for (const auto& r : trace.records) {
        out << "record " << r.step << " { vtime " << trace_number(r.vtime) << "; lb " << trace_number(r.lb) << "; ub "
            << trace_number(r.ub) << "; mean " << trace_number(r.mean) << ';';
        if (r.pstar) out << " pstar " << trace_number(*r.pstar) << ';';
        if (r.evc) out << " evc " << trace_number(*r.evc) << ';';
        out << " action " << quote_if_needed(r.candidate_action) << "; status " << to_string(r.status) << "; }\n";
    }
    return out.str();
}

inline std::string write_trace(const TraceFile& trace, TraceFormat format) {
    return format == TraceFormat::csv ? write_trace_csv(trace) : write_trace_text(trace);
}

inline TraceFile read_trace_csv(std::string_view text) {
    TraceFile trace;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool seen_magic = false, seen_columns = false;

    auto number = [&](const std::string& field, std::size_t col) {
        double v = 0.0;
        if (!Lexer::parse_double(field, v)) throw ParseError("bad number '" + field + "'", lineno, col);
        return v;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            std::string rest;
            std::getline(hs, rest);
            if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
            if (key == "delib-trace") {
                if (rest != std::to_string(kTraceSchemaVersion))
                    throw ParseError("unsupported trace schema version " + rest, lineno, 1);
                seen_magic = true;
            } else if (key == "network") {
                trace.network = rest;
            } else if (key == "problem") {
                trace.problem = rest;
            } else if (key == "policy") {
                trace.policy = rest;
            } else if (key == "seed") {
                trace.seed = static_cast<std::uint64_t>(number(rest, 1));
            }
            continue;
        }
        if (!seen_magic) throw ParseError("missing '# delib-trace' header", lineno, 1);
        if (!seen_columns) {
            if (line != "step,vtime,lb,ub,mean,pstar,evc,candidate_action,status")
                throw ParseError("unexpected column header", lineno, 1);
            seen_columns = true;
            continue;
        }
        std::vector<std::string> f;
        std::vector<std::size_t> cols;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cols.push_back(start + 1);
            f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 9) throw ParseError("expected 9 fields, found " + std::to_string(f.size()), lineno, 1);
        TraceRecord r;
        r.step = static_cast<std::size_t>(number(f[0], cols[0]));
        r.vtime = number(f[1], cols[1]);
        r.lb = number(f[2], cols[2]);
        r.ub = number(f[3], cols[3]);
        r.mean = number(f[4], cols[4]);
        if (!f[5].empty()) r.pstar = number(f[5], cols[5]);
        if (!f[6].empty()) r.evc = number(f[6], cols[6]);
        r.candidate_action = f[7];
        auto st = parse_trace_status(f[8]);
        if (!st) throw ParseError("unknown status '" + f[8] + "'", lineno, cols[8]);
        r.status = *st;
        trace.records.push_back(std::move(r));
    }
    if (!seen_columns) throw ParseError("trace has no column header", lineno == 0 ? 1 : lineno, 1);
    return trace;
}

inline TraceFile read_trace_text(std::string_view text) {
    Lexer lex(text);
    TraceFile trace;
    const Token head = lex.expect_name("'delib-trace' header");
    if (!head.is("delib-trace")) Lexer::fail(head, "expected 'delib-trace' header");
    const Token vt = lex.peek();
    if (lex.expect_number("schema version") != kTraceSchemaVersion)
        Lexer::fail(vt, "unsupported trace schema version " + vt.text);
    lex.expect(";");
    while (!lex.at_end()) {
        const Token kw = lex.next();
        if (kw.is("network")) {
            trace.network = lex.expect_name("network").text;
        } else if (kw.is("problem")) {
            trace.problem = lex.expect_name("problem").text;
        } else if (kw.is("policy")) {
            trace.policy = lex.expect_name("policy").text;
        } else if (kw.is("seed")) {
            trace.seed = static_cast<std::uint64_t>(lex.expect_number("seed"));
        } else if (kw.is("record")) {
            TraceRecord r;
            r.step = static_cast<std::size_t>(lex.expect_number("step"));
            lex.expect("{");
            while (!lex.accept("}")) {
                const Token field = lex.next();
                if (field.is("vtime")) r.vtime = lex.expect_number("vtime");
                else if (field.is("lb")) r.lb = lex.expect_number("lb");
                else if (field.is("ub")) r.ub = lex.expect_number("ub");
                else if (field.is("mean")) r.mean = lex.expect_number("mean");
                else if (field.is("pstar")) r.pstar = lex.expect_number("pstar");
                else if (field.is("evc")) r.evc = lex.expect_number("evc");
                else if (field.is("action")) r.candidate_action = lex.expect_name("action").text;
                else if (field.is("status")) {
                    const Token st = lex.expect_name("status");
                    auto s = parse_trace_status(st.text);
                    if (!s) Lexer::fail(st, "unknown status " + Lexer::describe(st));
                    r.status = *s;
                } else {
                    Lexer::fail(field, "unknown record field " + Lexer::describe(field));
                }
                lex.expect(";");
            }
            trace.records.push_back(std::move(r));
            continue;
        } else {
            Lexer::fail(kw, "unexpected " + Lexer::describe(kw));
        }
        lex.expect(";");
    }
    return trace;
}

// Either form, by its first line.
inline TraceFile read_trace(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    TraceFile trace = (first != std::string_view::npos && text[first] == '#') ? read_trace_csv(text)
                                                                               : read_trace_text(text);
    check_trace(trace);
    return trace;
}

}  // namespace delib::io
