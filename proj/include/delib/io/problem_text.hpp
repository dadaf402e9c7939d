#pragma once

// Decision-problem format:
//
//   delib-problem 1;
//   name "respiratory";
//   hypothesis INTUBATION = ESOPHAGEAL;
//   evidence SAO2 = LOW;
//   action treat {
//     H1 { u0 1000000; decay exp 0.02; }
//     H2 { u0 600000; }
//   }
//   action wait { H1 { u0 200000; } H2 { u0 1000000; decay linear 5 floor 0; } }
//   vital systolicBP = 80;          # observed
//   vital heartRate;                # known but unobserved
//   rule systolicBP < 90 set k treat H1 = 0.008;
//   clock { cost 1; meta 0.05; setup 0.01; }
//
// Decay forms: constant | exp K | linear C [floor F] |
//              piecewise { at T <form>; ... }   (first segment at 0)

#include <string>
#include <string_view>

#include "delib/io/lexer.hpp"
#include "delib/problem.hpp"

namespace delib::io {

inline constexpr int kProblemSchemaVersion = 1;

namespace detail {

inline SimpleDecay read_simple_decay(Lexer& lex) {
    const Token form = lex.expect_name("decay form");
    if (form.is("constant")) return ConstantDecay{};
    if (form.is("exp")) {
        const Token at = lex.peek();
        const double k = lex.expect_number("decay rate");
        if (!(k >= 0.0)) Lexer::fail(at, "decay rate must be >= 0");
        return ExponentialDecay{k};
    }
    if (form.is("linear")) {
        const Token at = lex.peek();
        LinearDecay l{lex.expect_number("decay slope"), 0.0};
        if (!(l.slope >= 0.0)) Lexer::fail(at, "decay slope must be >= 0");
        if (lex.accept("floor")) {
            const Token ft = lex.peek();
            l.floor = lex.expect_number("floor");
            if (!(l.floor >= 0.0)) Lexer::fail(ft, "floor must be >= 0");
        }
        return l;
    }
    Lexer::fail(form, "unknown decay form " + Lexer::describe(form));
}

inline Decay read_decay(Lexer& lex) {
    if (!lex.peek().is("piecewise")) {
        return std::visit([](const auto& d) -> Decay { return d; }, read_simple_decay(lex));
    }
    const Token pw = lex.next();
    PiecewiseDecay out;
    lex.expect("{");
    while (!lex.accept("}")) {
        lex.expect("at");
        const Token at = lex.peek();
        const double start = lex.expect_number("segment start time");
        if (out.segments.empty() && start != 0.0) Lexer::fail(at, "first piecewise segment must start at 0");
        if (!out.segments.empty() && !(start > out.segments.back().start))
            Lexer::fail(at, "segment starts must be strictly increasing");
        out.segments.push_back({start, read_simple_decay(lex)});
        lex.expect(";");
    }
    if (out.segments.empty()) Lexer::fail(pw, "piecewise decay needs at least one segment");
    return out;
}

inline OutcomeUtility read_outcome(Lexer& lex) {
    OutcomeUtility ou;
    bool have_u0 = false;
    lex.expect("{");
    while (!lex.accept("}")) {
        const Token field = lex.next();
        if (field.is("u0")) {
            const Token at = lex.peek();
            ou.u0 = lex.expect_number("initial utility");
            if (!(ou.u0 >= 0.0)) Lexer::fail(at, "initial utility must be >= 0");
            have_u0 = true;
        } else if (field.is("decay")) {
            ou.decay = read_decay(lex);
        } else {
            Lexer::fail(field, "unknown outcome field " + Lexer::describe(field));
        }
        lex.expect(";");
    }
    if (!have_u0) Lexer::fail(lex.peek(), "outcome lacks 'u0'");
    return ou;
}

inline Comparator read_comparator(Lexer& lex) {
    const Token t = lex.next();
    if (t.text == "<") return Comparator::less;
    if (t.text == "<=" || t.text == "≤") return Comparator::less_equal;
    if (t.text == ">") return Comparator::greater;
    if (t.text == ">=" || t.text == "≥") return Comparator::greater_equal;
    Lexer::fail(t, "expected comparator (<, <=, >, >=), found " + Lexer::describe(t));
}

}  // namespace detail

inline DecisionProblemSpec parse_decision_problem(std::string_view text) {
    Lexer lex(text);
    DecisionProblemSpec spec;

    const Token head = lex.expect_name("'delib-problem' header");
    if (!head.is("delib-problem")) Lexer::fail(head, "expected 'delib-problem' header, found " + Lexer::describe(head));
    const Token vt = lex.peek();
    if (lex.expect_number("schema version") != kProblemSchemaVersion)
        Lexer::fail(vt, "unsupported schema version " + vt.text);
    lex.expect(";");

    struct PendingRule {
        CriticalityRule rule;
        Token vital, action, label;
    };
    std::vector<PendingRule> pending_rules;
    std::vector<Token> action_tokens;
    bool have_hypothesis = false;

    while (!lex.at_end()) {
        const Token kw = lex.next();
        if (kw.is("name")) {
            spec.name = lex.expect_name("problem name").text;
        } else if (kw.is("hypothesis")) {
            spec.hypothesis_variable = lex.expect_name("hypothesis variable").text;
            lex.expect("=");
            spec.hypothesis_state = lex.expect_name("hypothesis state").text;
            have_hypothesis = true;
        } else if (kw.is("evidence")) {
            std::string var = lex.expect_name("evidence variable").text;
            lex.expect("=");
            spec.evidence.emplace_back(std::move(var), lex.expect_name("evidence state").text);
        } else if (kw.is("action")) {
            const Token name = lex.expect_name("action name");
            for (const auto& a : spec.actions)
                if (a == name.text) Lexer::fail(name, "duplicate action '" + name.text + "'");
            spec.actions.push_back(name.text);
            action_tokens.push_back(name);
            lex.expect("{");
            while (!lex.accept("}")) {
                const Token label = lex.expect_name("outcome label (H1 or H2)");
                if (!label.is(kH1) && !label.is(kH2))
                    Lexer::fail(label, "outcome label must be H1 or H2, found " + Lexer::describe(label));
                if (spec.utilities.count({name.text, label.text}))
                    Lexer::fail(label, "duplicate outcome " + label.text + " for '" + name.text + "'");
                spec.utilities[{name.text, label.text}] = detail::read_outcome(lex);
            }
            continue;  // block, no trailing ';'
        } else if (kw.is("vital")) {
            const Token v = lex.expect_name("vital sign name");
            spec.declared_vitals.insert(v.text);
            if (lex.accept("=")) spec.vitals[v.text] = lex.expect_number("vital sign value");
        } else if (kw.is("rule")) {
            PendingRule pr;
            pr.vital = lex.expect_name("vital sign name");
            pr.rule.vital = pr.vital.text;
            pr.rule.comparator = detail::read_comparator(lex);
            pr.rule.threshold = lex.expect_number("threshold");
            lex.expect("set");
            const Token param = lex.expect_name("parameter (k, c or u0)");
            if (param.is("k"))
                pr.rule.parameter = DecayParameter::rate;
            else if (param.is("c"))
                pr.rule.parameter = DecayParameter::slope;
            else if (param.is("u0"))
                pr.rule.parameter = DecayParameter::initial;
            else
                Lexer::fail(param, "unknown parameter " + Lexer::describe(param) + " (k, c or u0)");
            pr.action = lex.expect_name("action name");
            pr.label = lex.expect_name("outcome label");
            pr.rule.target = {pr.action.text, pr.label.text};
            lex.expect("=");
            const Token vt2 = lex.peek();
            pr.rule.new_value = lex.expect_number("new value");
            if (!(pr.rule.new_value >= 0.0)) Lexer::fail(vt2, "new value must be >= 0");
            pending_rules.push_back(std::move(pr));
        } else if (kw.is("clock")) {
            lex.expect("{");
            while (!lex.accept("}")) {
                const Token field = lex.next();
                if (field.is("cost")) {
                    spec.clock.cost_per_instantiation.clear();
                    while (!lex.peek().is(";")) {
                        const Token at = lex.peek();
                        const double c = lex.expect_number("step cost");
                        if (!(c >= 0.0)) Lexer::fail(at, "cost must be >= 0");
                        spec.clock.cost_per_instantiation.push_back(c);
                    }
                    if (spec.clock.cost_per_instantiation.empty()) Lexer::fail(field, "cost needs a value");
                } else if (field.is("meta")) {
                    const Token at = lex.peek();
                    spec.clock.meta_cost = lex.expect_number("metareasoning cost");
                    if (!(spec.clock.meta_cost >= 0.0)) Lexer::fail(at, "cost must be >= 0");
                } else if (field.is("setup")) {
                    const Token at = lex.peek();
                    spec.clock.setup_factor = lex.expect_number("setup factor");
                    if (!(spec.clock.setup_factor >= 0.0)) Lexer::fail(at, "setup factor must be >= 0");
                } else {
                    Lexer::fail(field, "unknown clock field " + Lexer::describe(field));
                }
                lex.expect(";");
            }
            continue;
        } else {
            Lexer::fail(kw, "unexpected " + Lexer::describe(kw));
        }
        lex.expect(";");
    }

    if (!have_hypothesis) Lexer::fail(head, "problem lacks a 'hypothesis' binding");
    if (spec.actions.size() < 2) Lexer::fail(head, "problem needs at least 2 actions");
    for (std::size_t i = 0; i < spec.actions.size(); ++i)
        for (const char* label : {kH1, kH2})
            if (!spec.utilities.count({spec.actions[i], label}))
                Lexer::fail(action_tokens[i], "missing utility for (" + spec.actions[i] + ", " + label + ")");
    for (auto& pr : pending_rules) {
        if (!spec.declared_vitals.count(pr.rule.vital))
            Lexer::fail(pr.vital, "unknown vital sign '" + pr.rule.vital + "' in rule");
        if (!spec.utilities.count(pr.rule.target))
            Lexer::fail(pr.action, "rule targets unknown outcome (" + pr.action.text + ", " + pr.label.text + ")");
        spec.rules.push_back(std::move(pr.rule));
    }
    return spec;
}

}  // namespace delib::io
