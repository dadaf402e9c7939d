#include <gtest/gtest.h>

#include <random>

#include "delib/io/network_text.hpp"
#include "delib/io/problem_text.hpp"
#include "delib/io/trace.hpp"
#include "delib/elimination.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace delib;
using namespace delib::io;

namespace {

const std::string kFixtures = DELIB_FIXTURE_DIR;
const std::string kData = DELIB_DATA_DIR;

// Runs `f`, expecting a ParseError at (line, column) whose message contains `needle`.
template <class F>
void expect_parse_error(F&& f, std::size_t line, std::size_t column, const std::string& needle) {
    try {
        f();
        ADD_FAILURE() << "no ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), line) << e.what();
        EXPECT_EQ(e.column(), column) << e.what();
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(NativeNetwork, ParsesOutOfOrderParents) {
    const auto net = load_network(kFixtures + "/diamond.net");
    EXPECT_EQ(net.name, "diamond");
    EXPECT_EQ(net.provenance, "four-node loop for unit tests");
    ASSERT_EQ(net.size(), 4u);
    EXPECT_EQ(net[0].name, "D");
    EXPECT_EQ(net[0].parents, (std::vector<VarId>{2, 3}));
    const double p = exact_posterior(net, {net.index_of("A"), 0}, Evidence{{net.index_of("D"), 0}});
    EXPECT_NEAR(p, 0.7151321056845477, 1e-12);
}

TEST(NativeNetwork, RoundTripIsExact) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 40; ++i) {
        auto net = oracle::random_loopy_network(rng, 3 + i % 9);
        net.name = "r" + std::to_string(i);
        net.provenance = "random fixture";
        const std::string text = serialize_network(net);
        const auto back = parse_network_text(text);
        ASSERT_EQ(back.size(), net.size());
        EXPECT_EQ(back.name, net.name);
        EXPECT_EQ(back.provenance, net.provenance);
        for (VarId v = 0; v < net.size(); ++v) {
            EXPECT_EQ(back[v].name, net[v].name);
            EXPECT_EQ(back[v].states, net[v].states);
            EXPECT_EQ(back[v].parents, net[v].parents);
            EXPECT_EQ(back[v].cpt, net[v].cpt);
        }
        EXPECT_EQ(serialize_network(back), text);
    }
}

TEST(NativeNetwork, QuotesAwkwardNames) {
    auto net = fixture::chain3();
    net.variables[0].name = "has space";
    net.variables[1].states = {"a;b", "{x}"};
    const auto back = parse_network_text(serialize_network(net));
    EXPECT_EQ(back[0].name, "has space");
    EXPECT_EQ(back[1].states, net.variables[1].states);
}

TEST(NativeNetwork, UndeclaredParentIsPositioned) {
    expect_parse_error([] { load_network(kFixtures + "/malformed.net"); }, 3, 34, "undeclared parent 'Q'");
}

TEST(NativeNetwork, CycleFailsAtLoadButReadsForReport) {
    expect_parse_error([] { load_network(kFixtures + "/cyclic.net"); }, 3, 10, "directed cycle");
    const auto parsed = read_network_file(kFixtures + "/cyclic.net");
    const auto report = validate_network(parsed.network);
    EXPECT_EQ(report.error_count(), 2u);
}

TEST(NativeNetwork, HeaderErrors) {
    expect_parse_error([] { parse_network_text("delib-net 1;"); }, 1, 1, "expected 'delib-network' header");
    expect_parse_error([] { parse_network_text("delib-network 2;"); }, 1, 15, "unsupported schema version 2");
    expect_parse_error([] { parse_network_text("delib-network 1;\nvariable A { states t f; shape x; }"); }, 2, 26,
                       "unknown variable field");
    expect_parse_error([] { parse_network_text("delib-network 1;\nvariable A { cpt 1; }"); }, 2, 10, "has no states");
    expect_parse_error([] { parse_network_text("delib-network 1;\nvariable A { states t f; cpt 0.5 0.5 }"); }, 2, 38,
                       "expected probability, found '}'");
}

TEST(Bif, ParsesTableAndRowForms) {
    const auto net = load_network(kFixtures + "/tiny.bif");
    EXPECT_EQ(net.name, "tiny");
    ASSERT_EQ(net.size(), 2u);
    EXPECT_EQ(net[1].states, (std::vector<std::string>{"yes", "no"}));
    EXPECT_EQ(net[1].cpt, (std::vector<double>{0.9, 0.1, 0.1, 0.9}));
    // 0.2 * 0.9 / (0.2 * 0.9 + 0.8 * 0.1)
    EXPECT_NEAR(exact_posterior(net, {0, 0}, Evidence{{1, 0}}), 0.18 / 0.26, 1e-12);
}

TEST(Bif, RenormalizesRoundedRows) {
    const auto net = parse_bif_subset(
        "network n {}\nvariable A { type discrete [ 3 ] { a, b, c }; }\n"
        "probability ( A ) { table 0.3333333, 0.3333333, 0.3333333; }\n");
    double sum = 0.0;
    for (double p : net[0].cpt) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Bif, Diagnostics) {
    const std::string head = "network n {}\nvariable A { type discrete [ 2 ] { a, b }; }\n";
    expect_parse_error([&] { parse_bif_subset(head + "probability ( A ) { table 0.5; }"); }, 3, 21,
                       "CPT arity mismatch");
    expect_parse_error([&] { parse_bif_subset(head + "probability ( B ) { table 0.5, 0.5; }"); }, 3, 15,
                       "undeclared variable 'B'");
    expect_parse_error([&] { parse_bif_subset(head + "variable C { type continuous; }"); }, 3, 19,
                       "unsupported construct");
    expect_parse_error([&] { parse_bif_subset(head); }, 2, 10, "no probability block");
    expect_parse_error([&] { parse_bif_subset("network n {}\nvariable A { type discrete [ 3 ] { a, b }; }"); }, 2, 30,
                       "declared 3 states but listed 2");
}

TEST(Bif, AlarmLoads) {
    const auto net = load_network(kData + "/alarm.bif");
    EXPECT_EQ(net.size(), 37u);
    EXPECT_EQ(net.edge_count(), 46u);
    EXPECT_TRUE(validate_network(net).ok());
}

TEST(Problem, ParsesEveryConstruct) {
    const auto spec = parse_decision_problem(read_file(kFixtures + "/tiny.problem"));
    EXPECT_EQ(spec.name, "tiny");
    EXPECT_EQ(spec.hypothesis_variable, "Rain");
    EXPECT_EQ(spec.hypothesis_state, "yes");
    ASSERT_EQ(spec.evidence.size(), 1u);
    EXPECT_EQ(spec.actions, (std::vector<std::string>{"umbrella", "none"}));
    const auto& h1 = spec.utilities.at({"umbrella", "H1"});
    ASSERT_TRUE(std::holds_alternative<PiecewiseDecay>(h1.decay));
    EXPECT_EQ(std::get<PiecewiseDecay>(h1.decay).segments.size(), 2u);
    const auto& h2 = spec.utilities.at({"umbrella", "H2"});
    ASSERT_TRUE(std::holds_alternative<LinearDecay>(h2.decay));
    EXPECT_EQ(std::get<LinearDecay>(h2.decay).floor, 0.2);
    EXPECT_EQ(spec.declared_vitals, (std::set<std::string>{"pressure", "humidity"}));
    EXPECT_EQ(spec.vitals.at("pressure"), 1020.0);
    EXPECT_EQ(spec.vitals.count("humidity"), 0u);
    ASSERT_EQ(spec.rules.size(), 1u);
    EXPECT_EQ(spec.rules[0].parameter, DecayParameter::initial);
    EXPECT_EQ(spec.clock.cost_per_instantiation, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(spec.clock.meta_cost, 0.1);
    EXPECT_EQ(spec.clock.setup_factor, 0.0);
}

TEST(Problem, ShippedCasesParse) {
    for (const char* name : {"respiratory_steep", "respiratory_mild", "respiratory_reflex", "chf", "chf_critical",
                             "lookahead"}) {
        const auto spec = parse_decision_problem(read_file(kData + "/cases/" + name + ".problem"));
        EXPECT_EQ(spec.actions.size(), 2u) << name;
        EXPECT_EQ(spec.utilities.size(), 4u) << name;
    }
}

TEST(Problem, MissingUtilityIsPositionedAtAction) {
    expect_parse_error([] { parse_decision_problem(read_file(kFixtures + "/missing_utility.problem")); }, 3, 8,
                       "missing utility for (umbrella, H2)");
}

TEST(Problem, Diagnostics) {
    const std::string head = "delib-problem 1;\nhypothesis X = t;\n";
    const std::string none = "action b { H1 { u0 0; } H2 { u0 1; } }\n";
    expect_parse_error(
        [&] { parse_decision_problem(head + "action a { H1 { u0 1; decay wobble 2; } H2 { u0 1; } }\n" + none); }, 3,
        29, "unknown decay form");
    expect_parse_error(
        [&] {
            parse_decision_problem(head + "action a { H1 { u0 1; } H2 { u0 0; } }\n" + none +
                                   "rule pulse < 50 set k a H1 = 0.1;\n");
        },
        5, 6, "unknown vital sign 'pulse'");
    expect_parse_error([&] { parse_decision_problem(head + none); }, 1, 1, "at least 2 actions");
    expect_parse_error([&] { parse_decision_problem("delib-problem 1;\n" + none); }, 1, 1, "lacks a 'hypothesis'");
    expect_parse_error(
        [&] { parse_decision_problem(head + "action a { H1 { u0 1; decay exp -1; } H2 { u0 0; } }\n" + none); }, 3, 33,
        "decay rate must be >= 0");
    expect_parse_error(
        [&] {
            parse_decision_problem(head + "action a { H1 { u0 1; decay piecewise { at 5 constant; }; } H2 { u0 0; } }\n" +
                                   none);
        },
        3, 44, "first piecewise segment must start at 0");
    expect_parse_error([&] { parse_decision_problem(head + none + none); }, 4, 8, "duplicate action 'b'");
}

TEST(Trace, CsvAndTextRoundTrip) {
    TraceFile t;
    t.network = "alarm.bif";
    t.problem = "case one.problem";
    t.policy = "lookahead:3";
    t.seed = 42;
    t.records.push_back({0, 0.0144, 0.0, 1.0, 0.5, 0.4, 0.25, "treat", TraceStatus::proceed});
    t.records.push_back({1, 1.0644, 0.1, 0.3, 0.2, std::nullopt, std::nullopt, "wait", TraceStatus::dominant});
    for (auto fmt : {TraceFormat::csv, TraceFormat::text}) {
        const auto text = write_trace(t, fmt);
        const auto back = read_trace(text);
        EXPECT_EQ(back, t);
        EXPECT_EQ(write_trace(back, fmt), text);
    }
    EXPECT_EQ(write_trace_csv(t).substr(0, 15), "# delib-trace 1");
    EXPECT_NE(write_trace_csv(t).find("1,1.0644,0.1,0.3,0.2,,,wait,dominant\n"), std::string::npos);
}

TEST(Trace, TwelveSignificantDigits) {
    TraceFile t;
    t.records.push_back({0, 1.0 / 3.0, 0.0, 1.0, 0.5, std::nullopt, std::nullopt, "a", TraceStatus::reflex});
    EXPECT_NE(write_trace_csv(t).find("0,0.333333333333,0,1,0.5,,,a,reflex"), std::string::npos);
}

TEST(Trace, InvariantsChecked) {
    expect_parse_error([] { read_trace_csv("step\n"); }, 1, 1, "missing '# delib-trace' header");
    EXPECT_THROW(read_trace(read_file(kFixtures + "/stalled_trace.csv")), ValidationError);
    TraceFile t;
    t.records.push_back({0, 1.0, 0.3, 0.4, 0.5, std::nullopt, std::nullopt, "a", TraceStatus::proceed});
    EXPECT_THROW(check_trace(t), ValidationError);
}

TEST(Trace, CsvDiagnostics) {
    const std::string head = "# delib-trace 1\nstep,vtime,lb,ub,mean,pstar,evc,candidate_action,status\n";
    expect_parse_error([&] { read_trace_csv(head + "0,1,0,1,0.5,,,a,finished\n"); }, 3, 17, "unknown status");
    expect_parse_error([&] { read_trace_csv(head + "0,x,0,1,0.5,,,a,reflex\n"); }, 3, 3, "bad number 'x'");
    expect_parse_error([&] { read_trace_csv(head + "0,1,0\n"); }, 3, 1, "expected 9 fields");
    expect_parse_error([&] { read_trace_csv("# delib-trace 7\n"); }, 1, 1, "unsupported trace schema");
}
