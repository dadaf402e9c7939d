// delib: run, validate and plot deliberation cases.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delib/delib.hpp"

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CliConfig {
    std::string network_path;
    std::string problem_path;
    std::string policy = "myopic";
    std::string trace_path;
    std::string plot_path;
    std::string trace_format = "csv";
    std::string network_format = "auto";
    std::optional<double> cost_per_instantiation;
    std::optional<double> meta_cost;
    std::uint64_t seed = 0;
    std::vector<std::string> evidence;
};

delib::io::NetworkFormat network_format(const std::string& s) {
    if (s == "native") return delib::io::NetworkFormat::native;
    if (s == "bif") return delib::io::NetworkFormat::bif;
    return delib::io::NetworkFormat::automatic;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw delib::Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw delib::Error("failed writing '" + path + "'");
}

std::string label_of(const std::string& path) { return std::filesystem::path(path).filename().string(); }

// Prefixes parse errors with the file they came from.
template <class F>
auto with_path(const std::string& path, F&& load) {
    try {
        return load();
    } catch (const delib::ParseError& e) {
        throw delib::Error(path + ": " + e.what());
    }
}

delib::DecisionProblemSpec load_problem(const std::string& path) {
    return with_path(path, [&] { return delib::io::parse_decision_problem(delib::io::read_file(path)); });
}

int cmd_run(const CliConfig& cfg) {
    const auto net = with_path(cfg.network_path, [&] {
        return delib::io::load_network(cfg.network_path, network_format(cfg.network_format));
    });
    auto spec = load_problem(cfg.problem_path);
    for (const auto& item : cfg.evidence) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw delib::ValidationError("--evidence expects VAR=STATE, got '" + item + "'");
        spec.evidence.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    const auto policy = delib::Policy::parse(cfg.policy);

    delib::RunConfig rc;
    rc.cost_per_instantiation = cfg.cost_per_instantiation;
    rc.meta_cost = cfg.meta_cost;
    rc.network_label = label_of(cfg.network_path);
    rc.problem_label = label_of(cfg.problem_path);
    rc.seed = cfg.seed;
    const auto result = delib::run_case(net, spec, policy, rc);

    if (!cfg.trace_path.empty())
        write_file(cfg.trace_path, delib::io::write_trace(result.trace, cfg.trace_format == "text"
                                                                             ? delib::io::TraceFormat::text
                                                                             : delib::io::TraceFormat::csv));
    if (!cfg.plot_path.empty()) write_file(cfg.plot_path, delib::emit_plot_data(result));

    using delib::detail::plot_number;
    for (const auto& r : result.customization)
        std::cout << "customization: " << (r.applied ? "applied" : "skipped") << ": " << r.note << '\n';
    std::cout << "recommendation: " << result.recommendation << '\n';
    std::cout << "halt reason: " << delib::to_string(result.halt_reason) << '\n';
    std::cout << "halt step: " << result.halt_step << " of " << result.schedule_length << '\n';
    std::cout << "halt vtime: " << plot_number(result.halt_vtime) << '\n';
    std::cout << "final bounds: [" << plot_number(result.final_bounds.lb) << ", "
              << plot_number(result.final_bounds.ub) << "]\n";
    if (result.exact_posterior) std::cout << "exact posterior: " << plot_number(*result.exact_posterior) << '\n';
    return 0;
}

int cmd_validate(const CliConfig& cfg) {
    const auto parsed = with_path(cfg.network_path, [&] {
        return delib::io::read_network_file(cfg.network_path, network_format(cfg.network_format));
    });
    const auto& net = parsed.network;
    const auto report = delib::validate_network(net);
    for (const auto& issue : report.issues) {
        std::cout << (issue.severity == delib::Severity::error ? "error" : "warning") << ": " << issue.message;
        if (!issue.location.empty()) std::cout << " (" << issue.location << ')';
        std::cout << '\n';
    }
    std::cout << net.size() << " variables, " << net.edge_count() << " edges: " << (report.ok() ? "ok" : "invalid")
              << '\n';
    return report.ok() ? 0 : kExitInvalid;
}

int cmd_plot(const CliConfig& cfg) {
    const auto trace =
        with_path(cfg.trace_path, [&] { return delib::io::read_trace(delib::io::read_file(cfg.trace_path)); });
    const auto dp = delib::decision_from_spec(load_problem(cfg.problem_path));
    const std::string text = delib::emit_plot_data(trace, dp);
    if (cfg.plot_path.empty())
        std::cout << text;
    else
        write_file(cfg.plot_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delib: time-critical decisions from anytime belief-network inference"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto add_network = [&](CLI::App* sub) {
        sub->add_option("--network", cfg.network_path, "Belief network file (native or .bif)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--network-format", cfg.network_format, "Network format: auto, native or bif")
            ->check(CLI::IsMember({"auto", "native", "bif"}));
    };

    auto* run = app.add_subcommand("run", "Run a case: interleave inference with metareasoning");
    add_network(run);
    run->add_option("--problem", cfg.problem_path, "Decision problem file")->required()->check(CLI::ExistingFile);
    run->add_option("--policy", cfg.policy, "Stopping policy: myopic, lookahead:K (K >= 2) or dominance-only");
    run->add_option("--trace", cfg.trace_path, "Write the trace to this file");
    run->add_option("--trace-format", cfg.trace_format, "Trace format: csv or text")
        ->check(CLI::IsMember({"csv", "text"}));
    run->add_option("--plot", cfg.plot_path, "Write plot tables to this file");
    run->add_option("--cost-per-instantiation", cfg.cost_per_instantiation,
                    "Virtual seconds per cutset instantiation (overrides the problem)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--meta-cost", cfg.meta_cost, "Virtual seconds per metareasoning evaluation")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--seed", cfg.seed, "Seed recorded in the trace header");
    run->add_option("--evidence", cfg.evidence, "Extra evidence VAR=STATE (repeatable)");

    auto* validate = app.add_subcommand("validate", "Check a network and print its validation report");
    add_network(validate);

    auto* plot = app.add_subcommand("plot", "Re-emit plot tables from a saved trace");
    plot->add_option("--trace", cfg.trace_path, "Saved trace (csv or text)")->required()->check(CLI::ExistingFile);
    plot->add_option("--problem", cfg.problem_path, "Decision problem the trace was run with")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--plot", cfg.plot_path, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(cfg);
        if (validate->parsed()) return cmd_validate(cfg);
        return cmd_plot(cfg);
    } catch (const delib::ZeroEvidenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const delib::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const delib::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
