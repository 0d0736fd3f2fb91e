// Command-line front end: solve, run, sweep, oracle and config show.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "m2m/config.hpp"
#include "m2m/errors.hpp"
#include "m2m/simulator.hpp"
#include "m2m/solver.hpp"

namespace fs = std::filesystem;
using namespace m2m;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kIo = 4 };

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string policies;
};

RunConfig effective_config(const CommonOptions& opts) {
    RunConfig config = opts.config_path.empty() ? parse_config_text("") : load_config(opts.config_path);
    apply_env_overrides(config);
    if (opts.seed) config.seed = *opts.seed;
    if (!opts.policies.empty()) {
        config.policies.clear();
        std::stringstream list(opts.policies);
        for (std::string name; std::getline(list, name, ',');)
            if (!name.empty()) config.policies.push_back(parse_policy_kind(name));
    }
    config.validate();
    return config;
}

fs::path output_path(const CommonOptions& opts, const RunConfig& config, const std::string& fallback) {
    if (!opts.out.empty()) return opts.out;
    return fs::path(config.output_dir) / fallback;
}

void ensure_parent(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_policies) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "root seed, overrides config and environment");
    cmd->add_option("--out", opts.out, "output file");
    if (with_policies)
        cmd->add_option("--policies", opts.policies,
                        "comma separated: pomdp,local_only,coordinator_only,mec_always,random_sense");
}

int cmd_solve(const CommonOptions& opts, std::size_t mtc) {
    const RunConfig config = effective_config(opts);
    const Scenario scenario = generate_scenario(config, config.seed);
    const SliceModel slice = build_slice(config, scenario);
    if (mtc >= slice.ue_ids().size()) throw ConfigError("mtc", "no active device with this index");
    const SolveOptions so = config.solve_options();
    const auto [policy, values] =
        value_iteration(slice.solver_model(mtc), so.horizon, so.grid_step, so.mode.value_or(default_solve_mode(slice.rb_count())));
    const fs::path path = output_path(opts, config, "policy.json");
    auto out = open_output(path);
    out << policy.to_json().dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
    Belief stationary{std::vector<double>(slice.rb_count(), config.rb_process().stationary_idle())};
    std::cout << "policy for device " << slice.ue_ids()[mtc] << " written to " << path.string() << "\n"
              << "expected frame cost from the stationary belief: " << format_number(policy.value(0, stationary))
              << '\n';
    return kOk;
}

int cmd_run(const CommonOptions& opts, const std::string& trace_path) {
    const RunConfig config = effective_config(opts);
    const Scenario scenario = generate_scenario(config, config.seed);
    const SliceModel slice = build_slice(config, scenario);
    const FrameConfig frames = config.frame_config();

    std::vector<ResultRow> rows;
    std::vector<SlotTrace> trace;
    for (PolicyKind kind : config.policies) {
        const auto policies = make_policies(slice, kind, frames.mtc_count, config.solve_options(), config.seed);
        auto result = simulate(slice, policies, frames, !trace_path.empty() && kind == config.policies.front());
        for (const auto& f : result.metrics.frames)
            rows.push_back({config.task_cycles, to_string(kind), f.frame, f.mean_cost, f.total_cost, f.mean_time_s,
                            f.mean_energy_j});
        if (!result.trace.empty()) trace = std::move(result.trace);
    }
    const fs::path path = output_path(opts, config, "run.csv");
    ensure_parent(path);
    emit_results(rows, path);
    if (!trace_path.empty()) {
        auto out = open_output(trace_path);
        write_trace_csv(out, trace);
        if (!out) throw IoError("write failed for " + trace_path);
    }
    std::cout << rows.size() << " rows written to " << path.string() << '\n';
    return kOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& axis_name) {
    const SweepAxis axis = parse_sweep_axis(axis_name);
    const RunConfig config = effective_config(opts);
    const auto rows = run_sweep(config, axis);
    const fs::path path = output_path(opts, config, "sweep_" + to_string(axis) + ".csv");
    ensure_parent(path);
    emit_results(rows, path);
    std::cout << rows.size() << " rows written to " << path.string() << '\n';
    return kOk;
}

int cmd_oracle(const CommonOptions& opts, std::size_t horizon, std::vector<double> belief) {
    const RunConfig config = effective_config(opts);
    if (config.rb_per_network > kOracleMaxRbs)
        throw OracleSizeError("oracle: rb_per_network must be at most " + std::to_string(kOracleMaxRbs));
    const Scenario scenario = generate_scenario(config, config.seed);
    const SliceModel slice = build_slice(config, scenario);
    const SolverModel model = slice.solver_model(0);
    if (belief.empty()) belief.assign(model.rb_count(), config.rb_process().stationary_idle());
    if (belief.size() != model.rb_count()) throw ConfigError("belief", "one idle probability per RB is required");
    const Belief initial{belief};

    const OracleResult oracle = brute_force_oracle(model, horizon, initial);
    const auto [policy, values] = value_iteration(model, horizon, config.grid_step, SolveMode::Exact);
    nlohmann::ordered_json report;
    report["horizon"] = horizon;
    report["belief"] = belief;
    report["oracle_cost"] = oracle.expected_cost;
    report["oracle_action"] = to_string(oracle.first_action);
    report["grid_cost"] = policy.value(0, initial);
    report["grid_action"] = to_string(policy.decide({0, 0, 0}, initial));
    report["abs_difference"] = std::abs(oracle.expected_cost - policy.value(0, initial));
    const std::string text = report.dump(2);
    if (opts.out.empty()) {
        std::cout << text << '\n';
    } else {
        auto out = open_output(opts.out);
        out << text << '\n';
        if (!out) throw IoError("write failed for " + opts.out);
    }
    return kOk;
}

int cmd_config_show(const CommonOptions& opts) {
    const RunConfig config = effective_config(opts);
    const std::string text = to_json(config).dump(2);
    if (opts.out.empty()) {
        std::cout << text << '\n';
    } else {
        auto out = open_output(opts.out);
        out << text << '\n';
        if (!out) throw IoError("write failed for " + opts.out);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slice simulator for sensing, access and offloading decisions of machine-type devices"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::size_t mtc = 0;
    std::string trace_path;
    std::string axis;
    std::size_t oracle_horizon = 3;
    std::vector<double> oracle_belief;

    auto* solve = app.add_subcommand("solve", "solve and serialize the policy of one active device");
    add_common(solve, opts, false);
    solve->add_option("--mtc", mtc, "index among the active devices");

    auto* run = app.add_subcommand("run", "simulate frames for each policy");
    add_common(run, opts, true);
    run->add_option("--trace", trace_path, "per-slot trace CSV of the first policy");

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep task cycles or active device count");
    add_common(sweep_cmd, opts, true);
    sweep_cmd->add_option("--axis", axis, "cycles or mtcs")->required()->check(CLI::IsMember({"cycles", "mtcs"}));

    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum on a tiny instance against the grid solver");
    add_common(oracle, opts, false);
    oracle->add_option("--horizon", oracle_horizon, "slots, at most 5");
    oracle->add_option("--belief", oracle_belief, "idle probability of each RB, comma separated")->delimiter(',');

    auto* config_cmd = app.add_subcommand("config", "configuration utilities");
    config_cmd->require_subcommand(1);
    auto* show = config_cmd->add_subcommand("show", "print the effective configuration");
    add_common(show, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*solve) return cmd_solve(opts, mtc);
        if (*run) return cmd_run(opts, trace_path);
        if (*sweep_cmd) return cmd_sweep(opts, axis);
        if (*oracle) return cmd_oracle(opts, oracle_horizon, oracle_belief);
        if (*show) return cmd_config_show(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InfeasibleSlot& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const OracleSizeError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
