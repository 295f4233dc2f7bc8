#include "cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli/report.hpp"
#include "gridcascade/errors.hpp"
#include "gridcascade/experiment.hpp"

namespace gridcascade::cli {
namespace {

CyberSource cyber_source(const CommonArgs& args) {
    auto source = CyberSource::parse(args.cyber);
    if (args.coords) source.power_coordinates = *args.coords;
    if (args.cyber_coords) source.cyber_coordinates = *args.cyber_coords;
    return source;
}

SolverOptions solver_options(const CommonArgs& args) {
    if (!(args.tol > 0.0)) throw InputError("--tol must be positive");
    SolverOptions solver;
    solver.tol = args.tol;
    return solver;
}

RatingOptions rating_options(const CommonArgs& args) {
    if (!(args.alpha > 0.0)) throw InputError("--alpha must be positive");
    if (args.floor_mva < 0.0) throw InputError("--floor must be non-negative");
    return {args.alpha, args.floor_mva};
}

void add_common(CLI::App& cmd, CommonArgs& args) {
    cmd.add_option("--case", args.case_path, "MATPOWER case file")->required();
    cmd.add_option("--cyber", args.cyber, "none, mirror or file:<edge list>")->capture_default_str();
    cmd.add_option("--coords", args.coords, "power bus coordinates (bus_number x y)");
    cmd.add_option("--cyber-coords", args.cyber_coords, "cyber node coordinates (node x y)");
    cmd.add_option("--alpha", args.alpha, "rating margin over base-case flow")->capture_default_str();
    cmd.add_option("--floor", args.floor_mva, "minimum derived rating, MVA")->capture_default_str();
    cmd.add_option("--tol", args.tol, "power-flow mismatch tolerance, p.u.")->capture_default_str();
    cmd.add_flag("--no-taps", args.no_taps, "reject off-nominal transformers");
}

void configure_logging() {
    auto logger = spdlog::get("gridcascade");
    if (!logger) logger = spdlog::stderr_color_mt("gridcascade");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GRIDCASCADE_LOG")) spdlog::cfg::helpers::load_levels(env);
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out) {
    const auto solver = solver_options(args.common);
    auto net = prepare_ratings(load_case(args.common.case_path, {!args.common.no_taps}),
                               rating_options(args.common), solver);
    spdlog::info("{}: {} buses, {} branches, {:.1f} MW load", args.common.case_path, net.buses.size(),
                 net.branches.size(), net.served_load_mw());
    const auto source = cyber_source(args.common);
    auto cyber = build_cyber_topology(source, net);

    std::set<int> buses;
    for (int number : args.attack_buses) {
        const auto id = net.find_bus(number);
        if (!id) throw InputError("attacked bus " + std::to_string(number) + " is not in the case");
        buses.insert(*id);
    }
    std::set<int> branches(args.attack_branches.begin(), args.attack_branches.end());
    if (args.random_buses > 0) {
        std::mt19937_64 rng(run_seed(args.seed, args.random_buses, 0));
        for (int id : sample_attack(rng, args.random_buses, AttackTarget::buses, net)) buses.insert(id);
    }
    if (args.random_branches > 0) {
        std::mt19937_64 rng(run_seed(args.seed ^ 0x5bd1e995ULL, args.random_branches, 0));
        for (int id : sample_attack(rng, args.random_branches, AttackTarget::branches, net)) branches.insert(id);
    }

    RunDescription description{args.common.case_path, args.common.cyber, {buses.begin(), buses.end()},
                               {branches.begin(), branches.end()}};
    const auto result = run_cascade(std::move(net), std::move(cyber), description.attacked_buses,
                                    description.attacked_branches, {solver, true});
    for (const auto& snap : result.grid.phase_log()) {
        spdlog::debug("iteration {} phase {}: {} islands, {:.3f} MW served", snap.iteration,
                      phase_tag(snap.phase), snap.islands.size(), snap.served_load_mw);
    }
    if (args.snapshots) write_run_files(*args.snapshots, result, description);
    out << summary_json(result, description).dump(2) << '\n';

    if (result.abnormal) {
        spdlog::error("cascade hit the iteration cap after {} iterations", result.iterations);
        return exit_abnormal;
    }
    return exit_ok;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    SweepConfig config;
    config.case_path = args.common.case_path;
    config.cyber = cyber_source(args.common);
    config.case_options.allow_taps = !args.common.no_taps;
    config.ratings = rating_options(args.common);
    config.spec.solver = solver_options(args.common);
    if (args.target == "buses") {
        config.spec.target = AttackTarget::buses;
    } else if (args.target == "branches") {
        config.spec.target = AttackTarget::branches;
    } else {
        throw InputError("--target must be buses or branches, got '" + args.target + "'");
    }
    config.spec.k_min = args.k_min;
    config.spec.k_max = args.k_max;
    config.spec.runs = args.runs;
    config.spec.seed = args.seed;
    config.spec.threads =
        args.threads > 0 ? args.threads : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

    spdlog::info("sweep {} k={}..{} runs={} threads={}", args.target, args.k_min, args.k_max, args.runs,
                 config.spec.threads);
    const auto result = run_sweep(config);
    const auto csv = format_sweep_csv(result);
    if (args.out) {
        std::ofstream file(*args.out, std::ios::binary);
        if (!file) throw InputError("cannot write " + *args.out);
        file << csv;
    } else {
        out << csv;
    }
    if (result.abnormal_runs > 0) {
        spdlog::error("{} runs hit the iteration cap", result.abnormal_runs);
        return exit_abnormal;
    }
    return exit_ok;
}

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Cascading-failure simulator for coupled power and communication networks", "gridcascade"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "simulate one cascade");
    add_common(*run_cmd, run.common);
    run_cmd->add_option("--attack-buses", run.attack_buses, "attacked bus numbers")->delimiter(',');
    run_cmd->add_option("--attack-branches", run.attack_branches, "attacked branch rows (0-based)")
        ->delimiter(',');
    run_cmd->add_option("--random-buses", run.random_buses, "add K random buses")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--random-branches", run.random_branches, "add K random branches")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--seed", run.seed, "seed for random attacks")->capture_default_str();
    run_cmd->add_option("--snapshots", run.snapshots, "directory for per-phase snapshots and summary.json");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "blackout probability versus attack size");
    add_common(*sweep_cmd, sweep.common);
    sweep_cmd->add_option("--target", sweep.target, "buses or branches")->capture_default_str();
    sweep_cmd->add_option("--k-min", sweep.k_min)->capture_default_str();
    sweep_cmd->add_option("--k-max", sweep.k_max)->capture_default_str();
    sweep_cmd->add_option("--runs", sweep.runs, "runs per k")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "master seed")->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "CSV output path (default stdout)");
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run, std::cout);
        return cmd_sweep(sweep, std::cout);
    } catch (const InputError& e) {
        std::cerr << "gridcascade: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "gridcascade: internal error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace gridcascade::cli
