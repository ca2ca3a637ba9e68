// aoi_netcalc - command-line front end: analytical age/delay tail-bound
// sweeps, discrete-event simulation sweeps, and bound-versus-simulation
// comparison, all emitting CSV.
//
// Exit codes: 0 ok, 1 usage/parse error, 2 infeasible scenario,
// 3 dominance violation (compare only).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aoinc/runner.hpp"
#include "aoinc/scenario.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_path;
    double eps = 0.0;  // 0: command default
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t packets = 0;
    int jobs = 0;
    bool dump_config = false;
    double bound_scale = 1.0;  // hidden test hook
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario file (JSON)")->required();
    cmd->add_option("--out", args.out_path, "Write CSV to this path instead of stdout");
    cmd->add_option("--eps", args.eps, "Target exceedance probability");
    cmd->add_option("--seed", args.seed, "Simulation seed override")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--packets", args.packets, "Simulated packets per sweep point");
    cmd->add_option("--jobs", args.jobs, "Worker threads for sweep rows");
    cmd->add_flag("--dump-config", args.dump_config,
                  "Print the normalized scenario JSON and exit");
    cmd->add_option("--test-bound-scale", args.bound_scale,
                    "Internal test hook: scale bound probabilities")
        ->group("");  // hidden
}

int resolve_jobs(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("AOI_NETCALC_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw aoinc::ScenarioError("cannot open output file '" + args.out_path + "'");
    out << text;
}

int run_command(const std::string& name, const CommonArgs& args) {
    aoinc::ScenarioFile scenario = aoinc::load_scenario(args.scenario_path);
    if (args.dump_config) {
        emit(args, aoinc::dump_scenario(scenario));
        return 0;
    }
    aoinc::RunOptions opts;
    opts.jobs = resolve_jobs(args.jobs);
    opts.bound_scale = args.bound_scale;
    const std::uint64_t packets = args.packets ? args.packets : scenario.n_packets;
    const std::uint64_t seed = args.seed_set ? args.seed : scenario.seed;

    if (name == "bound") {
        const double eps = args.eps > 0.0 ? args.eps : scenario.epsilon_bound;
        const auto rows = aoinc::bound_sweep(scenario, eps, opts);
        emit(args, aoinc::bound_csv(rows, scenario.system.splitting.enumerate_weights));
        return 0;
    }
    if (name == "simulate") {
        const double eps = args.eps > 0.0 ? args.eps : scenario.epsilon_sim;
        const auto rows = aoinc::sim_sweep(scenario, eps, packets, seed, opts);
        emit(args, aoinc::sim_csv(rows));
        return 0;
    }
    // compare: bound and simulation at one matched eps (the simulation
    // default unless overridden).
    const double eps = args.eps > 0.0 ? args.eps : scenario.epsilon_sim;
    const auto rows = aoinc::compare_sweep(scenario, eps, packets, seed, opts);
    emit(args, aoinc::compare_csv(rows));
    return aoinc::any_dominance_violation(rows) ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information tail bounds and simulation for parallel FCFS systems"};
    app.require_subcommand(1);

    CommonArgs bound_args, sim_args, cmp_args;
    CLI::App* bound = app.add_subcommand("bound", "Analytical age/delay quantile sweep (CSV)");
    add_common(bound, bound_args);
    CLI::App* simulate = app.add_subcommand("simulate", "Discrete-event simulation sweep (CSV)");
    add_common(simulate, sim_args);
    CLI::App* compare =
        app.add_subcommand("compare", "Joined bound and simulation sweep with dominance check");
    add_common(compare, cmp_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) return run_command("bound", bound_args);
        if (simulate->parsed()) return run_command("simulate", sim_args);
        return run_command("compare", cmp_args);
    } catch (const aoinc::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const aoinc::SimulationOnlyPolicyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const aoinc::InfeasibleBurstinessError& e) {
        std::cerr << "error: infeasible scenario: " << e.what() << "\n";
        return 2;
    } catch (const aoinc::ParameterDomainError& e) {
        std::cerr << "error: infeasible scenario: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
