// Command-line harness: scenario runs, check suites, bucket sweeps.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical
// failure, 3 failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relmech/config.hpp"
#include "relmech/errors.hpp"
#include "relmech/scenario.hpp"
#include "relmech/suite.hpp"
#include "relmech/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalFailure = 2;
constexpr int kCheckFailure = 3;

int run_config(const std::string& path, bool sweep_only) {
    const auto t0 = std::chrono::steady_clock::now();
    relmech::ScenarioConfig cfg;
    try {
        cfg = relmech::parse_config(path);
    } catch (const relmech::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    if (sweep_only && cfg.scenario != relmech::ScenarioKind::BucketSweep) {
        std::cerr << "config error: sweep requires a bucket_sweep scenario (got "
                  << relmech::to_string(cfg.scenario) << ")\n";
        return kConfigError;
    }

    relmech::RunSummary summary;
    try {
        summary = relmech::run_scenario(cfg, std::cout);
    } catch (const relmech::SolverDiverged& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const relmech::StepRejected& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const relmech::SingularSeparation& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const relmech::DegenerateInertia& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const relmech::Error& e) {
        // remaining typed failures (packet outside the box, invalid model
        // parameters, unwritable outputs) trace back to the configuration
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    if (!std::isfinite(summary.metric_value)) {
        std::cerr << "numerical failure: non-finite " << summary.metric_name << "\n";
        return kNumericalFailure;
    }

    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::fprintf(stderr, "time: %.3f s\n", dt.count());
    return summary.pass ? kOk : kCheckFailure;
}

int run_check(std::uint64_t seed, bool quantum_only) {
    const auto results = quantum_only ? relmech::run_quantum_checks(seed)
                                      : relmech::run_invariant_suite(seed);
    std::cout << "seed=" << seed << "\n";
    relmech::print_property_report(std::cout, results);
    return relmech::all_pass(results) ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relational mechanics toolkit"};
    app.require_subcommand(1);

    std::string run_path;
    CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario config");
    run_cmd->add_option("config", run_path, "scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    std::uint64_t check_seed = 12345;
    bool check_quantum = false;
    CLI::App* check_cmd =
        app.add_subcommand("check", "run the structural invariant suite");
    check_cmd->add_option("--seed", check_seed, "seed for random batteries (default 12345)");
    check_cmd->add_flag("--quantum", check_quantum,
                        "run the pinned operator diagnostics instead of the full suite");

    std::string sweep_path;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a shell-inertia sweep config");
    sweep_cmd->add_option("config", sweep_path, "bucket_sweep scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* version_cmd = app.add_subcommand("version", "print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return kConfigError;
    }

    try {
        if (run_cmd->parsed()) return run_config(run_path, /*sweep_only=*/false);
        if (check_cmd->parsed()) return run_check(check_seed, check_quantum);
        if (sweep_cmd->parsed()) return run_config(sweep_path, /*sweep_only=*/true);
        if (version_cmd->parsed()) {
            std::cout << "relmech " << relmech::kVersionString << "\n";
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
