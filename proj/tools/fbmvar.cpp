#include <iostream>

#include <CLI11.hpp>

#include "fbmvar/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weighted power variations of fractional Brownian motion"};
    app.require_subcommand(1);

    fbmvar::RunArgs run;
    std::uint64_t seed = 0;
    std::size_t replicas = 0;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment plans of a config file");
    run_cmd->add_option("--config", run.config_path, "Experiment config file")->required();
    run_cmd->add_option("--out", run.out_dir, "Output directory")->capture_default_str();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the seed of every plan");
    auto* rep_opt = run_cmd->add_option("--replicas", replicas, "Override the replica count of every plan");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all hardware threads)")
        ->capture_default_str();
    run_cmd->add_flag("--dump-paths", run.dump_paths, "Write replica-0 paths as 'k/n value' text files");

    fbmvar::RegimesArgs regimes;
    auto* reg_cmd = app.add_subcommand("regimes", "Print the (kappa, H) regime table");
    reg_cmd->add_option("--kappa-min", regimes.kappa_min)->capture_default_str();
    reg_cmd->add_option("--kappa-max", regimes.kappa_max)->capture_default_str();
    reg_cmd->add_option("--step", regimes.step, "H grid spacing")->capture_default_str();
    reg_cmd->add_option("--csv", regimes.csv_path, "Also write the table as CSV");

    auto* self_cmd = app.add_subcommand("selftest", "Run the fast invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? 0 : fbmvar::kExitConfig;
    }

    if (*run_cmd) {
        if (*seed_opt) run.seed = seed;
        if (*rep_opt) run.replicas = replicas;
        return fbmvar::cmd_run(run, std::cerr);
    }
    if (*reg_cmd) return fbmvar::cmd_regimes(regimes, std::cout, std::cerr);
    if (*self_cmd) return fbmvar::cmd_selftest(std::cout);
    return fbmvar::kExitFailure;
}
