#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "chq/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Radial ground states and identity checks for the p-Laplacian Choquard equation"};
    app.require_subcommand(1);

    int info_n = 3;
    double info_p = 2.0, info_alpha = 2.0;
    auto* info = app.add_subcommand("info", "Print critical exponents for (N, p, alpha)");
    info->add_option("--N", info_n, "space dimension")->required();
    info->add_option("--p", info_p, "p-Laplacian exponent")->required();
    info->add_option("--alpha", info_alpha, "Riesz order")->required();

    std::string solve_config, solve_cache;
    auto* solve = app.add_subcommand("solve", "Compute a ground state from a config file");
    solve->add_option("--config", solve_config, "config file")->required();
    solve->add_option("--kernel-cache", solve_cache, "kernel cache directory");

    std::string verify_profile, verify_config, verify_cache;
    bool verify_assert = false;
    auto* verify = app.add_subcommand("verify", "Run the identity suite on a profile");
    verify->add_option("--profile", verify_profile, "profile CSV")->required();
    verify->add_option("--config", verify_config, "config file")->required();
    verify->add_option("--kernel-cache", verify_cache, "kernel cache directory");
    verify->add_flag("--assert", verify_assert, "apply acceptance thresholds, nonzero exit on violation");

    std::string sweep_config, sweep_qmin, sweep_qmax, sweep_output;
    int sweep_steps = 0;
    auto* sweep = app.add_subcommand("sweep", "Existence-window sweep over the exponent q");
    sweep->add_option("--config", sweep_config, "config file")->required();
    sweep->add_option("--q-min", sweep_qmin, "lowest exponent (decimal or fraction like 5/3)")->required();
    sweep->add_option("--q-max", sweep_qmax, "highest exponent")->required();
    sweep->add_option("--steps", sweep_steps, "number of sweep points")->required();
    sweep->add_option("--output", sweep_output, "CSV output path (default stdout)");

    std::optional<double> selftest_alpha;
    std::string selftest_cache;
    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle suite");
    selftest->add_option("--alpha", selftest_alpha, "validation probe for the Riesz order");
    selftest->add_option("--cache", selftest_cache, "kernel cache file to integrity-check");

    CLI11_PARSE(app, argc, argv);

    if (info->parsed()) return chq::cmd_info(info_n, info_p, info_alpha, std::cout);
    if (solve->parsed()) return chq::cmd_solve(solve_config, solve_cache, std::cout);
    if (verify->parsed())
        return chq::cmd_verify(verify_profile, verify_config, verify_assert, verify_cache, std::cout);
    if (sweep->parsed()) {
        if (sweep_output.empty())
            return chq::cmd_sweep(sweep_config, sweep_qmin, sweep_qmax, sweep_steps, std::cout,
                                  std::cerr);
        std::ofstream out(sweep_output, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open " << sweep_output << "\n";
            return chq::kExitUsage;
        }
        return chq::cmd_sweep(sweep_config, sweep_qmin, sweep_qmax, sweep_steps, out, std::cerr);
    }
    return chq::cmd_selftest(selftest_alpha, selftest_cache, std::cout);
}
