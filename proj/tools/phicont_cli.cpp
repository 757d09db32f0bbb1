// phicont: sweep the mean value of periodic solutions and verify the results.
//
//   phicont run <config.json> [more configs...]
//   phicont verify <config.json> <branch.csv>
//
// PHICONT_OUTPUT_DIR overrides the output directory of every run.

#include "phicont/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Branches of periodic solutions of phi-Laplacian equations"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    auto* run = app.add_subcommand("run", "Sweep xi and write branch.csv, summary.json, profiles and branch.svg");
    run->add_option("config", configs, "Configuration file(s)")->required()->check(CLI::ExistingFile);

    std::string verify_config, branch_csv;
    auto* verify = app.add_subcommand("verify", "Re-shoot every row of a branch file");
    verify->add_option("config", verify_config, "Configuration file")->required();
    verify->add_option("branch", branch_csv, "branch.csv produced by run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : phicont::cli::kBadInput;
    }

    if (*run) {
        int status = phicont::cli::kOk;
        for (const auto& c : configs) status = std::max(status, phicont::cli::run(c));
        return status;
    }
    return phicont::cli::verify(verify_config, branch_csv);
}
