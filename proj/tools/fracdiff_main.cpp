#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

#include "commands.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_st("fracdiff");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FRACDIFF_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fracdiff::cli;
    setup_logging();

    CLI::App app{"Time-fractional nonlocal diffusion: solver and verification harness"};
    app.require_subcommand(1);
    Options opt;

    const auto common = [&opt](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opt.config, "run configuration (JSON)");
        if (config_required) c->required();
        sub->add_option("--out", opt.out, "output directory (overrides the config)");
        sub->add_option("--threads", opt.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "march a configured problem and save the trajectory");
    common(solve, true);
    auto* verify = app.add_subcommand("verify", "run a verification suite on a trajectory");
    common(verify, false);
    verify->add_option("--suite", opt.suite, "maxprinciple | energy | barriers | weakform | uniqueness")->required();
    verify->add_option("--trajectory", opt.trajectory, "trajectory file (solves from --config when absent)");
    auto* degiorgi = app.add_subcommand("degiorgi", "oscillation, Holder and truncation-energy scans");
    common(degiorgi, false);
    degiorgi->add_option("--trajectory", opt.trajectory, "trajectory file (solves from --config when absent)");
    auto* converge = app.add_subcommand("converge", "refinement ladder: differences and weak residuals");
    common(converge, true);
    auto* oracle = app.add_subcommand("oracle", "compare an eigenmode run with the Mittag-Leffler decay");
    common(oracle, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kBadInput;
    }

    if (solve->parsed()) return guarded("solve", cmd_solve, opt);
    if (verify->parsed()) return guarded("verify", cmd_verify, opt);
    if (degiorgi->parsed()) return guarded("degiorgi", cmd_degiorgi, opt);
    if (converge->parsed()) return guarded("converge", cmd_converge, opt);
    return guarded("oracle", cmd_oracle, opt);
}
