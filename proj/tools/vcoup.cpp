// vcoup — run and validate vacuum-coupling scenario configs.

#include <cstdio>
#include <filesystem>

#include <CLI11.hpp>

#include "vcoup/scenario.hpp"

namespace {

int report_issues(const vcoup::ValidationResult& res) {
    for (const auto& issue : res.issues)
        std::fprintf(stderr, "config error: %s: %s\n", issue.field.c_str(),
                     issue.message.c_str());
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vacuum-mediated coupling scenarios"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int threads = 0;

    auto* run = app.add_subcommand("run", "validate and execute a scenario");
    run->add_option("config", config_path, "scenario config (JSON)")
        ->required();
    run->add_option("--output-dir", output_dir,
                    "override the config's output directory");
    run->add_option("--threads", threads, "worker thread cap (0 = default)");

    auto* validate =
        app.add_subcommand("validate", "check a config without running");
    validate->add_option("config", config_path, "scenario config (JSON)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    const auto res = vcoup::validate_config(config_path);
    if (!res.ok) return report_issues(res);

    if (validate->parsed()) {
        std::printf("ok: %s scenario, %zu issue(s)\n",
                    vcoup::to_string(res.config->kind).c_str(),
                    res.issues.size());
        return 0;
    }

    const std::filesystem::path out =
        output_dir.empty() ? res.config->output_dir : output_dir;
    try {
        const auto report = vcoup::run_scenario(*res.config, out, threads);
        std::printf("wrote %zu file(s) to %s in %.3f s\n",
                    report.outputs.size() + 1, out.string().c_str(),
                    report.wall_clock_seconds);
        if (!report.converged) {
            std::fprintf(stderr, "convergence failure: %s\n",
                         report.convergence_message.c_str());
            return 3;
        }
        return 0;
    } catch (const vcoup::ConvergenceError& e) {
        std::fprintf(stderr, "convergence failure: %s\n", e.what());
        return 3;
    } catch (const vcoup::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
