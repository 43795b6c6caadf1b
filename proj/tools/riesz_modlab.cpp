#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <exception>
#include <optional>
#include <string>

#include "modlab/harness/config.hpp"
#include "modlab/harness/report.hpp"
#include "modlab/harness/sweeps.hpp"

namespace {

using namespace modlab::harness;

constexpr int exit_failures = 1;
constexpr int exit_usage = 2;

std::optional<ExperimentConfig> load_config(const std::string& path, ExperimentKind expected)
{
    const auto parsed = parse_config_file(path);
    if (!parsed.config) {
        fmt::print(stderr, "{}: invalid configuration\n", path);
        for (const auto& e : parsed.errors) fmt::print(stderr, "  {}\n", format_error(e));
        return std::nullopt;
    }
    if (parsed.config->kind != expected) {
        fmt::print(stderr, "{}: kind is '{}' but this subcommand runs '{}'\n", path, to_string(parsed.config->kind),
                   to_string(expected));
        return std::nullopt;
    }
    return parsed.config;
}

int finish(const SweepResult& result, const std::string& out)
{
    emit_report(result, out);
    fmt::print("{}", summary_text(result));
    fmt::print("report written to {}\n", out);
    const auto failures = failing_verdicts(result);
    if (failures.empty()) return 0;
    fmt::print(stderr, "{} verdict(s) did not pass:\n", failures.size());
    for (const auto& f : failures) fmt::print(stderr, "  {}\n", f);
    return exit_failures;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Riesz-interaction kinetic limits: operator checks, eps-sweeps and reports"};
    app.require_subcommand(1);
    std::string config_path, out_dir, from_dir;

    auto* verify = app.add_subcommand("verify-ops", "operator and identity checks");
    verify->add_option("--config", config_path, "configuration file (kind = verify-ops)");
    auto* inertia = app.add_subcommand("sweep-inertia", "small-inertia eps-sweep");
    auto* hydro = app.add_subcommand("sweep-hydro", "hydrodynamic eps-sweep");
    auto* run = app.add_subcommand("run", "single run with energy monitors");
    for (auto* sub : {inertia, hydro, run})
        sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    auto* report = app.add_subcommand("report", "refit and re-render a stored report");
    report->add_option("--from", from_dir, "report directory")->required()->check(CLI::ExistingDirectory);
    for (auto* sub : {verify, inertia, hydro, run, report})
        sub->add_option("--out", out_dir, "output directory (default: the config's output key)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            const auto result = load_report(from_dir);
            return finish(result, out_dir.empty() ? from_dir : out_dir);
        }
        ExperimentKind kind = ExperimentKind::verify_ops;
        if (inertia->parsed()) kind = ExperimentKind::sweep_inertia;
        if (hydro->parsed()) kind = ExperimentKind::sweep_hydro;
        if (run->parsed()) kind = ExperimentKind::single_run;

        ExperimentConfig config;
        if (!config_path.empty()) {
            const auto loaded = load_config(config_path, kind);
            if (!loaded) return exit_usage;
            config = *loaded;
        }
        if (!out_dir.empty()) config.output = out_dir;
        spdlog::info("running {} (seed {})", to_string(config.kind), config.seed);
        return finish(run_experiment(config), config.output);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_usage;
    }
}
