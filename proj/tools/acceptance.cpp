// Acceptance run: one PASS/FAIL line per criterion, each with its runtime budget.
// Arguments (optional): criterion numbers to run, e.g. `acceptance 1 9`.

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modlab/harness/config.hpp"
#include "modlab/harness/report.hpp"
#include "modlab/harness/sweeps.hpp"
#include "modlab/harness/verify.hpp"

namespace {

using namespace modlab::harness;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome from_checks(const std::vector<Check>& checks)
{
    Outcome o{!checks.empty(), {}};
    int failed = 0;
    for (const auto& c : checks)
        if (!c.pass) {
            o.pass = false;
            ++failed;
            o.detail += fmt::format("; {} = {:.4g} vs {:.4g}", c.name, c.value, c.threshold);
        }
    o.detail = fmt::format("{} checks, {} failed", checks.size(), failed) + o.detail;
    return o;
}

Outcome from_result(const SweepResult& r)
{
    Outcome o{!r.series.empty(), {}};
    for (const auto& s : r.series)
        for (const auto& v : s.verdicts) {
            if (v.status != Verdict::Status::pass) o.pass = false;
            o.detail += fmt::format("{}{} {}: {} [{}]", o.detail.empty() ? "" : "; ", s.label, v.name,
                                    to_string(v.status), v.detail);
        }
    return o;
}

ExperimentConfig config_from(const std::string& text)
{
    const auto parsed = parse_config_text(text);
    if (!parsed.config) {
        std::string msg = "invalid built-in configuration";
        for (const auto& e : parsed.errors) msg += "; " + format_error(e);
        throw std::runtime_error(msg);
    }
    return *parsed.config;
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / fmt::format("riesz_modlab_acceptance_{}", name);
    fs::remove_all(dir);
    return dir;
}

std::string read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const auto config = config_from(
        "kind = sweep-inertia\nnx = 64\nnv = 128\neps = 0.1, 0.05\nt_end = 0.25\nframe_stride = 5\n");
    std::vector<fs::path> dirs{scratch_dir("det_a"), scratch_dir("det_b")};
    for (const auto& d : dirs) emit_report(run_sweep_inertia(config), d);
    int compared = 0;
    Outcome o{true, {}};
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        const auto other = dirs[1] / entry.path().filename();
        if (!fs::exists(other) || read_bytes(entry.path()) != read_bytes(other)) {
            o.pass = false;
            o.detail += fmt::format("{} differs; ", entry.path().filename().string());
        }
    }
    if (compared == 0) o.pass = false;
    o.detail += fmt::format("{} CSV files compared byte for byte", compared);
    for (const auto& d : dirs) fs::remove_all(d);
    return o;
}

Outcome energy_monitors()
{
    const auto inertia = run_single(config_from("kind = single-run\nregime = small-inertia\n"));
    const auto hydro = run_single(config_from("kind = single-run\nregime = hydro-sigma0, hydro-sigma-eps\n"));
    auto a = from_result(inertia), b = from_result(hydro);
    return {a.pass && b.pass, a.detail + "; " + b.detail};
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    spdlog::set_level(spdlog::level::warn);
    const ExperimentConfig defaults;
    const std::vector<Criterion> criteria{
        {1, "convolution oracle equivalence", 30, [] { return from_checks(verify_convolution()); }},
        {2, "positivity of the modulated energy", 60,
         [&] { return from_checks(verify_positivity(defaults.positivity_cases, defaults.seed)); }},
        {3, "Coulomb commutator constant", 300,
         [&] { return from_checks(verify_commutator(defaults.commutator_cases, defaults.seed)); }},
        {4, "extension recursions and Leibniz expansion", 120,
         [&] { return from_checks(verify_recursions(defaults.seed)); }},
        {5, "integral identities", 600,
         [&] { return from_checks(verify_identities(defaults.xi_max, defaults.radius)); }},
        {6, "small-inertia sweep", 600,
         [] { return from_result(run_sweep_inertia(config_from("kind = sweep-inertia\n"))); }},
        {7, "hydrodynamic sweep", 900,
         [] { return from_result(run_sweep_hydro(config_from("kind = sweep-hydro\n"))); }},
        {8, "energy monitors", 300, energy_monitors},
        {9, "W1 oracle", 30, [&] { return from_checks(verify_w1(defaults.w1_cases, defaults.seed)); }},
        {10, "determinism of sweep-inertia CSVs", 600, determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    bool all = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("aborted: {}", e.what())};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds < c.budget_s;
        const bool pass = o.pass && in_budget;
        all = all && pass;
        fmt::print("{} {:2d} {} ({:.1f} s of {:.0f} s{}): {}\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                   c.budget_s, in_budget ? "" : ", over budget", o.detail);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
