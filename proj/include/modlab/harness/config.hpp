#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modlab/kinetic_solver.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab::harness {

enum class ExperimentKind { verify_ops, sweep_inertia, sweep_hydro, single_run };

std::string to_string(ExperimentKind kind);

/// Step-size rule of the kinetic runs. `stable`: dt_factor times the explicit stability step
/// of the limit scheme on the kinetic grid (aggregation bound for small inertia, Courant
/// number dt_factor for Euler-Riesz), rounded down so that t_end is hit exactly.
/// `fixed`: dt as given, also rounded to hit t_end.
enum class DtRule { stable, fixed };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::verify_ops;
    KernelParams kernel{0.5, 1};
    double gamma = 1.0;

    int n_x = 256;
    int n_v = 512;
    double length = 4.0;
    std::optional<double> v_max;  // unset: per-eps value from the preset
    int refine = 4;               // limit grid = refine x kinetic grid
    double xi_max = 6.0;          // half-space height for the grid identities
    double radius = 40.0;         // truncation radius of the extension quadrature

    std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    double t_end = 1.0;
    DtRule dt_rule = DtRule::stable;
    double dt_factor = 0.9;
    double dt = 0.0;

    std::string preset = "bump-inertia-v1";
    std::vector<Regime> regimes{Regime::small_inertia};
    bool muscl_reference = true;
    SlopeRule slopes = SlopeRule::coherent;
    int frame_stride = 20;
    bool dt_refinement = true;  // single-run: repeat at dt/2 for the energy monitors

    std::uint64_t seed = 20261015;
    int positivity_cases = 1000;
    int commutator_cases = 200;
    int w1_cases = 500;

    std::string output = "out";
};

struct ConfigError {
    int line = 0;  // 0 when the error is not tied to one line
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;
};

/// Line-based `key = value` text with `#` comments. Every error is reported, not just the first.
ParseResult parse_config_text(std::string_view text);
ParseResult parse_config_file(const std::filesystem::path& path);

/// Canonical listing of every key with its effective value; parsing it reproduces the config.
std::string echo_config(const ExperimentConfig& config);

std::string format_error(const ConfigError& e);

}  // namespace modlab::harness
