#include "modlab/harness/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "modlab/harness/presets.hpp"

namespace modlab::harness {

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::verify_ops: return "verify-ops";
    case ExperimentKind::sweep_inertia: return "sweep-inertia";
    case ExperimentKind::sweep_hydro: return "sweep-hydro";
    case ExperimentKind::single_run: return "single-run";
    }
    return "?";
}

std::string format_error(const ConfigError& e)
{
    return e.line > 0 ? fmt::format("line {}: {}", e.line, e.message) : e.message;
}

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

std::optional<double> to_double(const std::string& s)
{
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(const std::string& s)
{
    long long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(const std::string& s)
{
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    return std::nullopt;
}

std::optional<ExperimentKind> to_kind(const std::string& s)
{
    for (auto k : {ExperimentKind::verify_ops, ExperimentKind::sweep_inertia, ExperimentKind::sweep_hydro,
                   ExperimentKind::single_run})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

ExperimentConfig defaults_for(ExperimentKind kind, const std::vector<Regime>* regimes)
{
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
    case ExperimentKind::verify_ops: break;
    case ExperimentKind::sweep_inertia: break;
    case ExperimentKind::sweep_hydro:
        c.n_v = 256;
        c.t_end = 0.5;
        c.dt_factor = 0.4;
        c.preset = "bump-hydro-v1";
        c.regimes = {Regime::hydro_sigma0, Regime::hydro_sigma_eps};
        c.muscl_reference = false;
        c.frame_stride = 5;
        break;
    case ExperimentKind::single_run: {
        c.n_x = 128;
        c.n_v = 256;
        c.t_end = 0.5;
        c.eps = {0.05};
        if (regimes) c.regimes = *regimes;
        const bool hydro = c.regimes.front() != Regime::small_inertia;
        c.dt_factor = hydro ? 0.4 : 0.9;
        c.preset = hydro ? "bump-hydro-v1" : "bump-inertia-v1";
        c.muscl_reference = !hydro;
        c.frame_stride = 1;
        break;
    }
    }
    return c;
}

std::string list_to_string(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
    return s;
}

}  // namespace

ParseResult parse_config_text(std::string_view text)
{
    ParseResult result;
    auto& errors = result.errors;
    std::map<std::string, Entry> entries;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back({line_no, fmt::format("expected 'key = value', got '{}'", line)});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back({line_no, "empty key"});
            continue;
        }
        if (const auto it = entries.find(key); it != entries.end()) {
            errors.push_back(
                {line_no, fmt::format("duplicate key '{}' (lines {} and {})", key, it->second.line, line_no)});
            continue;
        }
        entries[key] = {value, line_no};
    }

    const auto kind_it = entries.find("kind");
    if (kind_it == entries.end()) {
        errors.insert(errors.begin(), {0, "missing kind"});
        return result;
    }
    const auto kind = to_kind(kind_it->second.value);
    if (!kind) {
        errors.push_back({kind_it->second.line,
                          fmt::format("kind must be verify-ops, sweep-inertia, sweep-hydro or single-run, got '{}'",
                                      kind_it->second.value)});
        return result;
    }

    std::vector<Regime> regimes;
    int regime_line = 0;
    if (const auto it = entries.find("regime"); it != entries.end()) {
        regime_line = it->second.line;
        for (const auto& name : split_list(it->second.value)) {
            try {
                regimes.push_back(parse_regime(name));
            } catch (const std::invalid_argument&) {
                errors.push_back({regime_line, fmt::format("key 'regime' expects small-inertia, hydro-sigma0 or "
                                                           "hydro-sigma-eps, got '{}'",
                                                           name)});
            }
        }
    }
    ExperimentConfig c = defaults_for(*kind, regimes.empty() ? nullptr : &regimes);
    if (!regimes.empty()) c.regimes = regimes;

    auto expect = [&](int line, const std::string& key, const char* what, const std::string& value) {
        errors.push_back({line, fmt::format("key '{}' expects {}, got '{}'", key, what, value)});
    };
    auto real = [&](double& dst) {
        return [&dst, &expect](int line, const std::string& key, const std::string& v) {
            if (auto x = to_double(v)) dst = *x;
            else expect(line, key, "a number", v);
        };
    };
    auto integer = [&](int& dst) {
        return [&dst, &expect](int line, const std::string& key, const std::string& v) {
            if (auto x = to_integer(v)) dst = static_cast<int>(*x);
            else expect(line, key, "an integer", v);
        };
    };
    auto flag = [&](bool& dst) {
        return [&dst, &expect](int line, const std::string& key, const std::string& v) {
            if (auto x = to_bool(v)) dst = *x;
            else expect(line, key, "true or false", v);
        };
    };

    using Handler = std::function<void(int, const std::string&, const std::string&)>;
    const std::map<std::string, Handler> handlers{
        {"kind", [](int, const std::string&, const std::string&) {}},
        {"regime", [](int, const std::string&, const std::string&) {}},
        {"alpha", real(c.kernel.alpha)},
        {"dim", integer(c.kernel.dim)},
        {"gamma", real(c.gamma)},
        {"nx", integer(c.n_x)},
        {"nv", integer(c.n_v)},
        {"length", real(c.length)},
        {"vmax",
         [&](int line, const std::string& key, const std::string& v) {
             if (v == "auto") c.v_max.reset();
             else if (auto x = to_double(v)) c.v_max = *x;
             else expect(line, key, "a number or auto", v);
         }},
        {"refine", integer(c.refine)},
        {"xi_max", real(c.xi_max)},
        {"radius", real(c.radius)},
        {"eps",
         [&](int line, const std::string& key, const std::string& v) {
             c.eps.clear();
             for (const auto& item : split_list(v)) {
                 if (auto x = to_double(item)) c.eps.push_back(*x);
                 else expect(line, key, "a comma-separated list of numbers", v);
             }
         }},
        {"t_end", real(c.t_end)},
        {"dt_rule",
         [&](int line, const std::string& key, const std::string& v) {
             if (v == "stable") c.dt_rule = DtRule::stable;
             else if (v == "fixed") c.dt_rule = DtRule::fixed;
             else expect(line, key, "stable or fixed", v);
         }},
        {"dt_factor", real(c.dt_factor)},
        {"dt", real(c.dt)},
        {"preset", [&](int, const std::string&, const std::string& v) { c.preset = v; }},
        {"reference",
         [&](int line, const std::string& key, const std::string& v) {
             if (v == "muscl") c.muscl_reference = true;
             else if (v == "upwind") c.muscl_reference = false;
             else expect(line, key, "muscl or upwind", v);
         }},
        {"slopes",
         [&](int line, const std::string& key, const std::string& v) {
             try {
                 c.slopes = parse_slope_rule(v);
             } catch (const std::invalid_argument&) {
                 expect(line, key, "coherent or per-row", v);
             }
         }},
        {"frame_stride", integer(c.frame_stride)},
        {"dt_refinement", flag(c.dt_refinement)},
        {"seed",
         [&](int line, const std::string& key, const std::string& v) {
             if (auto x = to_integer(v); x && *x >= 0) c.seed = static_cast<std::uint64_t>(*x);
             else expect(line, key, "a non-negative integer", v);
         }},
        {"positivity_cases", integer(c.positivity_cases)},
        {"commutator_cases", integer(c.commutator_cases)},
        {"w1_cases", integer(c.w1_cases)},
        {"output", [&](int, const std::string&, const std::string& v) { c.output = v; }},
    };

    for (const auto& [key, entry] : entries) {
        const auto h = handlers.find(key);
        if (h == handlers.end()) {
            errors.push_back({entry.line, fmt::format("unknown key '{}'", key)});
            continue;
        }
        h->second(entry.line, key, entry.value);
    }

    auto line_of = [&](const std::string& key) {
        const auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    };
    auto invalid = [&](const std::string& key, std::string message) {
        errors.push_back({line_of(key), std::move(message)});
    };

    const bool kinetic = c.kind != ExperimentKind::verify_ops;
    if (kinetic) {
        if (c.kernel.dim != 1) invalid("dim", "kinetic experiments need dim = 1");
        if (!(c.kernel.alpha > 0.0 && c.kernel.alpha < 1.0)) invalid("alpha", "alpha must lie in (0, 1) for dim = 1");
        if (c.n_x < 16 || c.n_x % 2) invalid("nx", "nx must be even and at least 16");
        if (c.n_v < 16) invalid("nv", "nv must be at least 16");
        if (!(c.length > 0.0)) invalid("length", "length must be positive");
        if (c.v_max && !(*c.v_max > 0.0)) invalid("vmax", "vmax must be positive");
        if (c.refine < 2 || c.refine % 2) invalid("refine", "refine must be even and at least 2");
        if (!(c.gamma > 0.0)) invalid("gamma", "gamma must be positive");
        if (!(c.t_end > 0.0)) invalid("t_end", "t_end must be positive");
        if (c.dt_rule == DtRule::fixed && !(c.dt > 0.0)) invalid("dt", "dt_rule = fixed needs dt > 0");
        if (!(c.dt_factor > 0.0)) invalid("dt_factor", "dt_factor must be positive");
        if (c.frame_stride < 1) invalid("frame_stride", "frame_stride must be at least 1");
        if (c.eps.empty()) invalid("eps", "eps list is empty");
        for (double e : c.eps)
            if (!(e > 0.0)) invalid("eps", "eps values must be positive");
        if (c.eps.size() >= 2) {
            const double ratio = c.eps[1] / c.eps[0];
            bool geometric = ratio <= 0.5 + 1e-12;
            for (std::size_t i = 1; i < c.eps.size(); ++i)
                geometric = geometric && std::abs(c.eps[i] / c.eps[i - 1] - ratio) <= 1e-9 * ratio;
            if (!geometric) invalid("eps", "eps list must decrease geometrically with ratio at most 1/2");
        }
        const bool hydro_kind = c.kind == ExperimentKind::sweep_hydro;
        for (Regime r : c.regimes) {
            if (hydro_kind && r == Regime::small_inertia)
                errors.push_back({regime_line, "sweep-hydro needs hydro-sigma0 or hydro-sigma-eps"});
            if (c.kind == ExperimentKind::sweep_inertia && r != Regime::small_inertia)
                errors.push_back({regime_line, "sweep-inertia runs the small-inertia regime only"});
        }
        if (!find_preset(c.preset)) {
            invalid("preset", fmt::format("unknown preset '{}'", c.preset));
        } else {
            for (Regime r : c.regimes)
                if (!find_preset(c.preset)->supports(r))
                    invalid("preset", fmt::format("preset '{}' does not provide {} data", c.preset, to_string(r)));
        }
    } else {
        if (c.positivity_cases < 1) invalid("positivity_cases", "positivity_cases must be positive");
        if (c.commutator_cases < 1) invalid("commutator_cases", "commutator_cases must be positive");
        if (c.w1_cases < 1) invalid("w1_cases", "w1_cases must be positive");
        if (!(c.xi_max > 0.0)) invalid("xi_max", "xi_max must be positive");
        if (!(c.radius > 0.0)) invalid("radius", "radius must be positive");
    }

    std::stable_sort(errors.begin(), errors.end(),
                     [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
    if (errors.empty()) result.config = c;
    return result;
}

ParseResult parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back({0, fmt::format("cannot read config '{}'", path.string())});
        return r;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string echo_config(const ExperimentConfig& c)
{
    std::string regimes;
    for (std::size_t i = 0; i < c.regimes.size(); ++i) regimes += (i ? ", " : "") + to_string(c.regimes[i]);
    std::string s;
    auto put = [&](const char* key, const std::string& value) { s += fmt::format("{} = {}\n", key, value); };
    put("kind", to_string(c.kind));
    put("alpha", fmt::format("{}", c.kernel.alpha));
    put("dim", fmt::format("{}", c.kernel.dim));
    put("gamma", fmt::format("{}", c.gamma));
    put("nx", fmt::format("{}", c.n_x));
    put("nv", fmt::format("{}", c.n_v));
    put("length", fmt::format("{}", c.length));
    put("vmax", c.v_max ? fmt::format("{}", *c.v_max) : "auto");
    put("refine", fmt::format("{}", c.refine));
    put("xi_max", fmt::format("{}", c.xi_max));
    put("radius", fmt::format("{}", c.radius));
    put("eps", list_to_string(c.eps));
    put("t_end", fmt::format("{}", c.t_end));
    put("dt_rule", c.dt_rule == DtRule::stable ? "stable" : "fixed");
    put("dt_factor", fmt::format("{}", c.dt_factor));
    put("dt", fmt::format("{}", c.dt));
    put("preset", c.preset);
    put("regime", regimes);
    put("reference", c.muscl_reference ? "muscl" : "upwind");
    put("slopes", to_string(c.slopes));
    put("frame_stride", fmt::format("{}", c.frame_stride));
    put("dt_refinement", c.dt_refinement ? "true" : "false");
    put("seed", fmt::format("{}", c.seed));
    put("positivity_cases", fmt::format("{}", c.positivity_cases));
    put("commutator_cases", fmt::format("{}", c.commutator_cases));
    put("w1_cases", fmt::format("{}", c.w1_cases));
    put("output", c.output);
    return s;
}

}  // namespace modlab::harness
