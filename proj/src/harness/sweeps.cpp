#include "modlab/harness/sweeps.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "modlab/harness/presets.hpp"
#include "modlab/harness/verify.hpp"
#include "modlab/limit_solvers.hpp"

namespace modlab::harness {

std::size_t Table::index(std::string_view column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column) return i;
    throw std::out_of_range(fmt::format("no column '{}'", column));
}

std::vector<double> Table::column(std::string_view name) const
{
    const auto i = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(i));
    return out;
}

void Table::add(std::vector<double> row)
{
    if (row.size() != columns.size()) throw std::invalid_argument("row width differs from the column count");
    rows.push_back(std::move(row));
}

std::string to_string(Verdict::Status s)
{
    switch (s) {
    case Verdict::Status::pass: return "PASS";
    case Verdict::Status::fail: return "FAIL";
    case Verdict::Status::insufficient: return "insufficient points";
    }
    return "?";
}

bool SweepResult::all_pass() const
{
    for (const auto& s : series)
        for (const auto& v : s.verdicts)
            if (v.status != Verdict::Status::pass) return false;
    return true;
}

int task_threads()
{
    if (const char* env = std::getenv("RIESZ_MODLAB_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
        spdlog::warn("ignoring RIESZ_MODLAB_THREADS='{}'", env);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void run_tasks(int count, const std::function<void(int)>& fn)
{
    const int workers = std::min(count, task_threads());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex lock;
    int next = 0;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            int task;
            {
                std::lock_guard g(lock);
                if (next >= count || failure) return;
                task = next++;
            }
            try {
                fn(task);
            } catch (...) {
                std::lock_guard g(lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------------------------
// Verdicts

std::vector<std::string> fitted_quantities(const std::string& family)
{
    if (family == "inertia") return {"combined", "mie", "int_mke", "w1", "bound_constant"};
    if (family == "hydro") return {"combined", "kinetic", "mie", "int_kin"};
    return {};
}

namespace {

std::optional<RateFit> try_fit(const Table& t, const std::string& quantity)
{
    try {
        return fit_rate(t.column("eps"), t.column(quantity));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

const RateFit* find_fit(const Series& s, const std::string& quantity)
{
    for (const auto& f : s.fits)
        if (f.quantity == quantity && f.fit) return &*f.fit;
    return nullptr;
}

Verdict rate_verdict(const Series& s, const std::string& quantity, double min_slope)
{
    Verdict v;
    v.name = fmt::format("{} slope >= {} with R^2 >= 0.9", quantity, min_slope);
    const auto* fit = find_fit(s, quantity);
    if (!fit) {
        v.status = Verdict::Status::insufficient;
        v.detail = fmt::format("{} eps values, a fit needs 4", s.summary.rows.size());
        return v;
    }
    v.status = fit->slope >= min_slope && fit->r2 >= 0.9 ? Verdict::Status::pass : Verdict::Status::fail;
    v.detail = fmt::format("slope {:.4f}, R^2 {:.4f}", fit->slope, fit->r2);
    return v;
}

Verdict lemma_verdict(const Table& t)
{
    Verdict v;
    v.name = "lemma inequalities hold on every recorded frame";
    double checks = 0, failures = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        checks += t.at(i, "lemma_checks");
        failures += t.at(i, "lemma_failures");
    }
    v.status = failures == 0 && checks > 0 ? Verdict::Status::pass : Verdict::Status::fail;
    v.detail = fmt::format("{} checks, {} failures", checks, failures);
    return v;
}

double positive(double x) { return std::max(x, 0.0); }

void evaluate_energy(Series& s, bool hydro)
{
    const auto& t = s.summary;
    Verdict v;
    const std::string monitor = hydro ? "excess" : "max_increment";
    v.name = hydro ? "free-energy inequality holds, excess shrinks as dt -> 0"
                   : "free energy non-increasing up to O(dt) per step";
    if (t.rows.size() < 2) {
        v.status = Verdict::Status::insufficient;
        v.detail = "needs runs at dt and dt/2";
        s.verdicts.push_back(v);
        return;
    }
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double dt = t.at(i, "dt"), scale = t.at(i, "scale"), m = t.at(i, monitor);
        const double allowed = hydro ? 1e-3 * scale : dt * scale;
        ok = ok && m <= allowed;
        detail += fmt::format("{}dt {:.4g}: {} {:.3e}", i ? "; " : "", dt, monitor, m);
    }
    const std::size_t last = t.rows.size() - 1;
    const double coarse = positive(t.at(last - 1, monitor)), fine = positive(t.at(last, monitor));
    const double floor = 1e-12 * t.at(last, "scale");
    ok = ok && (fine <= 0.75 * coarse || fine <= floor);
    v.status = ok ? Verdict::Status::pass : Verdict::Status::fail;
    v.detail = detail;
    s.verdicts.push_back(v);
}

}  // namespace

void evaluate(Series& s)
{
    s.fits.clear();
    s.verdicts.clear();
    for (const auto& q : fitted_quantities(s.family)) s.fits.push_back({q, try_fit(s.summary, q)});
    const auto& t = s.summary;

    if (s.family == "inertia") {
        s.verdicts.push_back(rate_verdict(s, "combined", 0.9));
        Verdict bound;
        bound.name = "bound constant stays within 1.1 of its asymptotic value";
        bool ok = !t.rows.empty();
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const double c = t.at(i, "bound_constant"), limit = t.at(i, "c_inf");
            ok = ok && c <= 1.1 * limit;
            bound.detail += fmt::format("{}eps {}: {:.4f} vs {:.4f}", i ? "; " : "", t.at(i, "eps"), c, limit);
        }
        if (const auto* f = find_fit(s, "bound_constant")) bound.detail += fmt::format("; exponent {:.3f}", f->slope);
        bound.status = ok ? Verdict::Status::pass : Verdict::Status::fail;
        s.verdicts.push_back(bound);
        s.verdicts.push_back(lemma_verdict(t));
        Verdict dbl;
        dbl.name = "d_BL constant does not grow under eps refinement";
        if (t.rows.size() < 2) {
            dbl.status = Verdict::Status::insufficient;
            dbl.detail = "needs two eps values";
        } else {
            const auto c = t.column("dbl_constant");
            const double earlier = *std::max_element(c.begin(), c.end() - 1);
            dbl.status = c.back() <= 1.1 * earlier ? Verdict::Status::pass : Verdict::Status::fail;
            dbl.detail = fmt::format("finest {:.4f}, largest earlier {:.4f}", c.back(), earlier);
        }
        s.verdicts.push_back(dbl);
    } else if (s.family == "hydro") {
        s.verdicts.push_back(rate_verdict(s, "combined", 0.45));
        s.verdicts.push_back(lemma_verdict(t));
    } else if (s.family == "energy-inertia") {
        evaluate_energy(s, false);
    } else if (s.family == "energy-hydro") {
        evaluate_energy(s, true);
    } else if (s.family == "verify") {
        std::vector<std::string> groups;
        for (const auto& c : s.checks)
            if (std::find(groups.begin(), groups.end(), c.group) == groups.end()) groups.push_back(c.group);
        for (const auto& g : groups) {
            Verdict v;
            v.name = g;
            int total = 0, failed = 0;
            for (const auto& c : s.checks)
                if (c.group == g) {
                    ++total;
                    if (!c.pass) ++failed;
                }
            v.status = failed == 0 ? Verdict::Status::pass : Verdict::Status::fail;
            v.detail = fmt::format("{} checks, {} failed", total, failed);
            s.verdicts.push_back(v);
        }
    } else {
        throw std::invalid_argument(fmt::format("unknown series family '{}'", s.family));
    }
}

// ---------------------------------------------------------------------------------------------
// Shared pieces of the kinetic runs

namespace {

constexpr double reference_cfl = 0.4;

const std::vector<std::string> frame_columns{"eps", "t",  "mke", "mie", "rel_h",      "rel_e",   "w1",
                                             "bl_ub", "F", "D",   "integrated", "combined"};

std::vector<double> frame_row(const EnergyReport& r, double integrated, double combined)
{
    return {r.eps, r.t, r.mke, r.mie, r.rel_h, r.rel_e, r.w1, r.bl_ub, r.free_energy, r.dissipation, integrated,
            combined};
}

int step_count(double t_end, double& dt)
{
    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
    dt = t_end / steps;
    return steps;
}

bool is_frame(int n, int steps, int stride) { return n % stride == 0 || n == steps; }

KineticConfig kinetic_config(const ExperimentConfig& c, Regime regime, double eps, double dt)
{
    KineticConfig k;
    k.eps = eps;
    k.gamma = c.gamma;
    k.kernel = c.kernel;
    k.regime = regime;
    k.dt = dt;
    k.t_end = c.t_end;
    k.cfl = std::numeric_limits<double>::infinity();  // flux-form semi-Lagrangian transport
    k.slopes = c.slopes;
    return k;
}

ScalarField on_grid(const GridSpec& g, std::vector<double> v) { return ScalarField(g, std::move(v)); }

struct Setup {
    const Preset* preset = nullptr;
    GridSpec coarse;
    InitialData data;
};

Setup setup(const ExperimentConfig& c)
{
    Setup s;
    s.preset = find_preset(c.preset);
    if (!s.preset) throw std::invalid_argument(fmt::format("unknown preset '{}'", c.preset));
    s.coarse = GridSpec{1, c.n_x, c.length};
    s.data = make_initial_data(*s.preset, s.coarse, c.refine, c.kernel, c.gamma);
    return s;
}

double v_max_for(const ExperimentConfig& c, const Setup& s, double eps)
{
    return c.v_max ? *c.v_max : preset_v_max(*s.preset, s.data.u_max, eps);
}

// ---------------------------------------------------------------------------------------------
// Small inertia

struct InertiaReference {
    double dt = 0.0;
    int steps = 0;
    std::vector<ScalarField> rho;       // restricted densities
    std::vector<ScalarField> u_upwind;  // velocity the upwind flux uses in each cell
    double e_integral = 0.0;            // int_0^T int rho |e|^2
};

InertiaReference inertia_reference(const ExperimentConfig& c, const Setup& s)
{
    InertiaReference ref;
    ref.dt = c.dt_rule == DtRule::fixed ? c.dt
                                        : c.dt_factor * aggregation_stable_dt(s.data.rho, c.kernel, c.gamma);
    ref.steps = step_count(c.t_end, ref.dt);
    const int r = c.refine;
    ScalarField fine = s.data.rho_fine;
    auto sample_velocity = [&](const ScalarField& rho_fine, ScalarField& upwind, ScalarField& centre) {
        const auto u = aggregation_velocity(rho_fine, c.kernel, c.gamma).components[0];
        upwind = on_grid(s.coarse, upwind_cell_velocity(restrict_face_sample(u, r)));
        centre = restrict_sample(u, r);
    };
    ScalarField up, centre, prev_centre;
    sample_velocity(fine, up, prev_centre);
    ref.rho.push_back(s.data.rho);
    ref.u_upwind.push_back(up);
    const double h = s.coarse.length / s.coarse.n;
    for (int n = 0; n < ref.steps; ++n) {
        const int sub = static_cast<int>(std::ceil(ref.dt / aggregation_stable_dt(fine, c.kernel, c.gamma)));
        for (int k = 0; k < sub; ++k) fine = step_aggregation(fine, ref.dt / sub, c.kernel, c.gamma, c.muscl_reference);
        sample_velocity(fine, up, centre);
        ref.rho.push_back(restrict_average(fine, r));
        ref.u_upwind.push_back(up);
        const auto before = make_macro_state(ref.rho[n], prev_centre, 0.0, c.gamma);
        const auto after = make_macro_state(ref.rho[n + 1], centre, 0.0, c.gamma);
        const auto e = error_field_e(before, after, ref.dt).components[0];
        double q = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) q += ref.rho[n + 1][i] * e[i] * e[i] * h;
        ref.e_integral += ref.dt * q;
        prev_centre = centre;
    }
    return ref;
}

struct InertiaRun {
    std::vector<double> summary;
    std::vector<std::vector<double>> frames;
};

const std::vector<std::string> inertia_summary_columns{
    "eps",  "dt",   "steps", "v_max",          "flux",  "mie",          "int_mke",      "w1",
    "combined", "mke0", "bound_constant", "c_inf", "dbl_constant", "lemma_checks", "lemma_failures"};

InertiaRun inertia_run(const ExperimentConfig& c, const Setup& s, const InertiaReference& ref, double eps)
{
    const PhaseGrid g{c.n_x, c.length, c.n_v, v_max_for(c, s, eps)};
    const auto kc = kinetic_config(c, Regime::small_inertia, eps, ref.dt);
    KineticSolver solver(initial_kinetic_state(*s.preset, s.data, g, eps), kc);
    const double dt = ref.dt;

    const double mke0 = modulated_kinetic_energy(solver.state(), ref.u_upwind[0].values());
    const double mie0 = modulated_interaction_energy(moments(solver.state()).rho, ref.rho[0], c.kernel).value;
    const double denominator = eps * mke0 + 2 * mie0 + eps * eps;
    double prev = mke0, int_mke = 0.0, bound = 0.0, dbl = 0.0;
    int checks = 0, failures = 0;
    InertiaRun out;

    auto record = [&](int n, double mke, double mie, const ScalarField& rho) {
        EnergyReport r;
        r.t = n * dt;
        r.eps = eps;
        r.mke = mke;
        r.mie = mie;
        r.w1 = wasserstein1_1d(rho, ref.rho[n]);
        r.bl_ub = bl_upper_bound(rho, ref.rho[n]);
        r.free_energy = free_energy_kinetic(solver.state(), kc);
        r.dissipation = dissipation(solver.state(), kc);
        out.frames.push_back(frame_row(r, int_mke, mie + int_mke + r.w1));
        for (const auto& check : small_inertia_lemma_suite(solver.state(), ref.rho[n], ref.u_upwind[n])) {
            ++checks;
            if (!check.holds()) {
                if (failures == 0)
                    spdlog::warn("small inertia eps {}: {} fails at t = {} ({} > {})", eps, check.item, r.t, check.lhs,
                                 check.rhs);
                ++failures;
            }
        }
    };
    record(0, mke0, mie0, moments(solver.state()).rho);

    double mie = mie0;
    for (int n = 1; n <= ref.steps; ++n) {
        solver.step();
        const double mke = modulated_kinetic_energy(solver.state(), ref.u_upwind[n].values());
        int_mke += 0.5 * dt * (prev + mke);
        prev = mke;
        const auto rho = moments(solver.state()).rho;
        mie = modulated_interaction_energy(rho, ref.rho[n], c.kernel).value;
        bound = std::max(bound, (2 * mie + int_mke) / denominator);
        const double bl = bl_upper_bound(rho, ref.rho[n]);
        if (int_mke > 0.0) dbl = std::max(dbl, bl * bl / int_mke);
        if (is_frame(n, ref.steps, c.frame_stride)) record(n, mke, mie, rho);
    }

    const double w1 = wasserstein1_1d(moments(solver.state()).rho, ref.rho.back());
    const double m0 = mke0 / eps;
    const double c_inf = (0.5 * m0 + ref.e_integral) / (m0 + 1.0 + 2 * mie0 / (eps * eps));
    out.summary = {eps,
                   dt,
                   static_cast<double>(ref.steps),
                   g.v_max,
                   solver.cumulative_flux(),
                   mie,
                   int_mke,
                   w1,
                   mie + int_mke + w1,
                   mke0,
                   bound,
                   c_inf,
                   dbl,
                   static_cast<double>(checks),
                   static_cast<double>(failures)};
    return out;
}

// ---------------------------------------------------------------------------------------------
// Hydrodynamic limit

struct HydroReference {
    double dt = 0.0;
    int steps = 0;
    std::vector<ScalarField> rho, u;
};

HydroReference hydro_reference(const ExperimentConfig& c, const Setup& s, double pressure)
{
    HydroReference ref;
    const auto coarse = make_macro_state(s.data.rho, s.data.u, pressure, c.gamma);
    ref.dt = c.dt_rule == DtRule::fixed ? c.dt : euler_riesz_stable_dt(coarse, c.dt_factor);
    ref.steps = step_count(c.t_end, ref.dt);
    auto state = make_macro_state(s.data.rho_fine, s.data.u_fine, pressure, c.gamma);
    ref.rho.push_back(s.data.rho);
    ref.u.push_back(s.data.u);
    for (int n = 0; n < ref.steps; ++n) {
        const int sub = static_cast<int>(std::ceil(ref.dt / euler_riesz_stable_dt(state, reference_cfl)));
        for (int k = 0; k < sub; ++k) state = step_euler_riesz(state, ref.dt / sub, c.kernel, c.muscl_reference);
        ref.rho.push_back(restrict_average(state.rho, c.refine));
        ref.u.push_back(restrict_sample(state.velocity(), c.refine));
    }
    return ref;
}

const std::vector<std::string> hydro_summary_columns{"eps",     "dt",      "steps", "v_max",         "flux",
                                                     "combined", "kinetic", "rel_h", "mie",           "int_kin",
                                                     "sqrt_constant", "lemma_checks", "lemma_failures"};

InertiaRun hydro_run(const ExperimentConfig& c, const Setup& s, const HydroReference& ref, Regime regime, double eps)
{
    const PhaseGrid g{c.n_x, c.length, c.n_v, v_max_for(c, s, eps)};
    const auto kc = kinetic_config(c, regime, eps, ref.dt);
    const double cp = kc.pressure();
    KineticSolver solver(initial_kinetic_state(*s.preset, s.data, g, eps), kc);
    const double dt = ref.dt, h = g.dx();

    double int_k = 0.0, prev_k = 0.0, sup_combined = 0.0, sup_kin = 0.0, sup_h = 0.0, sup_mie = 0.0;
    int checks = 0, failures = 0;
    InertiaRun out;

    auto measure = [&](int n, bool frame) {
        const auto mo = moments(solver.state());
        const auto ue = mo.velocity();
        double k = 0.0;
        for (int i = 0; i < g.n_x; ++i) k += mo.rho[i] * (ue[i] - ref.u[n][i]) * (ue[i] - ref.u[n][i]) * h;
        if (n > 0) int_k += 0.5 * dt * (prev_k + k);
        prev_k = k;
        const double rel_h = cp > 0.0 ? relative_entropy_density(mo.rho, ref.rho[n]) : 0.0;
        const double mie = modulated_interaction_energy(mo.rho, ref.rho[n], c.kernel).value;
        const double combined = 0.5 * k + cp * rel_h + mie + int_k;
        sup_combined = std::max(sup_combined, combined);
        sup_kin = std::max(sup_kin, 0.5 * k);
        sup_h = std::max(sup_h, rel_h);
        sup_mie = std::max(sup_mie, mie);
        if (!frame) return;
        EnergyReport r;
        r.t = n * dt;
        r.eps = eps;
        r.mke = modulated_kinetic_energy(solver.state(), ref.u[n].values());
        r.mie = mie;
        r.rel_h = rel_h;
        r.rel_e = 0.5 * k + cp * rel_h;
        r.w1 = wasserstein1_1d(mo.rho, ref.rho[n]);
        r.bl_ub = bl_upper_bound(mo.rho, ref.rho[n]);
        r.free_energy = free_energy_kinetic(solver.state(), kc);
        r.dissipation = dissipation(solver.state(), kc);
        out.frames.push_back(frame_row(r, int_k, combined));
        for (const auto& check : hydro_lemma_suite(solver.state(), ref.rho[n], ref.u[n], cp)) {
            ++checks;
            if (!check.holds()) {
                if (failures == 0)
                    spdlog::warn("{} eps {}: {} fails at t = {} ({} > {})", to_string(regime), eps, check.item, r.t,
                                 check.lhs, check.rhs);
                ++failures;
            }
        }
    };
    measure(0, true);
    for (int n = 1; n <= ref.steps; ++n) {
        solver.step();
        measure(n, is_frame(n, ref.steps, c.frame_stride));
    }
    out.summary = {eps,
                   dt,
                   static_cast<double>(ref.steps),
                   g.v_max,
                   solver.cumulative_flux(),
                   sup_combined,
                   sup_kin,
                   sup_h,
                   sup_mie,
                   int_k,
                   sup_combined / std::sqrt(eps),
                   static_cast<double>(checks),
                   static_cast<double>(failures)};
    return out;
}

// ---------------------------------------------------------------------------------------------
// Energy monitors

const std::vector<std::string> energy_frame_columns{"run",     "t",           "mass",    "momentum", "F",
                                                    "D",       "kinetic",     "interaction", "monitor"};
const std::vector<std::string> energy_summary_columns{"dt",     "steps",         "scale", "max_increment",
                                                      "residual_rate", "excess", "identity_rate"};

InertiaRun energy_run(const ExperimentConfig& c, const Setup& s, Regime regime, double eps, double dt, int run)
{
    const PhaseGrid g{c.n_x, c.length, c.n_v, v_max_for(c, s, eps)};
    const int steps = step_count(c.t_end, dt);
    const auto kc = kinetic_config(c, regime, eps, dt);
    const double cp = kc.pressure();
    KineticSolver solver(initial_kinetic_state(*s.preset, s.data, g, eps), kc);
    const bool hydro = regime != Regime::small_inertia;
    const double h = g.dx();

    auto interaction = [&] {
        return interaction_energy(moments(solver.state()).rho, c.kernel, Boundary::periodic);
    };
    auto rho_u2 = [&] {
        const auto mo = moments(solver.state());
        double q = 0.0;
        for (int i = 0; i < g.n_x; ++i)
            if (mo.rho[i] > 1e-300) q += mo.momentum[i] * mo.momentum[i] / mo.rho[i] * h;
        return c.gamma * q;
    };
    const double mass = solver.state().mass();
    const double f0 = free_energy_kinetic(solver.state(), kc);
    const double scale = kinetic_energy(solver.state()) + interaction() / (hydro ? 1.0 : eps) +
                         (cp > 0.0 ? cp * std::abs(entropy(solver.state())) : 0.0);

    InertiaRun out;
    double f_prev = f0, q_prev = rho_u2(), accumulated = 0.0;
    double max_increment = -std::numeric_limits<double>::infinity();
    double residual = -std::numeric_limits<double>::infinity();
    double excess = -std::numeric_limits<double>::infinity();
    double identity = 0.0;
    auto record = [&](int n, double monitor) {
        const auto mo = moments(solver.state());
        out.frames.push_back({static_cast<double>(run), n * dt, mass, mo.momentum.mass(), f_prev,
                              dissipation(solver.state(), kc), kinetic_energy(solver.state()), interaction(), monitor});
    };
    record(0, 0.0);
    for (int n = 1; n <= steps; ++n) {
        const auto rec = solver.step();
        const double f = free_energy_kinetic(solver.state(), kc);
        const double increment = f - f_prev;
        max_increment = std::max(max_increment, increment);
        double monitor = increment;
        if (hydro) {
            const double q = rho_u2();
            accumulated += 0.5 * rec.relaxation_dissipation + 0.5 * dt * (q + q_prev);
            q_prev = q;
            monitor = f + accumulated - f0;
            excess = std::max(excess, monitor);
            const double balance = increment + rec.relaxation_dissipation + rec.damping_work - cp * c.gamma * mass * dt;
            identity = std::max(identity, std::abs(balance) / dt);
        } else {
            residual = std::max(residual, (increment + rec.damping_work) / dt);
        }
        f_prev = f;
        if (is_frame(n, steps, c.frame_stride)) record(n, monitor);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.summary = {dt,        static_cast<double>(steps), scale, max_increment, hydro ? nan : residual,
                   hydro ? excess : nan, hydro ? identity : nan};
    return out;
}

double stable_dt(const ExperimentConfig& c, const Setup& s, Regime regime)
{
    if (c.dt_rule == DtRule::fixed) return c.dt;
    if (regime == Regime::small_inertia) return c.dt_factor * aggregation_stable_dt(s.data.rho, c.kernel, c.gamma);
    const double cp = regime == Regime::hydro_sigma_eps ? 1.0 : 0.0;
    return euler_riesz_stable_dt(make_macro_state(s.data.rho, s.data.u, cp, c.gamma), c.dt_factor);
}

void append_frames(Table& frames, const std::vector<std::vector<double>>& rows)
{
    for (const auto& r : rows) frames.add(r);
}

}  // namespace

SweepResult run_sweep_inertia(const ExperimentConfig& config)
{
    const auto s = setup(config);
    const auto ref = inertia_reference(config, s);
    std::vector<InertiaRun> runs(config.eps.size());
    run_tasks(static_cast<int>(runs.size()), [&](int i) { runs[i] = inertia_run(config, s, ref, config.eps[i]); });

    Series series;
    series.label = "inertia";
    series.family = "inertia";
    series.summary.columns = inertia_summary_columns;
    series.frames.columns = frame_columns;
    for (const auto& r : runs) {
        series.summary.add(r.summary);
        append_frames(series.frames, r.frames);
    }
    evaluate(series);
    return {config, {std::move(series)}};
}

SweepResult run_sweep_hydro(const ExperimentConfig& config)
{
    const auto s = setup(config);
    SweepResult result{config, {}};
    for (Regime regime : config.regimes) {
        const double cp = regime == Regime::hydro_sigma_eps ? 1.0 : 0.0;
        const auto ref = hydro_reference(config, s, cp);
        std::vector<InertiaRun> runs(config.eps.size());
        run_tasks(static_cast<int>(runs.size()),
                  [&](int i) { runs[i] = hydro_run(config, s, ref, regime, config.eps[i]); });
        Series series;
        series.label = to_string(regime);
        series.family = "hydro";
        series.summary.columns = hydro_summary_columns;
        series.frames.columns = frame_columns;
        for (const auto& r : runs) {
            series.summary.add(r.summary);
            append_frames(series.frames, r.frames);
        }
        evaluate(series);
        result.series.push_back(std::move(series));
    }
    return result;
}

SweepResult run_single(const ExperimentConfig& config)
{
    const auto s = setup(config);
    SweepResult result{config, {}};
    const double eps = config.eps.front();
    for (Regime regime : config.regimes) {
        const double dt = stable_dt(config, s, regime);
        std::vector<double> dts{dt};
        if (config.dt_refinement) dts.push_back(0.5 * dt);
        std::vector<InertiaRun> runs(dts.size());
        run_tasks(static_cast<int>(runs.size()),
                  [&](int i) { runs[i] = energy_run(config, s, regime, eps, dts[i], i); });
        Series series;
        series.label = "energy-" + to_string(regime);
        series.family = regime == Regime::small_inertia ? "energy-inertia" : "energy-hydro";
        series.summary.columns = energy_summary_columns;
        series.frames.columns = energy_frame_columns;
        for (const auto& r : runs) {
            series.summary.add(r.summary);
            append_frames(series.frames, r.frames);
        }
        evaluate(series);
        result.series.push_back(std::move(series));
    }
    return result;
}

SweepResult run_experiment(const ExperimentConfig& config)
{
    switch (config.kind) {
    case ExperimentKind::verify_ops: return run_verify_ops(config);
    case ExperimentKind::sweep_inertia: return run_sweep_inertia(config);
    case ExperimentKind::sweep_hydro: return run_sweep_hydro(config);
    case ExperimentKind::single_run: return run_single(config);
    }
    throw std::invalid_argument("unknown experiment kind");
}

}  // namespace modlab::harness
