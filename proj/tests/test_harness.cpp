#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "modlab/harness/config.hpp"
#include "modlab/harness/report.hpp"
#include "modlab/harness/sweeps.hpp"

using namespace modlab;
using namespace modlab::harness;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("modlab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

Series synthetic_inertia(double exponent)
{
    Series s;
    s.label = "inertia";
    s.family = "inertia";
    s.summary.columns = {"eps",      "dt",   "steps",          "v_max", "flux",         "mie",          "int_mke",
                         "w1",       "combined", "mke0",       "bound_constant", "c_inf", "dbl_constant", "lemma_checks",
                         "lemma_failures"};
    for (double e : {0.1, 0.05, 0.025, 0.0125}) {
        const double q = 2.0 * std::pow(e, exponent);
        s.summary.add({e, 0.01, 100, 3, 0, q / 3, q / 3, q / 3, q, e, 0.2, 0.2, 0.01, 10, 0});
    }
    evaluate(s);
    return s;
}

}  // namespace

TEST_CASE("config: empty file reports the missing kind")
{
    const auto r = parse_config_text("");
    CHECK_FALSE(r.config);
    REQUIRE(r.errors.size() >= 1);
    CHECK(r.errors.front().message == "missing kind");
    CHECK(r.errors.front().line == 0);
}

TEST_CASE("config: duplicate keys name both lines")
{
    const auto r = parse_config_text("kind = verify-ops\n# comment\nseed = 1\nseed = 2\n");
    CHECK_FALSE(r.config);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 4);
    CHECK(r.errors[0].message.find("lines 3 and 4") != std::string::npos);
}

TEST_CASE("config: every error is reported with its line")
{
    const auto r = parse_config_text("kind = sweep-inertia\ncolour = blue\nnx = many\neps = 0.1, 0.09\npreset = none\n");
    CHECK_FALSE(r.config);
    REQUIRE(r.errors.size() == 4);
    CHECK(r.errors[0].line == 2);
    CHECK(r.errors[0].message.find("unknown key 'colour'") != std::string::npos);
    CHECK(r.errors[1].line == 3);
    CHECK(r.errors[2].line == 4);
    CHECK(r.errors[3].line == 5);
    CHECK(format_error(r.errors[0]).rfind("line 2: ", 0) == 0);
}

TEST_CASE("config: minimal verify-ops applies the documented defaults and echoes round-trip")
{
    const auto r = parse_config_text("kind = verify-ops\n");
    REQUIRE(r.config);
    const auto& c = *r.config;
    CHECK(c.seed == 20261015);
    CHECK(c.positivity_cases == 1000);
    CHECK(c.commutator_cases == 200);
    CHECK(c.w1_cases == 500);
    CHECK(c.xi_max == 6.0);
    CHECK(c.radius == 40.0);
    CHECK(c.output == "out");
    const auto echo = echo_config(c);
    const auto again = parse_config_text(echo);
    REQUIRE(again.config);
    CHECK(echo_config(*again.config) == echo);
}

TEST_CASE("config: sweep defaults and kind-specific checks")
{
    const auto inertia = parse_config_text("kind = sweep-inertia\n");
    REQUIRE(inertia.config);
    CHECK(inertia.config->eps == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
    CHECK(inertia.config->preset == "bump-inertia-v1");
    const auto hydro = parse_config_text("kind = sweep-hydro\n");
    REQUIRE(hydro.config);
    CHECK(hydro.config->regimes.size() == 2);
    CHECK_FALSE(parse_config_text("kind = sweep-hydro\nregime = small-inertia\n").config);
    CHECK_FALSE(parse_config_text("kind = sweep-inertia\npreset = bump-hydro-v1\n").config);
    CHECK_FALSE(parse_config_text("kind = sweep-inertia\nalpha = 1.5\n").config);
}

TEST_CASE("synthetic slope-1 data: fit, verdict and plot legend")
{
    const auto s = synthetic_inertia(1.0);
    REQUIRE(s.fits.front().fit);
    const auto& fit = *s.fits.front().fit;
    CHECK(std::abs(fit.slope - 1.0) <= 0.02);
    CHECK(s.verdicts.front().status == Verdict::Status::pass);
    const auto svg = loglog_svg("combined", fit);
    CHECK(svg.find("fit slope 1.00") != std::string::npos);
    CHECK(svg.find("slope 0.5") != std::string::npos);

    const auto shallow = synthetic_inertia(0.5);
    CHECK(shallow.verdicts.front().status == Verdict::Status::fail);
}

TEST_CASE("fewer than four eps values give insufficient points")
{
    auto s = synthetic_inertia(1.0);
    s.summary.rows.resize(1);
    evaluate(s);
    CHECK_FALSE(s.fits.front().fit);
    CHECK(s.verdicts.front().status == Verdict::Status::insufficient);
    CHECK(to_string(s.verdicts.front().status) == "insufficient points");
}

TEST_CASE("a single-eps sweep runs and reports insufficient points")
{
    const auto c = parse_config_text("kind = sweep-inertia\nnx = 32\nnv = 64\neps = 0.1\nt_end = 0.05\n");
    REQUIRE(c.config);
    const auto r = run_sweep_inertia(*c.config);
    REQUIRE(r.series.size() == 1);
    CHECK(r.series[0].summary.rows.size() == 1);
    CHECK(r.series[0].verdicts.front().status == Verdict::Status::insufficient);
    CHECK_FALSE(r.all_pass());
}

TEST_CASE("hydro sweep at eps = 1 in both regimes: finite values, lemma items hold")
{
    const auto c = parse_config_text("kind = sweep-hydro\nnx = 32\nnv = 64\neps = 1\nt_end = 0.05\n");
    REQUIRE(c.config);
    const auto r = run_sweep_hydro(*c.config);
    REQUIRE(r.series.size() == 2);
    for (const auto& s : r.series) {
        INFO(s.label);
        for (const auto& row : s.frames.rows)
            for (double v : row) CHECK(std::isfinite(v));
        CHECK(s.summary.at(0, "lemma_failures") == 0);
        CHECK(s.summary.at(0, "lemma_checks") > 0);
    }
    CHECK(r.series[0].summary.at(0, "rel_h") == 0.0);  // c_P = 0 skips the entropy terms
}

TEST_CASE("CSV round-trip is exact")
{
    Table t;
    t.columns = {"a", "b"};
    t.add({0.1, 1.0 / 3.0});
    t.add({std::nextafter(1.0, 2.0), -2.5e-300});
    const auto back = parse_csv_table(csv_text(t));
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    std::vector<Check> checks{{"g, one", "name \"q\"", 1e-13, 1e-12, true}, {"g", "n", 2, 1, false}};
    const auto cb = parse_checks_csv(checks_csv_text(checks));
    REQUIRE(cb.size() == 2);
    CHECK(cb[0].group == "g, one");
    CHECK(cb[0].name == "name \"q\"");
    CHECK(cb[0].value == 1e-13);
    CHECK_FALSE(cb[1].pass);
}

TEST_CASE("stored reports refit to identical slopes and re-emit identical bytes")
{
    SweepResult r{*parse_config_text("kind = sweep-inertia\n").config, {synthetic_inertia(1.1)}};
    const auto a = fresh_dir("report_a"), b = fresh_dir("report_b");
    emit_report(r, a);
    const auto loaded = load_report(a);
    REQUIRE(loaded.series.size() == 1);
    for (std::size_t i = 0; i < r.series[0].fits.size(); ++i) {
        REQUIRE(loaded.series[0].fits[i].fit);
        CHECK(loaded.series[0].fits[i].fit->slope == r.series[0].fits[i].fit->slope);
        CHECK(loaded.series[0].fits[i].fit->r2 == r.series[0].fits[i].fit->r2);
    }
    emit_report(loaded, b);
    for (const auto& e : fs::directory_iterator(a)) CHECK(read_bytes(e.path()) == read_bytes(b / e.path().filename()));
    CHECK(fs::exists(a / "inertia_combined.svg"));
    CHECK(read_bytes(a / "manifest.txt").find("seed 20261015") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("empty sweep writes a summary and no plots")
{
    SweepResult r{*parse_config_text("kind = verify-ops\n").config, {}};
    const auto dir = fresh_dir("empty");
    emit_report(r, dir);
    CHECK(fs::exists(dir / "summary.txt"));
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".svg");
    fs::remove_all(dir);
}

TEST_CASE("deterministic re-run gives byte-identical CSVs")
{
    const auto c = parse_config_text("kind = sweep-inertia\nnx = 32\nnv = 64\neps = 0.1, 0.05\nt_end = 0.05\n");
    REQUIRE(c.config);
    const auto first = run_sweep_inertia(*c.config), second = run_sweep_inertia(*c.config);
    CHECK(csv_text(first.series[0].summary) == csv_text(second.series[0].summary));
    CHECK(csv_text(first.series[0].frames) == csv_text(second.series[0].frames));
}

TEST_CASE("task pool covers every index and rethrows")
{
    std::atomic<int> sum{0};
    run_tasks(50, [&](int i) { sum += i; });
    CHECK(sum == 50 * 49 / 2);
    CHECK_THROWS_AS(run_tasks(5, [](int i) {
                        if (i == 3) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    ::setenv("RIESZ_MODLAB_THREADS", "3", 1);
    CHECK(task_threads() == 3);
    ::setenv("RIESZ_MODLAB_THREADS", "zero", 1);
    CHECK(task_threads() >= 1);
    ::unsetenv("RIESZ_MODLAB_THREADS");
}
