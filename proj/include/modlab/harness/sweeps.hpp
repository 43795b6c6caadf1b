#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modlab/diagnostics.hpp"
#include "modlab/harness/config.hpp"

namespace modlab::harness {

/// Named numeric columns; the unit of CSV output and of verdict evaluation.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t index(std::string_view column) const;  // throws std::out_of_range
    std::vector<double> column(std::string_view name) const;
    double at(std::size_t row, std::string_view column) const { return rows.at(row).at(index(column)); }
    void add(std::vector<double> row);
};

/// One scalar check of the verify-ops batch.
struct Check {
    std::string group;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct Verdict {
    enum class Status { pass, fail, insufficient };
    std::string name;
    Status status = Status::fail;
    std::string detail;
};

std::string to_string(Verdict::Status s);

struct NamedFit {
    std::string quantity;
    std::optional<RateFit> fit;  // empty when fewer than four eps values are available
};

/// Results of one regime (or of the verify-ops batch). `family` selects the verdict rules:
/// "inertia", "hydro", "energy-inertia", "energy-hydro" or "verify".
struct Series {
    std::string label;
    std::string family;
    Table summary;  // one row per eps (per dt for "energy")
    Table frames;   // recorded time series
    std::vector<Check> checks;
    std::vector<NamedFit> fits;
    std::vector<Verdict> verdicts;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<Series> series;

    bool all_pass() const;
};

/// Rate fits and verdicts from the stored summary table (and checks) alone, so a report
/// rebuilt from CSV reproduces them exactly.
void evaluate(Series& series);

/// Quantities fitted against eps per family.
std::vector<std::string> fitted_quantities(const std::string& family);

SweepResult run_sweep_inertia(const ExperimentConfig& config);
SweepResult run_sweep_hydro(const ExperimentConfig& config);
/// Energy monitors of one kinetic run per regime, repeated at dt/2 when dt_refinement is set.
SweepResult run_single(const ExperimentConfig& config);
SweepResult run_experiment(const ExperimentConfig& config);

/// Task cap from RIESZ_MODLAB_THREADS (unset or invalid: hardware concurrency).
int task_threads();
/// Runs fn(0..count-1) on at most task_threads() workers; rethrows the first failure.
void run_tasks(int count, const std::function<void(int)>& fn);

}  // namespace modlab::harness
