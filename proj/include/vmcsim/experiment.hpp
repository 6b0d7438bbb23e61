#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmcsim/engine.hpp"

namespace vmc {

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    int hosts = 25;
    int vms = 30;
    int tasks = 500;  // synthetic VM-interval rows; intervals = ceil(tasks/vms)
    std::vector<DetectorKind> detectors = {DetectorKind::MrMoslo};
    ResourceWeights weights;
    double interval_seconds = 300.0;
    std::vector<std::uint64_t> seeds = {1};
    std::string trace_path;  // empty -> synthetic workload
    std::string out_path = "-";
    OutputFormat format = OutputFormat::Csv;
    double workload_mean = 0.5;
    double workload_spread = 0.4;
    int history_window = 12;
    int threads = 1;
};

struct ReportRow {
    DetectorKind detector = DetectorKind::MrMoslo;
    std::uint64_t seed = 0;
    double energy_kwh = 0.0;
    double sla_pct = 0.0;
    double slatah = 0.0;
    double pdm = 0.0;
    double slav = 0.0;
    double esv = 0.0;
    std::size_t migrations = 0;
};

struct Report {
    std::vector<ReportRow> rows;
};

// Synthetic trace for one experiment seed; shared across detectors so they
// compete on identical load.
WorkloadTrace experiment_trace(const ExperimentConfig& config,
                               std::uint64_t seed);

// One simulation per (detector, seed), rows ordered by detector (declaration
// order: mr-moslo, thr, iqr, mad, lr) then seed ascending, duplicates run
// once.
Report run_experiment(const ExperimentConfig& config);

void emit_report_csv(const Report& report, std::ostream& out);
void emit_report_json(const Report& report, std::ostream& out);

// Full command-line front end (subcommands run/fit/thresholds/gen). Returns
// the process exit code: 0 ok, 2 configuration error, 1 runtime failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace vmc
