#pragma once

// Benchmark runner: many simulated datasets, one TARP run each, mean/sd report.

#include "tarp/config.hpp"
#include "tarp/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tarp {

struct DatasetOutcome {
    Index index = 0;
    std::uint64_t dataSeed = 0;
    std::uint64_t tarpSeed = 0;
    bool binary = false;
    RegressionMetrics regression;
    ClassificationMetrics classification;
    double meanPGamma = 0.0;
    double meanM = 0.0;
    PhaseTimes phases;
    double wallTime = 0.0;
};

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample sd, 0 for a single value
};

Summary summarize(const std::vector<double>& values);

struct ReportRow {
    std::string method;
    bool binary = false;
    Index datasets = 0;
    Summary mspe, ecpPct, width;             // continuous
    Summary misclassPct, auc, msd;           // binary
    Summary pGamma;
    double wallTime = 0.0;
};

struct BenchmarkReport {
    ReportRow row;
    std::vector<DatasetOutcome> outcomes;
    PhaseTimes phases;
    double wallTime = 0.0;
};

std::uint64_t dataset_seed(std::uint64_t seed, Index datasetIndex) noexcept;
std::uint64_t dataset_tarp_seed(std::uint64_t seed, Index datasetIndex) noexcept;

std::string method_label(const TarpConfig& cfg);

/// Simulates dataset `index` of the experiment and runs TARP on it.
DatasetOutcome run_dataset(const ExperimentSpec& spec, Index index);

/// Datasets run in parallel on tarp.workers threads; replicates inside run serially.
BenchmarkReport run_benchmark(const ExperimentSpec& spec);

/// Numeric-only tables, readable back with read_csv_table.
void write_report_csv(const std::filesystem::path& path, const ReportRow& row);
void write_outcomes_csv(const std::filesystem::path& path, const std::vector<DatasetOutcome>& outcomes);
Json report_json(const ExperimentSpec& spec, const BenchmarkReport& report);
Json timing_json(const BenchmarkReport& report);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace tarp
