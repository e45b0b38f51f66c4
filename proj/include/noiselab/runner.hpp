#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noiselab/classifiers.hpp"
#include "noiselab/dataset.hpp"
#include "noiselab/evaluation.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/stats.hpp"

namespace noiselab {

struct SyntheticSpec {
    std::size_t n_positive = 100;
    std::size_t n_negative = 100;
    std::size_t dims = 2;
    double separation = 2.5;
};

struct ExperimentConfig {
    std::string dataset_name = "synthetic";
    std::optional<std::string> csv_path;      // one of csv_path / synthetic
    std::optional<SyntheticSpec> synthetic;
    std::string label_column = "label";

    std::vector<ImbalanceRatio> imbalance_ratios;
    std::vector<double> noise_levels;     // p values
    std::vector<NoiseModel> noise_models;
    std::vector<int> thresholds;          // integer t values
    int repetitions = 100;
    std::uint64_t master_seed = 0;
    Pool pool;
    std::optional<bool> cleaning;  // default: on for files, off for synthetic
    int cleaning_folds = 10;
    double train_fraction = 0.7;
    bool resplit_per_repetition = true;
    std::string output_dir = ".";

    void validate() const;
    static ExperimentConfig from_json_file(const std::string& path);
};

struct RunRecord {
    ImbalanceRatio ir;
    NoiseModel model;
    double p = 0.0;
    int repetition = 0;
    std::uint64_t derived_seed = 0;
    bool infeasible = false;
    std::string note;
};

struct ExperimentResult {
    std::vector<EvalReport> reports;  // one per feasible cell x threshold
    std::vector<RunRecord> log;       // one per cell x repetition
};

ExperimentResult run_experiment(const ExperimentConfig& config);

void write_run_log(const std::vector<RunRecord>& log, const std::string& path);

struct ComparisonSummary {
    ScoreTable table;
    StatTestResult friedman_result;
    std::vector<PairwiseCell> pairwise;
};

// Treatments are the distinct noise models found across the report files;
// blocks are (dataset, ir, p, threshold) cells shared by all treatments.
ComparisonSummary compare(const std::vector<std::string>& report_paths, double alpha = 0.05);

struct ThresholdCurvePoint {
    ConfigKey key;  // threshold_t varies within a cell
    double fscore_mean = 0.0;
};

struct ThresholdCurve {
    std::vector<ThresholdCurvePoint> points;  // ascending t within each cell
    // argmax threshold per cell; ties resolved toward the lowest t
    std::vector<std::pair<ConfigKey, int>> best_threshold;
};

ThresholdCurve emit_threshold_curves(const std::vector<EvalReport>& reports);
void write_threshold_curves(const ThresholdCurve& curve, const std::string& path);
void write_best_thresholds(const ThresholdCurve& curve, const std::string& path);

}  // namespace noiselab
