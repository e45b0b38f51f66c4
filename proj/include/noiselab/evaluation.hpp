#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "noiselab/detection.hpp"
#include "noiselab/noise.hpp"

namespace noiselab {

struct ConfusionCounts {
    std::size_t tp = 0;  // flagged and truly flipped
    std::size_t fp = 0;  // flagged but clean
    std::size_t fn = 0;  // flipped but unflagged
    // minority/majority breakdown keyed by the flipped instance's original class
    std::size_t tp_minority = 0;
    std::size_t tp_majority = 0;
    std::size_t fn_minority = 0;
    std::size_t fn_majority = 0;
};

ConfusionCounts score(const DetectionResult& result, const InjectionLedger& ledger,
                      const Dataset& noisy_test);

// Degenerate conventions: nothing flagged -> precision 1; no true noise ->
// recall 1.
std::pair<double, double> precision_recall(const ConfusionCounts& counts);

// Standard F-beta: (1+b^2)PR / (b^2 P + R); 0 when P = R = 0.
double f_score(double precision, double recall, double beta = 1.0);

struct RepetitionScores {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

struct ConfigKey {
    std::string dataset;
    ImbalanceRatio ir;
    NoiseModel model;
    double p = 0.0;
    int threshold_t = 0;
    std::size_t pool_size = 0;

    bool operator==(const ConfigKey&) const = default;
    std::string str() const;
};

struct EvalReport {
    ConfigKey key;
    std::vector<RepetitionScores> repetitions;  // empty when read back from CSV
    std::size_t repetition_count = 0;
    double precision_mean = 0.0, precision_sd = 0.0;
    double recall_mean = 0.0, recall_sd = 0.0;
    double fscore_mean = 0.0, fscore_sd = 0.0;
};

EvalReport aggregate(const ConfigKey& key, const std::vector<RepetitionScores>& scores);

void write_report_csv(const std::vector<EvalReport>& reports, const std::string& path);
std::vector<EvalReport> read_report_csv(const std::string& path);

}  // namespace noiselab
