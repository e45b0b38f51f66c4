#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace noiselab {

// blocks x treatments matrix of scores; rectangular, no missing cells.
struct ScoreTable {
    std::vector<std::string> block_labels;
    std::vector<std::string> treatment_labels;
    std::vector<std::vector<double>> values;  // [block][treatment]

    std::size_t blocks() const { return values.size(); }
    std::size_t treatments() const { return treatment_labels.size(); }
    void validate() const;
};

struct StatTestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    double alpha = 0.05;
    bool significant = false;
    // pairwise only
    std::size_t wins = 0, ties = 0, losses = 0;
};

// Friedman chi-square over within-block average ranks.
StatTestResult friedman(const ScoreTable& table, double alpha = 0.05);

// Two-sided Wilcoxon signed-rank on paired samples. Zero differences are
// dropped; exact p by sign-pattern distribution for m <= 25, normal
// approximation with continuity correction beyond.
StatTestResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y, double alpha = 0.05,
                                    std::size_t exact_cutoff = 25);

struct PairwiseCell {
    std::size_t row = 0;  // treatment index
    std::size_t col = 0;
    StatTestResult result;  // wins/ties/losses oriented column-vs-row
};

std::vector<PairwiseCell> wtl_matrix(const ScoreTable& table, double alpha = 0.05);

// Regularized upper incomplete gamma Q(a, x); chi-square survival is
// Q(df/2, x/2). Exposed for test cross-checks.
double gamma_q(double a, double x);
double chi_square_sf(double x, int df);

void write_pairwise_csv(const ScoreTable& table, const std::vector<PairwiseCell>& cells,
                        const std::string& path);

}  // namespace noiselab
