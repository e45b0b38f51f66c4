#include "noiselab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace noiselab {

void ScoreTable::validate() const {
    if (values.size() != block_labels.size())
        throw std::invalid_argument("block label count does not match rows");
    for (const auto& row : values)
        if (row.size() != treatment_labels.size())
            throw std::invalid_argument("score table is not rectangular");
}

namespace {

// Average-rank (mid-rank) assignment, rank 1 for the smallest value.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_q requires a > 0");
    if (x < 0.0) throw std::invalid_argument("gamma_q requires x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi-square df must be >= 1");
    if (x <= 0.0) return 1.0;
    return gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

StatTestResult friedman(const ScoreTable& table, double alpha) {
    table.validate();
    const std::size_t n = table.blocks();
    const std::size_t k = table.treatments();
    if (n < 2 || k < 2)
        throw std::invalid_argument("friedman needs >= 2 blocks and >= 2 treatments");

    std::vector<double> rank_sum(k, 0.0);
    for (const auto& row : table.values) {
        const auto ranks = average_ranks(row);
        for (std::size_t j = 0; j < k; ++j) rank_sum[j] += ranks[j];
    }

    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double mean_rank = rank_sum[j] / nd;
        sum_sq += mean_rank * mean_rank;
    }
    const double statistic =
        12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);

    StatTestResult result;
    result.test = "friedman";
    result.statistic = std::max(0.0, statistic);
    result.n = n;
    result.alpha = alpha;
    result.p_value = result.statistic == 0.0
                         ? 1.0
                         : chi_square_sf(result.statistic, static_cast<int>(k) - 1);
    result.significant = result.p_value < alpha;
    return result;
}

StatTestResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y, double alpha,
                                    std::size_t exact_cutoff) {
    if (x.size() != y.size())
        throw std::invalid_argument("paired samples must have equal length");
    if (x.empty()) throw std::invalid_argument("paired samples must be non-empty");

    StatTestResult result;
    result.test = "wilcoxon";
    result.alpha = alpha;
    result.n = x.size();

    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d > 0.0) ++result.wins;
        else if (d < 0.0) ++result.losses;
        else ++result.ties;
        if (d != 0.0) diffs.push_back(d);
    }

    const std::size_t m = diffs.size();
    if (m == 0) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.significant = false;
        return result;
    }

    std::vector<double> abs_d(m);
    for (std::size_t i = 0; i < m; ++i) abs_d[i] = std::fabs(diffs[i]);
    const std::vector<double> ranks = average_ranks(abs_d);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (diffs[i] > 0.0) w_plus += ranks[i];
    const double total = static_cast<double>(m) * (static_cast<double>(m) + 1.0) / 2.0;
    const double w_minus = total - w_plus;
    const double w = std::min(w_plus, w_minus);
    result.statistic = w;

    if (m <= exact_cutoff) {
        // Exact null distribution of 2*W+ (doubled ranks keep mid-ranks
        // integral) by dynamic programming over sign assignments.
        std::vector<long long> doubled(m);
        long long max_sum = 0;
        for (std::size_t i = 0; i < m; ++i) {
            doubled[i] = static_cast<long long>(std::llround(2.0 * ranks[i]));
            max_sum += doubled[i];
        }
        std::vector<double> count(static_cast<std::size_t>(max_sum) + 1, 0.0);
        count[0] = 1.0;
        long long reach = 0;
        for (std::size_t i = 0; i < m; ++i) {
            reach += doubled[i];
            for (long long s = reach; s >= doubled[i]; --s)
                count[static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(s - doubled[i])];
        }
        const long long w_doubled = static_cast<long long>(std::llround(2.0 * w));
        double below = 0.0;
        for (long long s = 0; s <= w_doubled; ++s) below += count[static_cast<std::size_t>(s)];
        result.p_value = std::min(1.0, 2.0 * below / std::pow(2.0, static_cast<double>(m)));
    } else {
        const double md = static_cast<double>(m);
        const double mu = md * (md + 1.0) / 4.0;
        double tie_correction = 0.0;
        std::vector<double> sorted = abs_d;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j + 1 < m && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_correction += t * t * t - t;
            i = j + 1;
        }
        const double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_correction / 48.0;
        const double z = (w - mu + 0.5) / std::sqrt(var);
        result.p_value = std::min(1.0, 2.0 * normal_cdf(z));
    }

    result.significant = result.p_value < alpha;
    return result;
}

std::vector<PairwiseCell> wtl_matrix(const ScoreTable& table, double alpha) {
    table.validate();
    const std::size_t k = table.treatments();
    if (k < 2) throw std::invalid_argument("pairwise comparison needs >= 2 treatments");

    std::vector<PairwiseCell> cells;
    for (std::size_t row = 0; row < k; ++row) {
        for (std::size_t col = row + 1; col < k; ++col) {
            std::vector<double> row_scores, col_scores;
            for (const auto& block : table.values) {
                row_scores.push_back(block[row]);
                col_scores.push_back(block[col]);
            }
            PairwiseCell cell;
            cell.row = row;
            cell.col = col;
            // column treatment compared against the row treatment
            cell.result = wilcoxon_signed_rank(col_scores, row_scores, alpha);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_pairwise_csv(const ScoreTable& table, const std::vector<PairwiseCell>& cells,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "row_treatment,col_treatment,wins,ties,losses,p_value,significant\n";
    for (const auto& c : cells) {
        out << table.treatment_labels[c.row] << "," << table.treatment_labels[c.col] << ","
            << c.result.wins << "," << c.result.ties << "," << c.result.losses << ","
            << c.result.p_value << "," << (c.result.significant ? 1 : 0) << "\n";
    }
}

}  // namespace noiselab
