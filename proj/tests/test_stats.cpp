#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noiselab/rng.hpp"
#include "noiselab/stats.hpp"

using namespace noiselab;

namespace {

ScoreTable table_of(std::vector<std::vector<double>> values) {
    ScoreTable table;
    table.values = std::move(values);
    for (std::size_t i = 0; i < table.values.size(); ++i)
        table.block_labels.push_back("b" + std::to_string(i));
    for (std::size_t j = 0; j < table.values[0].size(); ++j)
        table.treatment_labels.push_back("t" + std::to_string(j));
    return table;
}

// Independent Friedman statistic: ranks computed by pairwise counting
// instead of sorting.
double friedman_statistic_oracle(const ScoreTable& table) {
    const double n = static_cast<double>(table.blocks());
    const double k = static_cast<double>(table.treatments());
    std::vector<double> rank_sum(table.treatments(), 0.0);
    for (const auto& row : table.values) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            double rank = 1.0;
            for (std::size_t l = 0; l < row.size(); ++l) {
                if (l == j) continue;
                if (row[l] < row[j]) rank += 1.0;
                else if (row[l] == row[j]) rank += 0.5;
            }
            rank_sum[j] += rank;
        }
    }
    double sum_sq = 0.0;
    for (double rs : rank_sum) {
        const double mean = rs / n;
        sum_sq += mean * mean;
    }
    return 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
}

// Exact two-sided Wilcoxon p by explicit enumeration of all 2^m sign
// patterns.
double wilcoxon_p_oracle(const std::vector<double>& diffs) {
    std::vector<double> abs_d;
    for (double d : diffs)
        if (d != 0.0) abs_d.push_back(std::fabs(d));
    const std::size_t m = abs_d.size();
    if (m == 0) return 1.0;

    // mid-ranks
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m; ++i) {
        double rank = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            if (abs_d[j] < abs_d[i]) rank += 1.0;
            else if (abs_d[j] == abs_d[i]) rank += 0.5;
        }
        ranks[i] = rank;
    }

    double w_plus = 0.0;
    std::size_t idx = 0;
    for (double d : diffs) {
        if (d == 0.0) continue;
        if (d > 0.0) w_plus += ranks[idx];
        ++idx;
    }
    const double total = static_cast<double>(m) * (static_cast<double>(m) + 1.0) / 2.0;
    const double w = std::min(w_plus, total - w_plus);

    std::size_t at_or_below = 0;
    for (std::size_t mask = 0; mask < (1u << m); ++mask) {
        double sum = 0.0;
        for (std::size_t b = 0; b < m; ++b)
            if (mask & (1u << b)) sum += ranks[b];
        if (sum <= w + 1e-12) ++at_or_below;
    }
    return std::min(1.0, 2.0 * static_cast<double>(at_or_below) /
                             std::pow(2.0, static_cast<double>(m)));
}

}  // namespace

TEST_CASE("friedman on a strictly ordered 4x3 table") {
    const ScoreTable table = table_of({{0.1, 0.2, 0.3},
                                       {0.4, 0.5, 0.6},
                                       {0.2, 0.3, 0.4},
                                       {0.5, 0.6, 0.7}});
    const StatTestResult result = friedman(table);
    CHECK(result.statistic == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(result.p_value == doctest::Approx(std::exp(-4.0)).epsilon(1e-3));  // chi2(2) sf
    CHECK(result.significant);
}

TEST_CASE("friedman on an all-equal table is degenerate") {
    const ScoreTable table = table_of({{0.5, 0.5, 0.5}, {0.2, 0.2, 0.2}});
    const StatTestResult result = friedman(table);
    CHECK(result.statistic == 0.0);
    CHECK(result.p_value == 1.0);
    CHECK_FALSE(result.significant);
}

TEST_CASE("friedman statistic matches an independent ranking oracle") {
    Rng rng(321);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t blocks = 2 + rng.next_below(8);
        const std::size_t treatments = 2 + rng.next_below(4);
        std::vector<std::vector<double>> values(blocks, std::vector<double>(treatments));
        for (auto& row : values)
            for (auto& v : row) v = std::floor(rng.next_double() * 5.0) / 5.0;  // force ties
        const ScoreTable table = table_of(values);
        CHECK(friedman(table).statistic ==
              doctest::Approx(friedman_statistic_oracle(table)).epsilon(1e-9));
    }
}

TEST_CASE("friedman is invariant under monotone transformations within blocks") {
    const ScoreTable table = table_of({{0.1, 0.9, 0.5}, {0.3, 0.2, 0.8}, {0.6, 0.4, 0.7}});
    ScoreTable squashed = table;
    for (auto& row : squashed.values)
        for (auto& v : row) v = std::exp(3.0 * v);
    CHECK(friedman(table).statistic == doctest::Approx(friedman(squashed).statistic));
}

TEST_CASE("friedman with two treatments still follows the formula") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> values(5, std::vector<double>(2));
        for (auto& row : values)
            for (auto& v : row) v = rng.next_double();
        const ScoreTable table = table_of(values);
        CHECK(friedman(table).statistic ==
              doctest::Approx(friedman_statistic_oracle(table)).epsilon(1e-9));
    }
}

TEST_CASE("wilcoxon on identical samples") {
    const std::vector<double> x(19, 0.4);
    const StatTestResult result = wilcoxon_signed_rank(x, x);
    CHECK(result.p_value == 1.0);
    CHECK(result.wins == 0);
    CHECK(result.ties == 19);
    CHECK(result.losses == 0);
    CHECK_FALSE(result.significant);
}

TEST_CASE("wilcoxon on five positive differences gives p = 2/32") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> y(5, 0.0);
    const StatTestResult result = wilcoxon_signed_rank(x, y);
    CHECK(result.statistic == 0.0);  // W- = 0
    CHECK(result.p_value == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(result.wins == 5);
    CHECK(result.losses == 0);
}

TEST_CASE("wilcoxon exact p equals the 2^m enumeration oracle for m <= 12") {
    Rng rng(909);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.next_below(12);
        std::vector<double> x(m), y(m);
        for (std::size_t i = 0; i < m; ++i) {
            // quantized values to provoke ties and zero differences
            x[i] = std::floor(rng.next_double() * 8.0) / 8.0;
            y[i] = std::floor(rng.next_double() * 8.0) / 8.0;
        }
        std::vector<double> diffs(m);
        for (std::size_t i = 0; i < m; ++i) diffs[i] = x[i] - y[i];
        const StatTestResult result = wilcoxon_signed_rank(x, y);
        CHECK(result.p_value == doctest::Approx(wilcoxon_p_oracle(diffs)).epsilon(1e-12));
    }
}

TEST_CASE("normal approximation tracks the exact p for 20 <= m <= 25") {
    Rng rng(1234);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 20 + rng.next_below(6);
        std::vector<double> x(m), y(m);
        for (std::size_t i = 0; i < m; ++i) {
            x[i] = rng.next_double();
            y[i] = rng.next_double();
        }
        const double exact = wilcoxon_signed_rank(x, y).p_value;
        const double approx = wilcoxon_signed_rank(x, y, 0.05, /*exact_cutoff=*/0).p_value;
        CHECK(std::fabs(exact - approx) < 0.01);
    }
}

TEST_CASE("swapping the samples swaps wins and losses but not p") {
    Rng rng(55);
    std::vector<double> x(15), y(15);
    for (std::size_t i = 0; i < 15; ++i) {
        x[i] = rng.next_double();
        y[i] = rng.next_double();
    }
    const StatTestResult ab = wilcoxon_signed_rank(x, y);
    const StatTestResult ba = wilcoxon_signed_rank(y, x);
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
    CHECK(ab.wins == ba.losses);
    CHECK(ab.losses == ba.wins);
    CHECK(ab.ties == ba.ties);
}

TEST_CASE("a 17/0/2 pattern with small losses is significant at 0.05") {
    std::vector<double> x, y;
    for (int i = 0; i < 17; ++i) {
        x.push_back(0.8);
        y.push_back(0.6);  // consistent wins
    }
    x.push_back(0.60);
    y.push_back(0.61);  // two small losses
    x.push_back(0.50);
    y.push_back(0.52);
    const StatTestResult result = wilcoxon_signed_rank(x, y);
    CHECK(result.wins == 17);
    CHECK(result.ties == 0);
    CHECK(result.losses == 2);
    CHECK(result.significant);
}

TEST_CASE("pairwise matrix over identical treatments is all ties") {
    const std::vector<std::vector<double>> rows(7, std::vector<double>{0.4, 0.4});
    const auto cells = wtl_matrix(table_of(rows));
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].result.ties == 7);
    CHECK(cells[0].result.p_value == 1.0);
}

TEST_CASE("three treatments produce three pairwise cells") {
    const ScoreTable table = table_of({{0.1, 0.2, 0.3}, {0.2, 0.3, 0.4}});
    CHECK(wtl_matrix(table).size() == 3);
}

TEST_CASE("a uniformly dominant column wins every block with exact p") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 19; ++i) {
        const double base = 0.4 + 0.01 * i;
        rows.push_back({base, base + 0.1});
    }
    const auto cells = wtl_matrix(table_of(rows));
    REQUIRE(cells.size() == 1);
    // column treatment vs row treatment
    CHECK(cells[0].result.wins == 19);
    CHECK(cells[0].result.ties == 0);
    CHECK(cells[0].result.losses == 0);
    CHECK(cells[0].result.p_value ==
          doctest::Approx(2.0 / std::pow(2.0, 19.0)).epsilon(1e-12));
    for (const auto& cell : cells)
        CHECK(cell.result.wins + cell.result.ties + cell.result.losses == 19);
}

TEST_CASE("chi-square survival function sanity") {
    CHECK(chi_square_sf(0.0, 2) == 1.0);
    CHECK(chi_square_sf(8.0, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    // df=1: P(X > x) = erfc(sqrt(x/2))
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK_THROWS(chi_square_sf(1.0, 0));
}
