#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "noiselab/runner.hpp"

using namespace noiselab;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig config;
    config.dataset_name = "synthetic";
    SyntheticSpec synth;
    synth.n_positive = 60;
    synth.n_negative = 60;
    synth.dims = 2;
    synth.separation = 3.0;
    config.synthetic = synth;
    config.imbalance_ratios = {ImbalanceRatio::parse("50:50")};
    config.noise_levels = {0.15};
    config.noise_models = {NoiseModel::ncar(), NoiseModel::nar(9, 1)};
    config.thresholds = {2, 6, 10};
    config.repetitions = 2;
    config.master_seed = 5;
    config.pool = default_pool();
    config.cleaning = false;
    return config;
}

std::string file_contents(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("experiment emits one aggregate row per feasible cell and threshold") {
    const ExperimentResult result = run_experiment(small_config());
    // 1 IR x 1 p x 2 models x 3 thresholds
    CHECK(result.reports.size() == 6);
    // 2 models x 2 repetitions logged
    CHECK(result.log.size() == 4);
    for (const auto& record : result.log) CHECK_FALSE(record.infeasible);
    for (const auto& report : result.reports) {
        CHECK(report.repetition_count == 2);
        CHECK(report.fscore_mean >= 0.0);
        CHECK(report.fscore_mean <= 1.0);
    }
}

TEST_CASE("experiment output is byte-identical across reruns") {
    const ExperimentConfig config = small_config();
    const ExperimentResult a = run_experiment(config);
    const ExperimentResult b = run_experiment(config);
    write_report_csv(a.reports, "runner_tmp_a.csv");
    write_report_csv(b.reports, "runner_tmp_b.csv");
    CHECK(file_contents("runner_tmp_a.csv") == file_contents("runner_tmp_b.csv"));
    std::remove("runner_tmp_a.csv");
    std::remove("runner_tmp_b.csv");
}

TEST_CASE("infeasible noise cells are logged and skipped") {
    ExperimentConfig config = small_config();
    SyntheticSpec synth;
    synth.n_positive = 30;
    synth.n_negative = 120;
    config.synthetic = synth;
    config.imbalance_ratios = {ImbalanceRatio::parse("20:80")};
    config.noise_levels = {0.30};
    config.noise_models = {NoiseModel::nar(9, 1)};  // 27% of the test set from a 20% minority
    const ExperimentResult result = run_experiment(config);
    CHECK(result.reports.empty());
    REQUIRE_FALSE(result.log.empty());
    CHECK(result.log.back().infeasible);
    CHECK(result.log.back().note.find("max feasible p") != std::string::npos);
}

TEST_CASE("config json round-trip with overridden pool") {
    const std::string path = "runner_tmp_config.json";
    {
        std::ofstream out(path);
        out << R"json({
            "dataset": {"name": "toy", "synthetic": {"n_positive": 40, "n_negative": 40}},
            "imbalance_ratios": ["50:50"],
            "noise_levels": [0.1],
            "noise_models": ["NCAR", "NAR(1:9)"],
            "thresholds": [1, 2],
            "repetitions": 3,
            "seed": 11,
            "cleaning": false,
            "pool": [
                {"kind": "knn", "k": 1},
                {"kind": "gaussian-nb", "seed_offset": 1},
                {"kind": "decision-tree", "criterion": "entropy", "max_depth": 4, "seed_offset": 2}
            ]
        })json";
    }
    const ExperimentConfig config = ExperimentConfig::from_json_file(path);
    std::remove(path.c_str());

    CHECK(config.dataset_name == "toy");
    CHECK(config.pool.size() == 3);
    CHECK(config.pool.members[2].criterion == SplitCriterion::Entropy);
    CHECK(config.repetitions == 3);
    CHECK(config.noise_models.size() == 2);
    CHECK_NOTHROW(config.validate());

    const ExperimentResult result = run_experiment(config);
    CHECK(result.reports.size() == 4);  // 2 models x 2 thresholds
}

TEST_CASE("config validation rejects bad grids") {
    ExperimentConfig config = small_config();
    config.noise_levels = {};
    CHECK_THROWS(config.validate());

    config = small_config();
    config.thresholds = {11};
    CHECK_THROWS(config.validate());

    config = small_config();
    config.repetitions = 0;
    CHECK_THROWS(config.validate());

    config = small_config();
    config.synthetic.reset();
    CHECK_THROWS(config.validate());
}

TEST_CASE("compare builds a rectangular table and detects dominance") {
    // Synthesize three model report files over 19 blocks at one threshold.
    std::vector<std::string> paths;
    const char* models[] = {"NCAR", "NAR(9:1)", "NAR(1:9)"};
    const double offsets[] = {0.05, 0.0, 0.1};
    for (int f = 0; f < 3; ++f) {
        std::vector<EvalReport> reports;
        for (int block = 0; block < 19; ++block) {
            ConfigKey key;
            key.dataset = "d" + std::to_string(block);
            key.ir = ImbalanceRatio::parse("50:50");
            key.model = NoiseModel::parse(models[f]);
            key.p = 0.15;
            key.threshold_t = 6;
            key.pool_size = 10;
            const double base = 0.4 + 0.01 * block;
            const double f1 = base + offsets[f];
            reports.push_back(aggregate(key, {{f1, f1, f1}}));
        }
        const std::string path = "runner_tmp_report_" + std::to_string(f) + ".csv";
        write_report_csv(reports, path);
        paths.push_back(path);
    }

    const ComparisonSummary summary = compare(paths);
    for (const auto& p : paths) std::remove(p.c_str());

    CHECK(summary.table.blocks() == 19);
    CHECK(summary.table.treatments() == 3);
    CHECK(summary.pairwise.size() == 3);
    CHECK(summary.friedman_result.significant);
    // NAR(1:9) dominates every block; find its pairwise cell vs NAR(9:1).
    for (const auto& cell : summary.pairwise) {
        CHECK(cell.result.wins + cell.result.ties + cell.result.losses == 19);
        if (summary.table.treatment_labels[cell.col] == "NAR(1:9)" &&
            summary.table.treatment_labels[cell.row] == "NAR(9:1)") {
            CHECK(cell.result.wins == 19);
            CHECK(cell.result.p_value ==
                  doctest::Approx(2.0 / std::pow(2.0, 19.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("compare on identical reports finds nothing significant") {
    std::vector<EvalReport> reports;
    for (const char* model : {"NCAR", "NAR(9:1)"}) {
        for (int block = 0; block < 5; ++block) {
            ConfigKey key;
            key.dataset = "d" + std::to_string(block);
            key.ir = ImbalanceRatio::parse("50:50");
            key.model = NoiseModel::parse(model);
            key.p = 0.1;
            key.threshold_t = 6;
            key.pool_size = 10;
            reports.push_back(aggregate(key, {{0.5, 0.5, 0.5}}));
        }
    }
    write_report_csv(reports, "runner_tmp_same.csv");
    const ComparisonSummary summary = compare({"runner_tmp_same.csv"});
    std::remove("runner_tmp_same.csv");

    CHECK_FALSE(summary.friedman_result.significant);
    REQUIRE(summary.pairwise.size() == 1);
    CHECK(summary.pairwise[0].result.ties == 5);
    CHECK(summary.pairwise[0].result.p_value == 1.0);
}

TEST_CASE("compare rejects misaligned blocks") {
    std::vector<EvalReport> reports;
    ConfigKey key;
    key.dataset = "a";
    key.ir = ImbalanceRatio::parse("50:50");
    key.model = NoiseModel::ncar();
    key.p = 0.1;
    key.threshold_t = 1;
    key.pool_size = 10;
    reports.push_back(aggregate(key, {{0.5, 0.5, 0.5}}));
    key.dataset = "b";
    key.model = NoiseModel::nar(9, 1);
    reports.push_back(aggregate(key, {{0.5, 0.5, 0.5}}));
    write_report_csv(reports, "runner_tmp_misaligned.csv");
    CHECK_THROWS(compare({"runner_tmp_misaligned.csv"}));
    std::remove("runner_tmp_misaligned.csv");
}

TEST_CASE("threshold curves report the argmax with lowest-t tie-break") {
    std::vector<EvalReport> reports;
    const double fscores[] = {0.3, 0.5, 0.5, 0.2};  // peak shared by t=2 and t=3
    for (int t = 1; t <= 4; ++t) {
        ConfigKey key;
        key.dataset = "d";
        key.ir = ImbalanceRatio::parse("50:50");
        key.model = NoiseModel::ncar();
        key.p = 0.1;
        key.threshold_t = t;
        key.pool_size = 10;
        const double f1 = fscores[t - 1];
        reports.push_back(aggregate(key, {{f1, f1, f1}}));
    }
    const ThresholdCurve curve = emit_threshold_curves(reports);
    REQUIRE(curve.best_threshold.size() == 1);
    CHECK(curve.best_threshold[0].second == 2);
    CHECK(curve.points.size() == 4);
    CHECK(curve.points[0].key.threshold_t == 1);
    CHECK(curve.points[3].key.threshold_t == 4);
}

TEST_CASE("full grid produces ten curve rows per cell") {
    ExperimentConfig config = small_config();
    config.noise_models = {NoiseModel::ncar()};
    config.thresholds.clear();
    for (int t = 1; t <= 10; ++t) config.thresholds.push_back(t);
    config.repetitions = 1;
    const ExperimentResult result = run_experiment(config);
    const ThresholdCurve curve = emit_threshold_curves(result.reports);
    CHECK(curve.best_threshold.size() == 1);
    CHECK(curve.points.size() == 10);
}
