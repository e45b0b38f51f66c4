#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noiselab/detection.hpp"
#include "noiselab/runner.hpp"

namespace fs = std::filesystem;
using namespace noiselab;

namespace {

Threshold parse_threshold(const std::string& text, std::size_t pool_size) {
    if (text == "majority") return Threshold::majority(pool_size);
    if (text == "consensus") return Threshold::consensus(pool_size);
    if (!text.empty() && text.back() == '%')
        return Threshold::percent(std::stod(text.substr(0, text.size() - 1)), pool_size);
    return Threshold::exact(std::stoi(text));
}

int run_synth(std::size_t n_pos, std::size_t n_neg, std::size_t dims, double separation,
              std::uint64_t seed, const std::string& out) {
    const Dataset data = generate_synthetic(n_pos, n_neg, dims, separation, seed);
    write_csv(data, out, /*with_ids=*/true);
    std::cout << "wrote " << data.size() << " instances to " << out << "\n";
    return 0;
}

int run_clean(const std::string& input, const std::string& label_col, int folds,
              std::uint64_t seed, const std::string& out, const std::string& removed_out) {
    CsvOptions options;
    options.label_column = label_col;
    const LoadReport report = load_csv(input, options);
    if (report.dropped_rows > 0)
        std::cout << "dropped " << report.dropped_rows << " incomplete rows\n";

    const CleanResult result = clean_consensus(report.dataset, default_pool(), folds, seed);
    write_csv(result.cleaned, out, /*with_ids=*/true);
    std::ofstream removed(removed_out);
    if (!removed) throw std::runtime_error("cannot write " + removed_out);
    removed << "id\n";
    for (auto id : result.removed_ids) removed << id << "\n";
    std::cout << "removed " << result.removed_ids.size() << " of " << report.dataset.size()
              << " instances\n";
    return 0;
}

int run_inject(const std::string& input, const std::string& label_col, double p,
               const std::string& model_text, std::uint64_t seed, const std::string& out,
               const std::string& ledger_out) {
    CsvOptions options;
    options.label_column = label_col;
    const Dataset data = load_csv(input, options).dataset;
    const NoiseModel model = NoiseModel::parse(model_text);
    const NoisePlan plan = plan_noise(data, p, model);
    auto [noisy, ledger] = inject(data, plan, seed);
    write_csv(noisy, out, /*with_ids=*/true);
    ledger.write_csv(noisy, ledger_out);
    std::cout << "flipped " << plan.minority_flips << " minority + " << plan.majority_flips
              << " majority labels\n";
    return 0;
}

int run_detect(const std::string& train_path, const std::string& test_path,
               const std::string& label_col, const std::string& threshold_text,
               std::uint64_t seed, const std::string& out) {
    CsvOptions options;
    options.label_column = label_col;
    const Dataset train = load_csv(train_path, options).dataset;
    const Dataset test = load_csv(test_path, options).dataset;
    const Pool pool = default_pool();
    const VoteMatrix votes = build_votes(pool, train, test, seed);
    const DetectionResult result = flag(votes, parse_threshold(threshold_text, pool.size()));
    write_detection_csv(result, votes, out);
    std::cout << "flagged " << result.flagged.size() << " of " << test.size() << " instances\n";
    return 0;
}

int run_experiment_cmd(ExperimentConfig config) {
    fs::create_directories(config.output_dir);
    const ExperimentResult result = run_experiment(config);
    const std::string report_path = config.output_dir + "/report.csv";
    const std::string log_path = config.output_dir + "/run_log.csv";
    write_report_csv(result.reports, report_path);
    write_run_log(result.log, log_path);
    std::size_t infeasible = 0;
    for (const auto& r : result.log)
        if (r.infeasible) ++infeasible;
    std::cout << result.reports.size() << " aggregate rows -> " << report_path << "\n";
    if (infeasible > 0) std::cout << infeasible << " infeasible cells logged\n";
    return 0;
}

int run_compare(const std::vector<std::string>& reports, double alpha,
                const std::string& out_prefix) {
    const ComparisonSummary summary = compare(reports, alpha);
    const std::string friedman_path = out_prefix + "_friedman.csv";
    std::ofstream out(friedman_path);
    if (!out) throw std::runtime_error("cannot write " + friedman_path);
    out << "blocks,treatments,statistic,p_value,significant\n";
    out << summary.table.blocks() << "," << summary.table.treatments() << ","
        << summary.friedman_result.statistic << "," << summary.friedman_result.p_value << ","
        << (summary.friedman_result.significant ? 1 : 0) << "\n";
    write_pairwise_csv(summary.table, summary.pairwise, out_prefix + "_pairwise.csv");
    std::cout << "friedman chi2=" << summary.friedman_result.statistic
              << " p=" << summary.friedman_result.p_value << " over "
              << summary.table.blocks() << " blocks\n";
    return 0;
}

int run_curves(const std::vector<std::string>& reports, const std::string& out_prefix) {
    std::vector<EvalReport> all;
    for (const auto& path : reports) {
        auto rows = read_report_csv(path);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    const ThresholdCurve curve = emit_threshold_curves(all);
    write_threshold_curves(curve, out_prefix + "_curves.csv");
    write_best_thresholds(curve, out_prefix + "_best.csv");
    std::cout << curve.points.size() << " curve points over " << curve.best_threshold.size()
              << " cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label-noise injection, ensemble detection, and evaluation toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a two-cluster Gaussian dataset CSV");
    std::size_t n_pos = 100, n_neg = 100, dims = 2;
    double separation = 2.5;
    std::uint64_t seed = 0;
    std::string out = "synthetic.csv";
    synth->add_option("--n-pos", n_pos, "Positive-class instances");
    synth->add_option("--n-neg", n_neg, "Negative-class instances");
    synth->add_option("--dims", dims, "Feature dimensions");
    synth->add_option("--separation", separation, "Cluster mean separation along axis 0");
    synth->add_option("--seed", seed, "RNG seed")->required();
    synth->add_option("--out", out, "Output CSV path");

    // clean
    auto* clean = app.add_subcommand("clean", "Cross-validated consensus cleaning");
    std::string input, label_col = "label", removed_out = "removed.csv";
    std::string clean_out = "cleaned.csv";
    int folds = 10;
    clean->add_option("--input", input, "Input CSV")->required();
    clean->add_option("--label-col", label_col, "Label column name");
    clean->add_option("--folds", folds, "Cross-validation folds");
    clean->add_option("--seed", seed, "RNG seed")->required();
    clean->add_option("--out", clean_out, "Cleaned CSV path");
    clean->add_option("--removed-out", removed_out, "Removed-id CSV path");

    // inject
    auto* inject_cmd = app.add_subcommand("inject", "Inject label noise and emit a ledger");
    double p = 0.1;
    std::string model_text = "NCAR";
    std::string inject_out = "noisy.csv", ledger_out = "ledger.csv";
    inject_cmd->add_option("--input", input, "Input CSV")->required();
    inject_cmd->add_option("--label-col", label_col, "Label column name");
    inject_cmd->add_option("--p", p, "Total noise level")->required();
    inject_cmd->add_option("--model", model_text, "NCAR or NAR(min:maj)");
    inject_cmd->add_option("--seed", seed, "RNG seed")->required();
    inject_cmd->add_option("--out", inject_out, "Noisy CSV path");
    inject_cmd->add_option("--ledger-out", ledger_out, "Ledger CSV path");

    // detect
    auto* detect = app.add_subcommand("detect", "Ensemble vote detection on a test CSV");
    std::string train_path, test_path, threshold_text = "majority";
    std::string detect_out = "detection.csv";
    detect->add_option("--train", train_path, "Training CSV")->required();
    detect->add_option("--test", test_path, "Test CSV to vote on")->required();
    detect->add_option("--label-col", label_col, "Label column name");
    detect->add_option("--threshold", threshold_text,
                       "Integer count, percentage like '60%', 'majority', or 'consensus'");
    detect->add_option("--seed", seed, "RNG seed")->required();
    detect->add_option("--out", detect_out, "Votes/flags CSV path");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run the full configuration grid");
    std::string config_path;
    std::uint64_t exp_seed = 0;
    int repetitions = -1;
    std::string output_dir;
    std::vector<std::string> irs, models;
    std::vector<double> ps;
    std::vector<int> thresholds;
    int cleaning_flag = -1;
    experiment->add_option("--config", config_path, "JSON config file")->required();
    experiment->add_option("--seed", exp_seed, "Master seed")->required();
    experiment->add_option("--repetitions", repetitions, "Override repetition count");
    experiment->add_option("--output-dir", output_dir, "Override output directory");
    experiment->add_option("--ir", irs, "Override imbalance ratios, e.g. 20:80");
    experiment->add_option("--p", ps, "Override noise levels");
    experiment->add_option("--model", models, "Override noise models");
    experiment->add_option("--threshold", thresholds, "Override thresholds");
    experiment->add_flag("--cleaning{1},--no-cleaning{0}", cleaning_flag,
                         "Force cleaning on or off");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Friedman + pairwise Wilcoxon over reports");
    std::vector<std::string> report_paths;
    double alpha = 0.05;
    std::string out_prefix = "stats";
    compare_cmd->add_option("reports", report_paths, "Report CSV files")->required();
    compare_cmd->add_option("--alpha", alpha, "Significance level");
    compare_cmd->add_option("--out-prefix", out_prefix, "Output file prefix");

    // curves
    auto* curves = app.add_subcommand("curves", "F-score vs threshold curves from reports");
    curves->add_option("reports", report_paths, "Report CSV files")->required();
    curves->add_option("--out-prefix", out_prefix, "Output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(n_pos, n_neg, dims, separation, seed, out);
        if (clean->parsed())
            return run_clean(input, label_col, folds, seed, clean_out, removed_out);
        if (inject_cmd->parsed())
            return run_inject(input, label_col, p, model_text, seed, inject_out, ledger_out);
        if (detect->parsed())
            return run_detect(train_path, test_path, label_col, threshold_text, seed, detect_out);
        if (experiment->parsed()) {
            ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
            config.master_seed = exp_seed;
            if (repetitions > 0) config.repetitions = repetitions;
            if (!output_dir.empty()) config.output_dir = output_dir;
            if (!irs.empty()) {
                config.imbalance_ratios.clear();
                for (const auto& ir : irs)
                    config.imbalance_ratios.push_back(ImbalanceRatio::parse(ir));
            }
            if (!ps.empty()) config.noise_levels = ps;
            if (!models.empty()) {
                config.noise_models.clear();
                for (const auto& m : models) config.noise_models.push_back(NoiseModel::parse(m));
            }
            if (!thresholds.empty()) config.thresholds = thresholds;
            if (cleaning_flag >= 0) config.cleaning = cleaning_flag == 1;
            return run_experiment_cmd(std::move(config));
        }
        if (compare_cmd->parsed()) return run_compare(report_paths, alpha, out_prefix);
        if (curves->parsed()) return run_curves(report_paths, out_prefix);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
