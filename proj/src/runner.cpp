#include "noiselab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "noiselab/detection.hpp"
#include "noiselab/rng.hpp"

namespace noiselab {

void ExperimentConfig::validate() const {
    if (!csv_path && !synthetic)
        throw std::invalid_argument("config needs either a csv path or synthetic parameters");
    if (csv_path && synthetic)
        throw std::invalid_argument("config cannot have both a csv path and synthetic parameters");
    if (imbalance_ratios.empty()) throw std::invalid_argument("imbalance ratio list is empty");
    if (noise_levels.empty()) throw std::invalid_argument("noise level list is empty");
    if (noise_models.empty()) throw std::invalid_argument("noise model list is empty");
    if (thresholds.empty()) throw std::invalid_argument("threshold list is empty");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    for (double p : noise_levels)
        if (p <= 0.0 || p > 1.0) throw std::invalid_argument("noise levels must lie in (0,1]");
    for (int t : thresholds)
        if (t < 1 || static_cast<std::size_t>(t) > pool.size())
            throw std::invalid_argument("threshold outside [1, pool size]");
    for (const auto& spec : pool.members) spec.validate();
    if (pool.size() < 2) throw std::invalid_argument("pool needs at least 2 members");
}

namespace {

using nlohmann::json;

ClassifierSpec spec_from_json(const json& j) {
    ClassifierSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("k")) spec.k = j["k"].get<int>();
    if (j.contains("criterion"))
        spec.criterion = j["criterion"].get<std::string>() == "entropy"
                             ? SplitCriterion::Entropy
                             : SplitCriterion::Gini;
    if (j.contains("max_depth")) spec.max_depth = j["max_depth"].get<int>();
    if (j.contains("tree_count")) spec.tree_count = j["tree_count"].get<int>();
    if (j.contains("bootstrap")) spec.bootstrap = j["bootstrap"].get<bool>();
    if (j.contains("features_per_split"))
        spec.features_per_split = j["features_per_split"].get<int>();
    if (j.contains("learning_rate")) spec.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("iterations")) spec.iterations = j["iterations"].get<int>();
    if (j.contains("l2_lambda")) spec.l2_lambda = j["l2_lambda"].get<double>();
    if (j.contains("epochs")) spec.epochs = j["epochs"].get<int>();
    if (j.contains("seed_offset")) spec.seed_offset = j["seed_offset"].get<std::uint64_t>();
    return spec;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in);

    ExperimentConfig config;
    const json& ds = j.at("dataset");
    if (ds.contains("name")) config.dataset_name = ds["name"].get<std::string>();
    if (ds.contains("csv")) config.csv_path = ds["csv"].get<std::string>();
    if (ds.contains("label_column")) config.label_column = ds["label_column"].get<std::string>();
    if (ds.contains("synthetic")) {
        const json& s = ds["synthetic"];
        SyntheticSpec spec;
        if (s.contains("n_positive")) spec.n_positive = s["n_positive"].get<std::size_t>();
        if (s.contains("n_negative")) spec.n_negative = s["n_negative"].get<std::size_t>();
        if (s.contains("dims")) spec.dims = s["dims"].get<std::size_t>();
        if (s.contains("separation")) spec.separation = s["separation"].get<double>();
        config.synthetic = spec;
    }

    for (const auto& ir : j.at("imbalance_ratios"))
        config.imbalance_ratios.push_back(ImbalanceRatio::parse(ir.get<std::string>()));
    for (const auto& p : j.at("noise_levels")) config.noise_levels.push_back(p.get<double>());
    for (const auto& m : j.at("noise_models"))
        config.noise_models.push_back(NoiseModel::parse(m.get<std::string>()));

    if (j.contains("pool"))
        for (const auto& member : j["pool"]) config.pool.members.push_back(spec_from_json(member));
    else
        config.pool = default_pool();

    if (j.contains("thresholds")) {
        for (const auto& t : j["thresholds"]) config.thresholds.push_back(t.get<int>());
    } else {
        for (std::size_t t = 1; t <= config.pool.size(); ++t)
            config.thresholds.push_back(static_cast<int>(t));
    }

    if (j.contains("repetitions")) config.repetitions = j["repetitions"].get<int>();
    if (j.contains("seed")) config.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("cleaning")) config.cleaning = j["cleaning"].get<bool>();
    if (j.contains("cleaning_folds")) config.cleaning_folds = j["cleaning_folds"].get<int>();
    if (j.contains("train_fraction")) config.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("resplit_per_repetition"))
        config.resplit_per_repetition = j["resplit_per_repetition"].get<bool>();
    if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
    return config;
}

namespace {

std::uint64_t derive_seed(const ExperimentConfig& config, const ImbalanceRatio& ir,
                          double p, const NoiseModel& model, int repetition) {
    std::uint64_t s = mix_seed(config.master_seed,
                               fnv1a(config.dataset_name.data(), config.dataset_name.size()));
    s = mix_seed(s, static_cast<std::uint64_t>(ir.minority_share));
    s = mix_seed(s, static_cast<std::uint64_t>(std::llround(p * 10000.0)));
    s = mix_seed(s, static_cast<std::uint64_t>(model.m_numerator) * 100000ULL +
                        static_cast<std::uint64_t>(model.m_denominator));
    return mix_seed(s, static_cast<std::uint64_t>(repetition));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();

    Dataset base;
    if (config.csv_path) {
        CsvOptions options;
        options.label_column = config.label_column;
        base = load_csv(*config.csv_path, options).dataset;
    } else {
        const auto& s = *config.synthetic;
        base = generate_synthetic(s.n_positive, s.n_negative, s.dims, s.separation,
                                  config.master_seed);
    }

    const bool do_clean = config.cleaning.value_or(config.csv_path.has_value());
    if (do_clean) {
        base = clean_consensus(base, config.pool, config.cleaning_folds,
                               mix_seed(config.master_seed, 0x70726570ULL))
                   .cleaned;
    }

    ExperimentResult result;
    for (const auto& ir : config.imbalance_ratios) {
        for (double p : config.noise_levels) {
            for (const auto& model : config.noise_models) {
                std::map<int, std::vector<RepetitionScores>> per_threshold;
                bool cell_infeasible = false;
                std::string infeasible_note;

                for (int rep = 0; rep < config.repetitions && !cell_infeasible; ++rep) {
                    const std::uint64_t seed = derive_seed(config, ir, p, model, rep);
                    RunRecord record;
                    record.ir = ir;
                    record.model = model;
                    record.p = p;
                    record.repetition = rep;
                    record.derived_seed = seed;

                    const Dataset sampled =
                        undersample_to_ir(base, ir, mix_seed(seed, 1));
                    const std::uint64_t split_seed =
                        config.resplit_per_repetition
                            ? mix_seed(seed, 2)
                            : mix_seed(derive_seed(config, ir, p, model, 0), 2);
                    const SplitPair parts = split(sampled, config.train_fraction, split_seed);

                    try {
                        const NoisePlan plan = plan_noise(parts.test, p, model);
                        auto [noisy_test, ledger] = inject(parts.test, plan, mix_seed(seed, 3));
                        const VoteMatrix votes =
                            build_votes(config.pool, parts.train, noisy_test, mix_seed(seed, 4));
                        for (int t : config.thresholds) {
                            const DetectionResult flags = flag(votes, Threshold::exact(t));
                            const ConfusionCounts counts = score(flags, ledger, noisy_test);
                            auto [precision, recall] = precision_recall(counts);
                            per_threshold[t].push_back(
                                {precision, recall, f_score(precision, recall)});
                        }
                    } catch (const InfeasiblePlan& e) {
                        // The grid cell cannot hold this much per-class noise;
                        // record it and move on rather than clamping.
                        record.infeasible = true;
                        record.note = std::string(e.what()) +
                                      " (max feasible p=" + std::to_string(e.max_feasible_p) + ")";
                        cell_infeasible = true;
                        infeasible_note = record.note;
                        per_threshold.clear();
                    }
                    result.log.push_back(std::move(record));
                }

                for (const auto& [t, scores] : per_threshold) {
                    ConfigKey key;
                    key.dataset = config.dataset_name;
                    key.ir = ir;
                    key.model = model;
                    key.p = p;
                    key.threshold_t = t;
                    key.pool_size = config.pool.size();
                    result.reports.push_back(aggregate(key, scores));
                }
            }
        }
    }
    return result;
}

void write_run_log(const std::vector<RunRecord>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "ir,model,p,repetition,derived_seed,infeasible,note\n";
    for (const auto& r : log) {
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        out << r.ir.str() << "," << r.model.str() << "," << r.p << "," << r.repetition << ","
            << r.derived_seed << "," << (r.infeasible ? 1 : 0) << "," << note << "\n";
    }
}

ComparisonSummary compare(const std::vector<std::string>& report_paths, double alpha) {
    std::vector<EvalReport> all;
    for (const auto& path : report_paths) {
        auto reports = read_report_csv(path);
        all.insert(all.end(), reports.begin(), reports.end());
    }
    if (all.empty()) throw std::invalid_argument("no report rows to compare");

    // Treatments: distinct noise models. Blocks: (dataset, ir, p, threshold).
    std::vector<std::string> treatments;
    std::map<std::string, std::map<std::string, double>> block_values;  // block -> model -> F
    for (const auto& r : all) {
        const std::string model = r.key.model.str();
        if (std::find(treatments.begin(), treatments.end(), model) == treatments.end())
            treatments.push_back(model);
        std::ostringstream block;
        block << r.key.dataset << "|" << r.key.ir.str() << "|p=" << r.key.p
              << "|t=" << r.key.threshold_t;
        auto [it, inserted] = block_values[block.str()].emplace(model, r.fscore_mean);
        if (!inserted)
            throw std::invalid_argument("duplicate cell for model " + model + " in block " +
                                        block.str());
    }
    std::sort(treatments.begin(), treatments.end());

    ComparisonSummary summary;
    summary.table.treatment_labels = treatments;
    for (const auto& [block, values] : block_values) {
        if (values.size() != treatments.size())
            throw std::invalid_argument("misaligned blocks: '" + block +
                                        "' lacks some treatments");
        summary.table.block_labels.push_back(block);
        std::vector<double> row;
        for (const auto& model : treatments) row.push_back(values.at(model));
        summary.table.values.push_back(std::move(row));
    }

    summary.friedman_result = friedman(summary.table, alpha);
    summary.pairwise = wtl_matrix(summary.table, alpha);
    return summary;
}

ThresholdCurve emit_threshold_curves(const std::vector<EvalReport>& reports) {
    // Group by everything except the threshold.
    std::map<std::string, std::vector<const EvalReport*>> cells;
    for (const auto& r : reports) {
        std::ostringstream cell;
        cell << r.key.dataset << "|" << r.key.ir.str() << "|" << r.key.model.str()
             << "|p=" << r.key.p;
        cells[cell.str()].push_back(&r);
    }

    ThresholdCurve curve;
    for (auto& [cell, rows] : cells) {
        std::sort(rows.begin(), rows.end(), [](const EvalReport* a, const EvalReport* b) {
            return a->key.threshold_t < b->key.threshold_t;
        });
        for (std::size_t i = 0; i + 1 < rows.size(); ++i)
            if (rows[i]->key.threshold_t == rows[i + 1]->key.threshold_t)
                throw std::invalid_argument("duplicate threshold in cell " + cell);

        int best_t = rows.front()->key.threshold_t;
        double best_f = rows.front()->fscore_mean;
        for (const auto* r : rows) {
            curve.points.push_back({r->key, r->fscore_mean});
            if (r->fscore_mean > best_f) {  // strict: ties keep the lowest t
                best_f = r->fscore_mean;
                best_t = r->key.threshold_t;
            }
        }
        curve.best_threshold.emplace_back(rows.front()->key, best_t);
    }
    return curve;
}

void write_threshold_curves(const ThresholdCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "dataset,ir,model,p,threshold_t,fscore_mean\n";
    for (const auto& point : curve.points) {
        out << point.key.dataset << "," << point.key.ir.str() << "," << point.key.model.str()
            << "," << point.key.p << "," << point.key.threshold_t << "," << point.fscore_mean
            << "\n";
    }
}

void write_best_thresholds(const ThresholdCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "dataset,ir,model,p,best_threshold\n";
    for (const auto& [key, t] : curve.best_threshold) {
        out << key.dataset << "," << key.ir.str() << "," << key.model.str() << "," << key.p
            << "," << t << "\n";
    }
}

}  // namespace noiselab
