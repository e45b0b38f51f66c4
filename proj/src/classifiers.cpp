#include "noiselab/classifiers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "noiselab/rng.hpp"

namespace noiselab {

namespace {

constexpr double kVarianceFloor = 1e-9;

double parse_numeric(const std::string& cell) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::invalid_argument("non-numeric cell '" + cell + "'");
    return v;
}

}  // namespace

std::string kind_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Knn: return "knn";
        case LearnerKind::GaussianNb: return "gaussian-nb";
        case LearnerKind::DecisionTree: return "decision-tree";
        case LearnerKind::RandomForest: return "random-forest";
        case LearnerKind::LogisticRegression: return "logistic-regression";
        case LearnerKind::Perceptron: return "perceptron";
        case LearnerKind::NearestCentroid: return "nearest-centroid";
    }
    return "unknown";
}

LearnerKind kind_from_name(const std::string& name) {
    if (name == "knn") return LearnerKind::Knn;
    if (name == "gaussian-nb") return LearnerKind::GaussianNb;
    if (name == "decision-tree") return LearnerKind::DecisionTree;
    if (name == "random-forest") return LearnerKind::RandomForest;
    if (name == "logistic-regression") return LearnerKind::LogisticRegression;
    if (name == "perceptron") return LearnerKind::Perceptron;
    if (name == "nearest-centroid") return LearnerKind::NearestCentroid;
    throw std::invalid_argument("unknown learner kind '" + name + "'");
}

void ClassifierSpec::validate() const {
    if (kind == LearnerKind::Knn && (k < 1 || k % 2 == 0))
        throw std::invalid_argument("knn k must be odd and >= 1");
    if ((kind == LearnerKind::DecisionTree || kind == LearnerKind::RandomForest) && max_depth < 1)
        throw std::invalid_argument("tree depth must be >= 1");
    if (kind == LearnerKind::RandomForest && tree_count < 1)
        throw std::invalid_argument("forest tree count must be >= 1");
    if (kind == LearnerKind::Perceptron && epochs < 1)
        throw std::invalid_argument("perceptron epochs must be >= 1");
    if (kind == LearnerKind::LogisticRegression && iterations < 1)
        throw std::invalid_argument("logistic iterations must be >= 1");
}

std::string ClassifierSpec::describe() const {
    switch (kind) {
        case LearnerKind::Knn: return "knn(k=" + std::to_string(k) + ")";
        case LearnerKind::DecisionTree:
            return "decision-tree(" +
                   std::string(criterion == SplitCriterion::Gini ? "gini" : "entropy") +
                   ",depth=" + std::to_string(max_depth) + ")";
        case LearnerKind::RandomForest:
            return "random-forest(trees=" + std::to_string(tree_count) +
                   ",depth=" + std::to_string(max_depth) + ")";
        default: return kind_name(kind);
    }
}

FeatureEncoder FeatureEncoder::fit(const Dataset& train) {
    FeatureEncoder enc;
    enc.schema = train.schema();
    const std::size_t width = enc.schema.encoded_width();
    enc.means.assign(width, 0.0);
    enc.sdevs.assign(width, 1.0);

    // Raw one-hot/numeric pass, then standardize numeric columns only.
    std::vector<double> sum(width, 0.0), sumsq(width, 0.0);
    std::vector<bool> numeric_col(width, false);
    const double n = static_cast<double>(train.size());

    for (const auto& inst : train.instances()) {
        std::size_t col = 0;
        for (std::size_t f = 0; f < enc.schema.features.size(); ++f) {
            const auto& fd = enc.schema.features[f];
            if (fd.kind == FeatureKind::Numeric) {
                const double v = parse_numeric(inst.values[f]);
                sum[col] += v;
                sumsq[col] += v * v;
                numeric_col[col] = true;
                ++col;
            } else {
                col += fd.levels.size();
            }
        }
    }
    for (std::size_t c = 0; c < width; ++c) {
        if (!numeric_col[c] || n == 0.0) continue;
        enc.means[c] = sum[c] / n;
        const double var = std::max(0.0, sumsq[c] / n - enc.means[c] * enc.means[c]);
        enc.sdevs[c] = var > kVarianceFloor ? std::sqrt(var) : 1.0;
    }
    return enc;
}

std::vector<double> FeatureEncoder::encode(const Instance& inst, bool& unseen_level) const {
    unseen_level = false;
    std::vector<double> row(width(), 0.0);
    std::size_t col = 0;
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
        const auto& fd = schema.features[f];
        if (fd.kind == FeatureKind::Numeric) {
            row[col] = (parse_numeric(inst.values[f]) - means[col]) / sdevs[col];
            ++col;
        } else {
            auto it = std::find(fd.levels.begin(), fd.levels.end(), inst.values[f]);
            if (it == fd.levels.end()) {
                unseen_level = true;
            } else {
                row[col + static_cast<std::size_t>(it - fd.levels.begin())] = 1.0;
            }
            col += fd.levels.size();
        }
    }
    return row;
}

namespace {

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_label = -1;  // 0 = negative, 1 = positive; -1 for internal
};

struct Tree {
    std::vector<TreeNode> nodes;

    int classify(const std::vector<double>& x) const {
        int node = 0;
        while (nodes[node].leaf_label < 0) {
            node = x[static_cast<std::size_t>(nodes[node].feature)] <= nodes[node].threshold
                       ? nodes[node].left
                       : nodes[node].right;
        }
        return nodes[node].leaf_label;
    }
};

}  // namespace

// Everything any learner might have fit. Opaque behind TrainedModel.
struct ModelState {
    // instance-based
    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;  // 1 positive, 0 negative
    std::vector<std::int64_t> train_ids;

    // gaussian nb
    double log_prior[2] = {0.0, 0.0};
    std::vector<double> nb_mean[2];
    std::vector<double> nb_var[2];

    // trees / forest
    std::vector<Tree> trees;
    int vote_tie_label = 1;

    // linear
    std::vector<double> weights;
    double bias = 0.0;

    // centroid
    std::vector<double> centroid[2];
};

TrainedModel::TrainedModel(ClassifierSpec spec, FeatureEncoder encoder,
                           std::uint64_t fingerprint, std::string majority_label,
                           std::shared_ptr<const ModelState> state)
    : spec_(std::move(spec)),
      encoder_(std::move(encoder)),
      fingerprint_(fingerprint),
      majority_label_(std::move(majority_label)),
      state_(std::move(state)) {}

namespace {

double impurity(SplitCriterion criterion, std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    const double q = 1.0 - p;
    if (criterion == SplitCriterion::Gini) return 2.0 * p * q;
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (q > 0.0) h -= q * std::log2(q);
    return h;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<int>& y;
    SplitCriterion criterion;
    int max_depth;
    int features_per_split;  // <= 0 or >= width means all
    Rng* rng;                // only consulted when subsetting features
    Tree tree;

    int build(const std::vector<std::size_t>& rows, int depth, int parent_majority) {
        std::size_t pos = 0;
        for (auto r : rows) pos += static_cast<std::size_t>(y[r]);
        const std::size_t total = rows.size();

        int majority;
        if (pos * 2 > total) majority = 1;
        else if (pos * 2 < total) majority = 0;
        else majority = parent_majority;

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (pos == 0 || pos == total || depth >= max_depth || total < 2) {
            tree.nodes[static_cast<std::size_t>(node_index)].leaf_label = majority;
            return node_index;
        }

        const std::size_t width = x[rows[0]].size();
        std::vector<std::size_t> candidates(width);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        if (features_per_split > 0 && static_cast<std::size_t>(features_per_split) < width) {
            // Partial Fisher-Yates, then sort so the tie-break by lowest
            // feature index is stable regardless of draw order.
            for (std::size_t i = 0; i < static_cast<std::size_t>(features_per_split); ++i) {
                const std::size_t j = i + static_cast<std::size_t>(
                    rng->next_below(width - i));
                std::swap(candidates[i], candidates[j]);
            }
            candidates.resize(static_cast<std::size_t>(features_per_split));
            std::sort(candidates.begin(), candidates.end());
        }

        const double parent_imp = impurity(criterion, pos, total);
        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::pair<double, int>> column(total);
        for (auto f : candidates) {
            for (std::size_t i = 0; i < total; ++i)
                column[i] = {x[rows[i]][f], y[rows[i]]};
            std::sort(column.begin(), column.end());

            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < total; ++i) {
                left_pos += static_cast<std::size_t>(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = total - left_n;
                const double gain =
                    parent_imp -
                    (static_cast<double>(left_n) * impurity(criterion, left_pos, left_n) +
                     static_cast<double>(right_n) * impurity(criterion, pos - left_pos, right_n)) /
                        static_cast<double>(total);
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                    found = true;
                }
            }
        }

        if (!found) {
            tree.nodes[static_cast<std::size_t>(node_index)].leaf_label = majority;
            return node_index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) {
            if (x[r][best_feature] <= best_threshold) left_rows.push_back(r);
            else right_rows.push_back(r);
        }

        tree.nodes[static_cast<std::size_t>(node_index)].feature = static_cast<int>(best_feature);
        tree.nodes[static_cast<std::size_t>(node_index)].threshold = best_threshold;
        const int left = build(left_rows, depth + 1, majority);
        const int right = build(right_rows, depth + 1, majority);
        tree.nodes[static_cast<std::size_t>(node_index)].left = left;
        tree.nodes[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }
};

Tree build_tree(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                const std::vector<std::size_t>& rows, SplitCriterion criterion,
                int max_depth, int features_per_split, Rng* rng, int root_majority) {
    TreeBuilder builder{x, y, criterion, max_depth, features_per_split, rng, {}};
    builder.build(rows, 0, root_majority);
    return std::move(builder.tree);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train, std::uint64_t seed) {
    spec.validate();
    if (train.empty()) throw std::invalid_argument("empty training set");
    if (train.positive_count() == 0 || train.negative_count() == 0)
        throw std::invalid_argument("training set must contain both classes");

    FeatureEncoder encoder = FeatureEncoder::fit(train);
    auto state = std::make_shared<ModelState>();

    // Dataset instances are id-sorted, which makes training order canonical.
    const std::size_t n = train.size();
    state->train_x.reserve(n);
    state->train_y.reserve(n);
    for (const auto& inst : train.instances()) {
        bool unseen = false;
        state->train_x.push_back(encoder.encode(inst, unseen));
        state->train_y.push_back(inst.label == train.schema().positive_label ? 1 : 0);
        state->train_ids.push_back(inst.id);
    }
    const std::size_t width = encoder.width();
    const std::size_t n_pos = train.positive_count();
    const std::size_t n_neg = n - n_pos;
    const int overall_majority = n_pos >= n_neg ? 1 : 0;
    state->vote_tie_label = overall_majority;

    Rng rng(mix_seed(seed, spec.seed_offset));

    switch (spec.kind) {
        case LearnerKind::Knn:
        case LearnerKind::NearestCentroid:
        case LearnerKind::GaussianNb: {
            if (spec.kind != LearnerKind::Knn) {
                for (int cls : {0, 1}) {
                    state->centroid[cls].assign(width, 0.0);
                    state->nb_mean[cls].assign(width, 0.0);
                    state->nb_var[cls].assign(width, 0.0);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const int cls = state->train_y[i];
                    for (std::size_t c = 0; c < width; ++c)
                        state->centroid[cls][c] += state->train_x[i][c];
                }
                const double counts[2] = {static_cast<double>(n_neg), static_cast<double>(n_pos)};
                for (int cls : {0, 1})
                    for (std::size_t c = 0; c < width; ++c) state->centroid[cls][c] /= counts[cls];
                if (spec.kind == LearnerKind::GaussianNb) {
                    state->nb_mean[0] = state->centroid[0];
                    state->nb_mean[1] = state->centroid[1];
                    for (std::size_t i = 0; i < n; ++i) {
                        const int cls = state->train_y[i];
                        for (std::size_t c = 0; c < width; ++c) {
                            const double d = state->train_x[i][c] - state->nb_mean[cls][c];
                            state->nb_var[cls][c] += d * d;
                        }
                    }
                    for (int cls : {0, 1})
                        for (std::size_t c = 0; c < width; ++c)
                            state->nb_var[cls][c] =
                                std::max(state->nb_var[cls][c] / counts[cls], kVarianceFloor);
                    state->log_prior[0] = std::log(counts[0] / static_cast<double>(n));
                    state->log_prior[1] = std::log(counts[1] / static_cast<double>(n));
                }
            }
            break;
        }
        case LearnerKind::DecisionTree: {
            std::vector<std::size_t> rows(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            state->trees.push_back(build_tree(state->train_x, state->train_y, rows,
                                              spec.criterion, spec.max_depth, 0, &rng,
                                              overall_majority));
            break;
        }
        case LearnerKind::RandomForest: {
            int mtry = spec.features_per_split;
            if (mtry <= 0)
                mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(width))));
            for (int t = 0; t < spec.tree_count; ++t) {
                Rng tree_rng(mix_seed(mix_seed(seed, spec.seed_offset),
                                      static_cast<std::uint64_t>(t) + 1));
                std::vector<std::size_t> rows(n);
                if (spec.bootstrap) {
                    for (auto& r : rows) r = static_cast<std::size_t>(tree_rng.next_below(n));
                    std::sort(rows.begin(), rows.end());
                } else {
                    std::iota(rows.begin(), rows.end(), std::size_t{0});
                }
                state->trees.push_back(build_tree(state->train_x, state->train_y, rows,
                                                  spec.criterion, spec.max_depth, mtry,
                                                  &tree_rng, overall_majority));
            }
            break;
        }
        case LearnerKind::LogisticRegression: {
            state->weights.assign(width, 0.0);
            state->bias = 0.0;
            std::vector<double> grad(width);
            for (int it = 0; it < spec.iterations; ++it) {
                std::fill(grad.begin(), grad.end(), 0.0);
                double grad_b = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double z = state->bias;
                    for (std::size_t c = 0; c < width; ++c)
                        z += state->weights[c] * state->train_x[i][c];
                    const double err = sigmoid(z) - static_cast<double>(state->train_y[i]);
                    for (std::size_t c = 0; c < width; ++c)
                        grad[c] += err * state->train_x[i][c];
                    grad_b += err;
                }
                const double inv_n = 1.0 / static_cast<double>(n);
                for (std::size_t c = 0; c < width; ++c)
                    state->weights[c] -= spec.learning_rate *
                                         (grad[c] * inv_n + spec.l2_lambda * state->weights[c]);
                state->bias -= spec.learning_rate * grad_b * inv_n;
            }
            break;
        }
        case LearnerKind::Perceptron: {
            state->weights.assign(width, 0.0);
            state->bias = 0.0;
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (int e = 0; e < spec.epochs; ++e) {
                rng.shuffle(order);
                for (auto i : order) {
                    double z = state->bias;
                    for (std::size_t c = 0; c < width; ++c)
                        z += state->weights[c] * state->train_x[i][c];
                    const double target = state->train_y[i] == 1 ? 1.0 : -1.0;
                    if (target * z <= 0.0) {
                        for (std::size_t c = 0; c < width; ++c)
                            state->weights[c] += target * state->train_x[i][c];
                        state->bias += target;
                    }
                }
            }
            break;
        }
    }

    // knn keeps the raw training matrix; other learners no longer need it.
    if (spec.kind != LearnerKind::Knn) {
        state->train_x.clear();
        state->train_y.clear();
        state->train_ids.clear();
    }

    const std::string majority_label = overall_majority == 1
                                           ? train.schema().positive_label
                                           : train.schema().negative_label;
    return TrainedModel(spec, std::move(encoder), train.schema().fingerprint(),
                        majority_label, std::move(state));
}

namespace {

int classify_encoded(const TrainedModel& model, const std::vector<double>& x) {
    const auto& spec = model.spec();
    const auto& st = model.state();
    const std::size_t width = x.size();

    switch (spec.kind) {
        case LearnerKind::Knn: {
            // (distance, id) pairs; ties in distance break toward lower id.
            std::vector<std::pair<double, std::int64_t>> dist;
            dist.reserve(st.train_x.size());
            std::vector<int> label_of;
            label_of.reserve(st.train_x.size());
            for (std::size_t i = 0; i < st.train_x.size(); ++i) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < width; ++c) {
                    const double d = x[c] - st.train_x[i][c];
                    d2 += d * d;
                }
                dist.emplace_back(d2, st.train_ids[i]);
                label_of.push_back(st.train_y[i]);
            }
            std::vector<std::size_t> idx(dist.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(spec.k), idx.size());
            std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                              [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
            int votes = 0;
            for (std::size_t i = 0; i < k; ++i) votes += label_of[idx[i]] == 1 ? 1 : -1;
            if (votes == 0) return st.vote_tie_label;
            return votes > 0 ? 1 : 0;
        }
        case LearnerKind::GaussianNb: {
            double score[2];
            for (int cls : {0, 1}) {
                double s = st.log_prior[cls];
                for (std::size_t c = 0; c < width; ++c) {
                    const double var = st.nb_var[cls][c];
                    const double d = x[c] - st.nb_mean[cls][c];
                    s += -0.5 * (std::log(6.283185307179586 * var) + d * d / var);
                }
                score[cls] = s;
            }
            return score[1] >= score[0] ? 1 : 0;
        }
        case LearnerKind::DecisionTree:
            return st.trees[0].classify(x);
        case LearnerKind::RandomForest: {
            int votes = 0;
            for (const auto& tree : st.trees) votes += tree.classify(x) == 1 ? 1 : -1;
            if (votes == 0) return st.vote_tie_label;
            return votes > 0 ? 1 : 0;
        }
        case LearnerKind::LogisticRegression:
        case LearnerKind::Perceptron: {
            double z = st.bias;
            for (std::size_t c = 0; c < width; ++c) z += st.weights[c] * x[c];
            return z >= 0.0 ? 1 : 0;
        }
        case LearnerKind::NearestCentroid: {
            double d2[2];
            for (int cls : {0, 1}) {
                double s = 0.0;
                for (std::size_t c = 0; c < width; ++c) {
                    const double d = x[c] - st.centroid[cls][c];
                    s += d * d;
                }
                d2[cls] = s;
            }
            return d2[1] <= d2[0] ? 1 : 0;
        }
    }
    throw std::logic_error("unreachable learner kind");
}

}  // namespace

PredictionResult predict(const TrainedModel& model, const Dataset& instances) {
    if (!instances.empty() &&
        instances.schema().fingerprint() != model.schema_fingerprint())
        throw std::invalid_argument("schema fingerprint mismatch between model and data");

    PredictionResult result;
    result.labels.reserve(instances.size());
    const auto& schema = model.encoder().schema;
    for (const auto& inst : instances.instances()) {
        bool unseen = false;
        std::vector<double> x = model.encoder().encode(inst, unseen);
        if (unseen) {
            result.unseen_level_ids.push_back(inst.id);
            result.labels.push_back(model.majority_label());
            continue;
        }
        const int y = classify_encoded(model, x);
        result.labels.push_back(y == 1 ? schema.positive_label : schema.negative_label);
    }
    return result;
}

Pool default_pool() {
    Pool pool;
    auto add = [&](ClassifierSpec spec) {
        spec.seed_offset = pool.members.size();
        pool.members.push_back(spec);
    };

    ClassifierSpec s;

    s = {};
    s.kind = LearnerKind::Knn;
    s.k = 1;
    add(s);

    s = {};
    s.kind = LearnerKind::Knn;
    s.k = 5;
    add(s);

    s = {};
    s.kind = LearnerKind::GaussianNb;
    add(s);

    s = {};
    s.kind = LearnerKind::DecisionTree;
    s.criterion = SplitCriterion::Gini;
    s.max_depth = 12;
    add(s);

    s = {};
    s.kind = LearnerKind::DecisionTree;
    s.criterion = SplitCriterion::Entropy;
    s.max_depth = 5;
    add(s);

    s = {};
    s.kind = LearnerKind::RandomForest;
    s.tree_count = 25;
    s.max_depth = 12;
    add(s);

    s = {};
    s.kind = LearnerKind::LogisticRegression;
    s.l2_lambda = 1e-3;
    add(s);

    s = {};
    s.kind = LearnerKind::Perceptron;
    s.epochs = 10;
    add(s);

    s = {};
    s.kind = LearnerKind::NearestCentroid;
    add(s);

    s = {};
    s.kind = LearnerKind::RandomForest;
    s.tree_count = 50;
    s.max_depth = 6;
    add(s);

    return pool;
}

}  // namespace noiselab
