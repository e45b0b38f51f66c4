#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "noiselab/dataset.hpp"

namespace noiselab {

enum class LearnerKind {
    Knn,
    GaussianNb,
    DecisionTree,
    RandomForest,
    LogisticRegression,
    Perceptron,
    NearestCentroid,
};

enum class SplitCriterion { Gini, Entropy };

std::string kind_name(LearnerKind kind);
LearnerKind kind_from_name(const std::string& name);

struct ClassifierSpec {
    LearnerKind kind = LearnerKind::Knn;

    int k = 5;                                        // knn
    SplitCriterion criterion = SplitCriterion::Gini;  // trees
    int max_depth = 12;                               // trees
    int tree_count = 25;                              // forest
    bool bootstrap = true;                            // forest
    int features_per_split = 0;                       // forest; 0 = ceil(sqrt(width))
    double learning_rate = 0.1;                       // linear models
    int iterations = 500;                             // logistic regression
    double l2_lambda = 1e-3;                          // logistic regression
    int epochs = 10;                                  // perceptron
    std::uint64_t seed_offset = 0;

    void validate() const;
    std::string describe() const;
};

// Standardization and one-hot statistics learned from the training split
// and re-applied at predict time.
struct FeatureEncoder {
    Schema schema;
    std::vector<double> means;  // per encoded column
    std::vector<double> sdevs;  // zero-variance columns carry 1.0

    static FeatureEncoder fit(const Dataset& train);
    // Encodes one instance; sets unseen_level if a categorical cell holds a
    // value absent from the schema's levels.
    std::vector<double> encode(const Instance& inst, bool& unseen_level) const;
    std::size_t width() const { return means.size(); }
};

struct ModelState;  // learned parameters, opaque

class TrainedModel {
public:
    TrainedModel(ClassifierSpec spec, FeatureEncoder encoder, std::uint64_t fingerprint,
                 std::string majority_label, std::shared_ptr<const ModelState> state);

    const ClassifierSpec& spec() const { return spec_; }
    std::uint64_t schema_fingerprint() const { return fingerprint_; }
    const FeatureEncoder& encoder() const { return encoder_; }
    const std::string& majority_label() const { return majority_label_; }
    const ModelState& state() const { return *state_; }

private:
    ClassifierSpec spec_;
    FeatureEncoder encoder_;
    std::uint64_t fingerprint_;
    std::string majority_label_;  // fallback for unseen-level instances
    std::shared_ptr<const ModelState> state_;
};

struct PredictionResult {
    std::vector<std::string> labels;          // one per instance, id order
    std::vector<std::int64_t> unseen_level_ids;  // predicted by majority fallback
};

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train, std::uint64_t seed);
PredictionResult predict(const TrainedModel& model, const Dataset& instances);

struct Pool {
    std::vector<ClassifierSpec> members;

    std::size_t size() const { return members.size(); }
};

// The fixed 10-member pool covering instance-based, Bayesian, tree,
// forest, and linear families.
Pool default_pool();

}  // namespace noiselab
