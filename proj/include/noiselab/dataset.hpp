#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noiselab {

enum class FeatureKind { Numeric, Categorical };

struct FeatureDescriptor {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<std::string> levels;  // categorical only, sorted, distinct

    bool operator==(const FeatureDescriptor&) const = default;
};

// Column layout and the binary label contract for a dataset.
struct Schema {
    std::vector<FeatureDescriptor> features;
    std::string label_column;
    std::string positive_label;
    std::string negative_label;

    // Width of the encoded matrix: 1 per numeric feature, |levels| per
    // categorical feature.
    std::size_t encoded_width() const;
    std::uint64_t fingerprint() const;
    bool operator==(const Schema&) const = default;
};

struct Instance {
    std::int64_t id = 0;
    std::vector<std::string> values;  // raw feature cells, schema order
    std::string label;

    bool operator==(const Instance&) const = default;
};

// Immutable table of instances with stable ids. All transformations
// return new Datasets; ids survive every one of them.
class Dataset {
public:
    Dataset() = default;
    Dataset(Schema schema, std::vector<Instance> instances);

    const Schema& schema() const { return schema_; }
    const std::vector<Instance>& instances() const { return instances_; }
    std::size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }

    std::size_t count_label(const std::string& label) const;
    std::size_t positive_count() const { return count_label(schema_.positive_label); }
    std::size_t negative_count() const { return count_label(schema_.negative_label); }

    // Label value held by the smaller class; ties go to the positive label.
    const std::string& minority_label() const;
    const std::string& majority_label() const;

    std::vector<std::int64_t> ids() const;
    const Instance& by_id(std::int64_t id) const;
    bool has_id(std::int64_t id) const;

    Dataset subset(const std::vector<std::int64_t>& keep_ids) const;
    Dataset with_labels(const std::vector<std::pair<std::int64_t, std::string>>& overrides) const;

    bool operator==(const Dataset&) const = default;

private:
    Schema schema_;
    std::vector<Instance> instances_;  // sorted by id
};

// Minority:majority shares as integers summing to 100, e.g. 20:80.
struct ImbalanceRatio {
    int minority_share = 50;
    int majority_share = 50;

    static ImbalanceRatio parse(const std::string& text);  // "20:80"
    std::string str() const;
    bool operator==(const ImbalanceRatio&) const = default;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    double train_fraction = 0.0;
};

struct LoadReport {
    Dataset dataset;
    std::size_t dropped_rows = 0;  // rows rejected for empty cells
};

struct CsvOptions {
    std::string label_column = "label";
    // Per-column kind overrides by column name; absent columns are inferred.
    std::vector<std::pair<std::string, FeatureKind>> kind_hints;
};

LoadReport load_csv(const std::string& path, const CsvOptions& options = {});
void write_csv(const Dataset& data, const std::string& path, bool with_ids = false);

SplitPair split(const Dataset& data, double train_fraction, std::uint64_t seed);

Dataset undersample_to_ir(const Dataset& data, const ImbalanceRatio& target, std::uint64_t seed);

// Two spherical unit-variance Gaussian clusters separated along axis 0.
// First count is the positive class, second the negative class.
Dataset generate_synthetic(std::size_t n_positive, std::size_t n_negative,
                           std::size_t dims, double separation, std::uint64_t seed);

}  // namespace noiselab
