#pragma once

#include <string>
#include <vector>

#include "noiselab/dataset.hpp"

namespace noiselab::testing {

// Minimal numeric schema: one feature column "x", labels pos/neg.
inline Schema tiny_schema() {
    Schema schema;
    schema.label_column = "label";
    schema.positive_label = "pos";
    schema.negative_label = "neg";
    FeatureDescriptor fd;
    fd.name = "x";
    fd.kind = FeatureKind::Numeric;
    schema.features.push_back(fd);
    return schema;
}

// Dataset with n_pos positive and n_neg negative instances; feature value
// is the instance id so rows stay distinct.
inline Dataset counts_dataset(std::size_t n_pos, std::size_t n_neg) {
    std::vector<Instance> rows;
    std::int64_t id = 0;
    for (std::size_t i = 0; i < n_pos; ++i)
        rows.push_back({id++, {std::to_string(id)}, "pos"});
    for (std::size_t i = 0; i < n_neg; ++i)
        rows.push_back({id++, {std::to_string(id)}, "neg"});
    return Dataset(tiny_schema(), std::move(rows));
}

// Two tight clusters at +center/-center on one axis; labels by cluster.
inline Dataset two_cluster_dataset(std::size_t n_per_class, double center) {
    std::vector<Instance> rows;
    std::int64_t id = 0;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        const double jitter = 0.01 * static_cast<double>(i);
        rows.push_back({id++, {std::to_string(center + jitter)}, "pos"});
    }
    for (std::size_t i = 0; i < n_per_class; ++i) {
        const double jitter = 0.01 * static_cast<double>(i);
        rows.push_back({id++, {std::to_string(-center - jitter)}, "neg"});
    }
    return Dataset(tiny_schema(), std::move(rows));
}

}  // namespace noiselab::testing
