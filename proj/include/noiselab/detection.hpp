#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "noiselab/classifiers.hpp"
#include "noiselab/dataset.hpp"

namespace noiselab {

// Per-instance misclassification counts from the pool, plus the raw
// per-member prediction record.
struct VoteMatrix {
    std::size_t pool_size = 0;
    std::map<std::int64_t, int> counts;                 // id -> members that missed
    std::vector<std::vector<std::string>> predictions;  // [member][instance, id order]
    std::vector<std::int64_t> instance_ids;             // id order

    int count_of(std::int64_t id) const;
};

struct Threshold {
    int t = 1;  // flag when count >= t

    static Threshold exact(int t);
    static Threshold majority(std::size_t pool_size);   // floor(N/2)+1
    static Threshold consensus(std::size_t pool_size);  // N
    // Percentage grid: L in (0,100] maps to round(L/100 * N), at least 1.
    static Threshold percent(double l_percent, std::size_t pool_size);
};

struct DetectionResult {
    Threshold threshold;
    std::set<std::int64_t> flagged;
    std::size_t pool_size = 0;
};

VoteMatrix build_votes(const Pool& pool, const Dataset& train, const Dataset& evaluate,
                       std::uint64_t seed);

DetectionResult flag(const VoteMatrix& votes, const Threshold& threshold);

void write_detection_csv(const DetectionResult& result, const VoteMatrix& votes,
                         const std::string& path);

struct CleanResult {
    Dataset cleaned;
    std::vector<std::int64_t> removed_ids;
};

// Stratified k-fold cross-validated consensus filter: an instance is
// removed when every pool member misclassifies it on its held-out fold.
CleanResult clean_consensus(const Dataset& data, const Pool& pool, int folds,
                            std::uint64_t seed);

}  // namespace noiselab
