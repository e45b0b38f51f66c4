#include "noiselab/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "noiselab/rng.hpp"

namespace noiselab {

int VoteMatrix::count_of(std::int64_t id) const {
    auto it = counts.find(id);
    if (it == counts.end()) throw std::out_of_range("id not in vote matrix");
    return it->second;
}

Threshold Threshold::exact(int t) {
    if (t < 1) throw std::invalid_argument("threshold must be >= 1");
    return Threshold{t};
}

Threshold Threshold::majority(std::size_t pool_size) {
    return Threshold{static_cast<int>(pool_size / 2) + 1};
}

Threshold Threshold::consensus(std::size_t pool_size) {
    return Threshold{static_cast<int>(pool_size)};
}

Threshold Threshold::percent(double l_percent, std::size_t pool_size) {
    if (l_percent <= 0.0 || l_percent > 100.0)
        throw std::invalid_argument("threshold percentage must lie in (0,100]");
    const int t = std::max(1, static_cast<int>(std::floor(
                                  l_percent / 100.0 * static_cast<double>(pool_size) + 0.5)));
    return Threshold{t};
}

VoteMatrix build_votes(const Pool& pool, const Dataset& train, const Dataset& evaluate,
                       std::uint64_t seed) {
    if (pool.size() < 2) throw std::invalid_argument("pool needs at least 2 members");

    VoteMatrix votes;
    votes.pool_size = pool.size();
    votes.instance_ids = evaluate.ids();
    for (auto id : votes.instance_ids) votes.counts[id] = 0;

    for (std::size_t member = 0; member < pool.size(); ++member) {
        const std::uint64_t member_seed = mix_seed(seed, member);
        PredictionResult preds;
        try {
            TrainedModel model = fit(pool.members[member], train, member_seed);
            preds = predict(model, evaluate);
        } catch (const std::exception& e) {
            throw std::runtime_error("pool member " + std::to_string(member) + " (" +
                                     pool.members[member].describe() + "): " + e.what());
        }
        const auto& instances = evaluate.instances();
        for (std::size_t i = 0; i < instances.size(); ++i)
            if (preds.labels[i] != instances[i].label) ++votes.counts[instances[i].id];
        votes.predictions.push_back(std::move(preds.labels));
    }
    return votes;
}

DetectionResult flag(const VoteMatrix& votes, const Threshold& threshold) {
    if (threshold.t < 1 || static_cast<std::size_t>(threshold.t) > votes.pool_size)
        throw std::invalid_argument("threshold outside [1, pool size]");
    DetectionResult result;
    result.threshold = threshold;
    result.pool_size = votes.pool_size;
    for (const auto& [id, count] : votes.counts)
        if (count >= threshold.t) result.flagged.insert(id);
    return result;
}

void write_detection_csv(const DetectionResult& result, const VoteMatrix& votes,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "id,vote_count,flagged,threshold_t,pool_size\n";
    for (const auto& [id, count] : votes.counts)
        out << id << "," << count << "," << (result.flagged.count(id) ? 1 : 0) << ","
            << result.threshold.t << "," << votes.pool_size << "\n";
}

CleanResult clean_consensus(const Dataset& data, const Pool& pool, int folds,
                            std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    const std::size_t n_pos = data.positive_count();
    const std::size_t n_neg = data.negative_count();
    if (n_pos < static_cast<std::size_t>(folds) || n_neg < static_cast<std::size_t>(folds))
        throw std::invalid_argument("each class needs at least one instance per fold");

    // Stratified fold assignment: shuffle each class, deal round-robin.
    Rng rng(mix_seed(seed, 0x636c65616eULL));  // "clean"
    std::vector<std::vector<std::int64_t>> fold_ids(static_cast<std::size_t>(folds));
    for (const std::string* label :
         {&data.schema().positive_label, &data.schema().negative_label}) {
        std::vector<std::int64_t> class_ids;
        for (const auto& inst : data.instances())
            if (inst.label == *label) class_ids.push_back(inst.id);
        rng.shuffle(class_ids);
        for (std::size_t i = 0; i < class_ids.size(); ++i)
            fold_ids[i % static_cast<std::size_t>(folds)].push_back(class_ids[i]);
    }

    std::vector<std::int64_t> removed;
    for (std::size_t f = 0; f < fold_ids.size(); ++f) {
        std::vector<std::int64_t> train_ids;
        for (std::size_t g = 0; g < fold_ids.size(); ++g)
            if (g != f) train_ids.insert(train_ids.end(), fold_ids[g].begin(), fold_ids[g].end());

        const Dataset train = data.subset(train_ids);
        const Dataset held_out = data.subset(fold_ids[f]);
        const VoteMatrix votes = build_votes(pool, train, held_out, mix_seed(seed, f + 1));
        const DetectionResult consensus = flag(votes, Threshold::consensus(pool.size()));
        removed.insert(removed.end(), consensus.flagged.begin(), consensus.flagged.end());
    }
    std::sort(removed.begin(), removed.end());

    std::vector<std::int64_t> keep;
    for (auto id : data.ids())
        if (!std::binary_search(removed.begin(), removed.end(), id)) keep.push_back(id);

    CleanResult result;
    result.cleaned = data.subset(keep);
    result.removed_ids = std::move(removed);
    return result;
}

}  // namespace noiselab
