#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>

#include "helpers.hpp"
#include "noiselab/evaluation.hpp"
#include "noiselab/rng.hpp"

using namespace noiselab;
using noiselab::testing::counts_dataset;

namespace {

DetectionResult flagged_set(std::set<std::int64_t> ids) {
    DetectionResult result;
    result.flagged = std::move(ids);
    result.pool_size = 10;
    result.threshold = Threshold::exact(6);
    return result;
}

InjectionLedger ledger_of(const Dataset& data, const std::vector<std::int64_t>& ids) {
    InjectionLedger ledger;
    for (auto id : ids) {
        const auto& inst = data.by_id(id);
        ledger.flips.push_back({id, inst.label, inst.label == "pos" ? "neg" : "pos"});
    }
    std::sort(ledger.flips.begin(), ledger.flips.end(),
              [](const FlipRecord& a, const FlipRecord& b) { return a.id < b.id; });
    return ledger;
}

}  // namespace

TEST_CASE("score does set arithmetic over flagged and flipped ids") {
    const Dataset data = counts_dataset(5, 5);
    // flagged {0,1,2}, flipped {0,1,3}
    const ConfusionCounts c = score(flagged_set({0, 1, 2}), ledger_of(data, {0, 1, 3}), data);
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
}

TEST_CASE("score of empty sets is all zeros") {
    const Dataset data = counts_dataset(3, 3);
    const ConfusionCounts c = score(flagged_set({}), ledger_of(data, {}), data);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
}

TEST_CASE("perfect detection has no false positives or negatives") {
    const Dataset data = counts_dataset(4, 4);
    const ConfusionCounts c = score(flagged_set({1, 5}), ledger_of(data, {1, 5}), data);
    CHECK(c.tp == 2);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
}

TEST_CASE("score cross-checks against a per-instance brute-force loop") {
    const Dataset data = counts_dataset(20, 20);
    Rng rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        std::set<std::int64_t> flagged;
        std::vector<std::int64_t> flipped;
        for (const auto& inst : data.instances()) {
            if (rng.next_below(3) == 0) flagged.insert(inst.id);
            if (rng.next_below(4) == 0) flipped.push_back(inst.id);
        }
        const ConfusionCounts c = score(flagged_set(flagged), ledger_of(data, flipped), data);

        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& inst : data.instances()) {
            const bool is_flagged = flagged.count(inst.id) > 0;
            const bool is_flipped =
                std::find(flipped.begin(), flipped.end(), inst.id) != flipped.end();
            if (is_flagged && is_flipped) ++tp;
            if (is_flagged && !is_flipped) ++fp;
            if (!is_flagged && is_flipped) ++fn;
        }
        CHECK(c.tp == tp);
        CHECK(c.fp == fp);
        CHECK(c.fn == fn);
        CHECK(c.tp + c.fn == flipped.size());
        CHECK(c.tp_minority + c.tp_majority == c.tp);
        CHECK(c.fn_minority + c.fn_majority == c.fn);
    }
}

TEST_CASE("score rejects mismatched id sets") {
    const Dataset data = counts_dataset(3, 3);
    CHECK_THROWS(score(flagged_set({99}), ledger_of(data, {}), data));
}

TEST_CASE("precision and recall definitions and degenerate conventions") {
    ConfusionCounts c;
    c.tp = 2, c.fp = 1, c.fn = 1;
    auto [p1, r1] = precision_recall(c);
    CHECK(p1 == doctest::Approx(2.0 / 3.0));
    CHECK(r1 == doctest::Approx(2.0 / 3.0));

    c = {};
    c.fn = 5;  // nothing flagged
    auto [p2, r2] = precision_recall(c);
    CHECK(p2 == 1.0);
    CHECK(r2 == 0.0);

    c = {};  // no noise, nothing flagged
    auto [p3, r3] = precision_recall(c);
    CHECK(p3 == 1.0);
    CHECK(r3 == 1.0);
}

TEST_CASE("f-score identities") {
    CHECK(f_score(1.0, 1.0) == 1.0);
    CHECK(f_score(0.3, 0.3) == doctest::Approx(0.3));
    CHECK(f_score(0.75, 0.5) == doctest::Approx(0.6));
    CHECK(f_score(0.0, 0.0) == 0.0);
    CHECK(f_score(0.0, 1.0) == 0.0);
}

TEST_CASE("f-score symmetry and bounds at beta=1") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double p = rng.next_double();
        const double r = rng.next_double();
        const double f = f_score(p, r);
        CHECK(f == doctest::Approx(f_score(r, p)));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        if (p > 0.0 && r > 0.0) {
            CHECK(f <= std::max(p, r) + 1e-12);
            CHECK(f >= std::min(p, r) - 1e-12);
        }
    }
}

TEST_CASE("f-beta weights recall when beta grows") {
    // High recall, low precision: beta=2 rewards it more than beta=0.5.
    CHECK(f_score(0.2, 0.9, 2.0) > f_score(0.2, 0.9, 0.5));
    CHECK_THROWS(f_score(1.5, 0.5));
    CHECK_THROWS(f_score(0.5, 0.5, -1.0));
}

TEST_CASE("aggregate computes mean and sample standard deviation") {
    ConfigKey key;
    key.dataset = "d";

    const EvalReport two = aggregate(key, {{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}});
    CHECK(two.fscore_mean == doctest::Approx(0.6));
    CHECK(two.fscore_sd ==
          doctest::Approx(std::sqrt((0.01 + 0.01) / 1.0)));  // n-1 denominator

    const EvalReport one = aggregate(key, {{0.42, 0.42, 0.42}});
    CHECK(one.fscore_mean == doctest::Approx(0.42));
    CHECK(one.fscore_sd == 0.0);

    std::vector<RepetitionScores> same(100, {0.3, 0.3, 0.3});
    CHECK(aggregate(key, same).fscore_sd == 0.0);

    CHECK_THROWS(aggregate(key, {}));
}

TEST_CASE("aggregate mean is invariant to repetition order") {
    ConfigKey key;
    std::vector<RepetitionScores> scores = {
        {0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, {0.7, 0.8, 0.9}};
    const EvalReport forward = aggregate(key, scores);
    std::reverse(scores.begin(), scores.end());
    const EvalReport backward = aggregate(key, scores);
    CHECK(forward.fscore_mean == backward.fscore_mean);
    CHECK(forward.precision_mean == backward.precision_mean);
}

TEST_CASE("report csv round-trips aggregates") {
    ConfigKey key;
    key.dataset = "synthetic";
    key.ir = ImbalanceRatio::parse("20:80");
    key.model = NoiseModel::nar(9, 1);
    key.p = 0.15;
    key.threshold_t = 6;
    key.pool_size = 10;
    const EvalReport report = aggregate(key, {{0.5, 0.6, 0.54}, {0.7, 0.8, 0.74}});

    const std::string path = "test_eval_report_tmp.csv";
    write_report_csv({report}, path);
    const auto loaded = read_report_csv(path);
    std::remove(path.c_str());

    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].key == key);
    CHECK(loaded[0].repetition_count == 2);
    CHECK(loaded[0].fscore_mean == doctest::Approx(report.fscore_mean));
    CHECK(loaded[0].precision_sd == doctest::Approx(report.precision_sd));
}
