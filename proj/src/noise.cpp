#include "noiselab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "noiselab/rng.hpp"

namespace noiselab {

NoiseModel NoiseModel::nar(int numerator, int denominator) {
    if (numerator <= 0 || denominator <= 0)
        throw std::invalid_argument("NAR ratio components must be positive");
    NoiseModel model;
    model.variant = NoiseVariant::Nar;
    model.m_numerator = numerator;
    model.m_denominator = denominator;
    return model;
}

NoiseModel NoiseModel::parse(const std::string& text) {
    if (text == "NCAR" || text == "ncar") return ncar();
    // Accept "NAR(9:1)" and "9:1".
    std::string body = text;
    if (body.rfind("NAR(", 0) == 0 || body.rfind("nar(", 0) == 0) {
        if (body.back() != ')') throw std::invalid_argument("malformed noise model '" + text + "'");
        body = body.substr(4, body.size() - 5);
    }
    auto pos = body.find(':');
    if (pos == std::string::npos)
        throw std::invalid_argument("malformed noise model '" + text + "'");
    return nar(std::stoi(body.substr(0, pos)), std::stoi(body.substr(pos + 1)));
}

std::string NoiseModel::str() const {
    if (variant == NoiseVariant::Ncar) return "NCAR";
    return "NAR(" + std::to_string(m_numerator) + ":" + std::to_string(m_denominator) + ")";
}

std::vector<std::int64_t> InjectionLedger::flipped_ids() const {
    std::vector<std::int64_t> out;
    out.reserve(flips.size());
    for (const auto& f : flips) out.push_back(f.id);
    return out;
}

bool InjectionLedger::is_flipped(std::int64_t id) const {
    auto it = std::lower_bound(flips.begin(), flips.end(), id,
                               [](const FlipRecord& f, std::int64_t v) { return f.id < v; });
    return it != flips.end() && it->id == id;
}

void InjectionLedger::write_csv(const Dataset& noisy, const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "id,original_label,observed_label,flipped\n";
    for (const auto& inst : noisy.instances()) {
        const bool flipped = is_flipped(inst.id);
        out << inst.id << "," << (flipped ? by_id(inst.id).original_label : inst.label) << ","
            << inst.label << "," << (flipped ? 1 : 0) << "\n";
    }
}

const FlipRecord& InjectionLedger::by_id(std::int64_t id) const {
    auto it = std::lower_bound(flips.begin(), flips.end(), id,
                               [](const FlipRecord& f, std::int64_t v) { return f.id < v; });
    if (it == flips.end() || it->id != id) throw std::out_of_range("id not in ledger");
    return *it;
}

namespace {

// floor(a/b + 1/2) on non-negative integers (round half-up).
std::size_t round_half_up(std::size_t a, std::size_t b) {
    return (2 * a + b) / (2 * b);
}

std::pair<std::size_t, std::size_t> resolve_counts(std::size_t n_total,
                                                   const NoiseModel& model) {
    const auto num = static_cast<std::size_t>(model.m_numerator);
    const auto den = static_cast<std::size_t>(model.m_denominator);
    const std::size_t n1 = round_half_up(num * n_total, num + den);
    return {n1, n_total - n1};
}

}  // namespace

NoisePlan plan_noise(const Dataset& test, double p, const NoiseModel& model) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise level p must lie in [0,1]");
    const std::size_t d_n = test.size();
    const std::size_t c_min = test.count_label(test.minority_label());
    const std::size_t c_maj = d_n - c_min;

    const auto n_total = static_cast<std::size_t>(
        std::floor(p * static_cast<double>(d_n) + 0.5));
    auto [n1, n2] = resolve_counts(n_total, model);

    if (n1 > c_min || n2 > c_maj) {
        // Report the largest total noise level this test set supports.
        std::size_t best = 0;
        for (std::size_t t = n_total; t-- > 0;) {
            auto [a, b] = resolve_counts(t, model);
            if (a <= c_min && b <= c_maj) {
                best = t;
                break;
            }
        }
        throw InfeasiblePlan("noise plan infeasible: need " + std::to_string(n1) +
                                 " minority and " + std::to_string(n2) +
                                 " majority flips, have " + std::to_string(c_min) + "/" +
                                 std::to_string(c_maj),
                             static_cast<double>(best) / static_cast<double>(d_n));
    }

    NoisePlan plan;
    plan.p = p;
    plan.model = model;
    plan.test_size = d_n;
    plan.minority_flips = n1;
    plan.majority_flips = n2;
    return plan;
}

std::pair<Dataset, InjectionLedger> inject(const Dataset& test, const NoisePlan& plan,
                                           std::uint64_t seed) {
    if (plan.test_size != test.size())
        throw std::invalid_argument("noise plan was made for a different test set size");

    const std::string min_label = test.minority_label();
    const std::string maj_label = test.majority_label();

    Rng rng(mix_seed(seed, 0x696e6a656374ULL));  // "inject"
    auto draw = [&](const std::string& label, std::size_t count) {
        std::vector<std::int64_t> class_ids;
        for (const auto& inst : test.instances())
            if (inst.label == label) class_ids.push_back(inst.id);
        if (count > class_ids.size())
            throw std::invalid_argument("plan infeasible for this test set");
        rng.shuffle(class_ids);
        class_ids.resize(count);
        return class_ids;
    };

    std::vector<std::int64_t> flip_min = draw(min_label, plan.minority_flips);
    std::vector<std::int64_t> flip_maj = draw(maj_label, plan.majority_flips);

    InjectionLedger ledger;
    ledger.seed = seed;
    ledger.minority_flips = plan.minority_flips;
    ledger.majority_flips = plan.majority_flips;

    std::vector<std::pair<std::int64_t, std::string>> overrides;
    auto record = [&](const std::vector<std::int64_t>& ids, const std::string& from,
                      const std::string& to) {
        for (auto id : ids) {
            ledger.flips.push_back({id, from, to});
            overrides.emplace_back(id, to);
        }
    };
    record(flip_min, min_label, maj_label);
    record(flip_maj, maj_label, min_label);
    std::sort(ledger.flips.begin(), ledger.flips.end(),
              [](const FlipRecord& a, const FlipRecord& b) { return a.id < b.id; });

    return {test.with_labels(overrides), std::move(ledger)};
}

}  // namespace noiselab
