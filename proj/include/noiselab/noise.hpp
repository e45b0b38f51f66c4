#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "noiselab/dataset.hpp"

namespace noiselab {

enum class NoiseVariant { Ncar, Nar };

// NAR is parameterized by M = (minority flips)/(majority flips), kept as an
// exact integer ratio. NCAR is NAR with M = 1.
struct NoiseModel {
    NoiseVariant variant = NoiseVariant::Ncar;
    int m_numerator = 1;
    int m_denominator = 1;

    static NoiseModel ncar() { return {}; }
    static NoiseModel nar(int numerator, int denominator);
    static NoiseModel parse(const std::string& text);  // "NCAR", "NAR(9:1)"

    double m() const { return static_cast<double>(m_numerator) / m_denominator; }
    std::string str() const;
    bool operator==(const NoiseModel&) const = default;
};

struct NoisePlan {
    double p = 0.0;
    NoiseModel model;
    std::size_t test_size = 0;       // d_n
    std::size_t minority_flips = 0;  // n1
    std::size_t majority_flips = 0;  // n2

    std::size_t total_flips() const { return minority_flips + majority_flips; }
};

struct FlipRecord {
    std::int64_t id = 0;
    std::string original_label;
    std::string observed_label;
};

// Ground truth of which instances were flipped, for exact scoring.
struct InjectionLedger {
    std::vector<FlipRecord> flips;  // sorted by id
    std::size_t minority_flips = 0;
    std::size_t majority_flips = 0;
    std::uint64_t seed = 0;

    std::vector<std::int64_t> flipped_ids() const;
    bool is_flipped(std::int64_t id) const;
    const FlipRecord& by_id(std::int64_t id) const;
    void write_csv(const Dataset& noisy, const std::string& path) const;
};

struct InfeasiblePlan : std::runtime_error {
    InfeasiblePlan(const std::string& what, double max_feasible_p)
        : std::runtime_error(what), max_feasible_p(max_feasible_p) {}
    double max_feasible_p;
};

NoisePlan plan_noise(const Dataset& test, double p, const NoiseModel& model);

std::pair<Dataset, InjectionLedger> inject(const Dataset& test, const NoisePlan& plan,
                                           std::uint64_t seed);

}  // namespace noiselab
