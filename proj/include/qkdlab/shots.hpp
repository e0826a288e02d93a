#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qkdlab/rng.hpp"

namespace qkdlab {

/// Exact probabilities from the density matrix versus frequencies estimated
/// from a finite number of measurement shots.
enum class ProbMode { Exact, Sampled };

/// Outcome probabilities over the computational basis.
struct MeasurementDistribution {
    std::vector<double> probabilities;

    int outcomes() const { return static_cast<int>(probabilities.size()); }
};

inline double distribution_sum(const MeasurementDistribution& d) {
    double s = 0.0;
    for (double p : d.probabilities) s += p;
    return s;
}

struct ShotRecord {
    std::int64_t shots = 0;
    std::vector<std::int64_t> counts;  // indexed by outcome
    std::uint64_t seed = 0;
};

/// Draws `shots` outcomes by inverse CDF. Deterministic for a fixed seed.
inline ShotRecord sample_shots(const MeasurementDistribution& dist, std::int64_t shots,
                               std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample_shots: shots must be >= 1");
    if (dist.probabilities.empty())
        throw std::invalid_argument("sample_shots: empty distribution");
    Rng rng(seed);
    ShotRecord rec;
    rec.shots = shots;
    rec.seed = seed;
    rec.counts.assign(dist.probabilities.size(), 0);
    const std::size_t last = dist.probabilities.size() - 1;
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t pick = last;
        for (std::size_t i = 0; i < last; ++i) {
            acc += dist.probabilities[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        ++rec.counts[pick];
    }
    return rec;
}

/// Index of the most likely outcome; ties resolve to the lowest index.
inline int argmax_outcome(const MeasurementDistribution& d) {
    if (d.probabilities.empty()) throw std::invalid_argument("argmax_outcome: empty distribution");
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.probabilities.size(); ++i)
        if (d.probabilities[i] > d.probabilities[best]) best = i;
    return static_cast<int>(best);
}

/// Majority bit over a two-outcome record; ties resolve to 0.
inline int majority_bit(const ShotRecord& rec) {
    if (rec.counts.size() != 2) throw std::invalid_argument("majority_bit: need two outcomes");
    return rec.counts[1] * 2 > rec.shots ? 1 : 0;
}

/// Bit decision for a single-qubit measurement: argmax of the exact
/// distribution, or majority vote over sampled shots.
inline int decide_bit(const MeasurementDistribution& dist, ProbMode mode, int shots, Rng& rng) {
    if (dist.outcomes() != 2) throw std::invalid_argument("decide_bit: need two outcomes");
    if (mode == ProbMode::Exact) return argmax_outcome(dist);
    return majority_bit(sample_shots(dist, shots, rng.child_seed()));
}

}  // namespace qkdlab
