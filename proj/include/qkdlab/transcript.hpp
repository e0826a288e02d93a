#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkdlab/rng.hpp"

namespace qkdlab {

using BitString = std::vector<int>;

enum class Basis : std::uint8_t { Rectilinear = 0, Diagonal = 1 };

using BasisString = std::vector<Basis>;

/// Per-position record of one protocol run. Basis strings are absent for
/// protocols that do not use basis choices on that side.
struct ProtocolTranscript {
    BitString alice_bits;                    // sender key bits
    std::optional<BasisString> alice_bases;  // absent where encoding has no basis choice
    std::optional<BasisString> bob_bases;
    BitString bob_bits;                      // receiver bits, every position
    std::vector<std::uint8_t> conclusive_mask;
    BitString sifted_key;                    // receiver bits at conclusive positions
    std::vector<double> scores;              // exact P(outcome 1) before sampling
    std::uint64_t seed = 0;

    std::size_t size() const { return alice_bits.size(); }
};

inline void validate_transcript(const ProtocolTranscript& t) {
    const std::size_t n = t.alice_bits.size();
    if (n == 0) throw std::logic_error("transcript: empty");
    if (t.bob_bits.size() != n || t.conclusive_mask.size() != n || t.scores.size() != n)
        throw std::logic_error("transcript: per-position lengths differ");
    if (t.alice_bases && t.alice_bases->size() != n)
        throw std::logic_error("transcript: alice_bases length differs");
    if (t.bob_bases && t.bob_bases->size() != n)
        throw std::logic_error("transcript: bob_bases length differs");
    std::size_t conclusive = 0;
    for (std::uint8_t m : t.conclusive_mask) conclusive += m ? 1 : 0;
    if (t.sifted_key.size() != conclusive)
        throw std::logic_error("transcript: sifted key length mismatch");
}

/// Sender bits at the conclusive positions, aligned with sifted_key.
inline BitString alice_sifted_bits(const ProtocolTranscript& t) {
    BitString out;
    for (std::size_t i = 0; i < t.alice_bits.size(); ++i)
        if (t.conclusive_mask[i]) out.push_back(t.alice_bits[i]);
    return out;
}

struct QberReport {
    double qber = 0.0;
    std::int64_t checked_bits = 0;
    bool aborted = false;
    double threshold = 0.11;
};

/// Compares a random subset of the sifted key against the sender bits and
/// aborts when the error rate exceeds the threshold.
inline QberReport estimate_qber(const ProtocolTranscript& t, double sample_fraction,
                                double threshold, std::uint64_t seed) {
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
        throw std::invalid_argument("estimate_qber: sample_fraction must lie in (0, 1]");
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < t.alice_bits.size(); ++i)
        if (t.conclusive_mask[i]) positions.push_back(i);
    if (positions.empty()) throw std::invalid_argument("estimate_qber: empty sifted key");

    const std::size_t m = positions.size();
    std::size_t k = static_cast<std::size_t>(sample_fraction * static_cast<double>(m) + 0.5);
    if (k < 1) k = 1;
    if (k > m) k = m;

    // Partial Fisher-Yates over the sifted slots.
    std::vector<std::size_t> slots(m);
    for (std::size_t i = 0; i < m; ++i) slots[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(m - i));
        std::swap(slots[i], slots[j < m ? j : m - 1]);
    }

    std::int64_t mismatches = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t slot = slots[i];
        if (t.alice_bits[positions[slot]] != t.sifted_key[slot]) ++mismatches;
    }

    QberReport rep;
    rep.checked_bits = static_cast<std::int64_t>(k);
    rep.qber = static_cast<double>(mismatches) / static_cast<double>(k);
    rep.threshold = threshold;
    rep.aborted = rep.qber > threshold;
    return rep;
}

}  // namespace qkdlab
