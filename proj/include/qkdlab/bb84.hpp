#pragma once

#include <cstdint>
#include <stdexcept>

#include "qkdlab/channels.hpp"
#include "qkdlab/density.hpp"
#include "qkdlab/gates.hpp"
#include "qkdlab/shots.hpp"
#include "qkdlab/transcript.hpp"

namespace qkdlab {

/// Four-state protocol. Encoding: rectilinear 0 -> |0>, 1 -> |1>; diagonal
/// 0 -> |+>, 1 -> |->. The receiver measures in a uniformly random basis and
/// keeps positions where the bases match. The optional attacker intercepts,
/// measures in a random basis with a single shot, and resends her outcome.
/// The noise channel acts once per qubit, between encoding and decoding.
inline ProtocolTranscript bb84_run(int n, const KrausChannel* channel, bool eve, int shots,
                                   std::uint64_t seed, ProbMode mode = ProbMode::Sampled) {
    if (n < 1) throw std::invalid_argument("bb84_run: n must be >= 1");
    if (shots < 1) throw std::invalid_argument("bb84_run: shots must be >= 1");

    Rng rng(seed);
    ProtocolTranscript t;
    t.seed = seed;
    t.alice_bases = BasisString{};
    t.bob_bases = BasisString{};

    const CMat h = make_gate(Gate::H);
    const CMat x = make_gate(Gate::X);

    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();
        const Basis abasis = rng.bit() ? Basis::Diagonal : Basis::Rectilinear;

        DensityMatrix state = DensityMatrix::basis_state(1, 0);
        if (bit == 1) state = apply_gate(state, x, {0});
        if (abasis == Basis::Diagonal) state = apply_gate(state, h, {0});

        if (eve) {
            const Basis ebasis = rng.bit() ? Basis::Diagonal : Basis::Rectilinear;
            if (ebasis == Basis::Diagonal) state = apply_gate(state, h, {0});
            const auto rec = sample_shots(measure_distribution(state), 1, rng.child_seed());
            const int outcome = rec.counts[1] == 1 ? 1 : 0;
            state = DensityMatrix::basis_state(1, outcome);
            if (ebasis == Basis::Diagonal) state = apply_gate(state, h, {0});
        }

        if (channel) state = apply_channel(state, *channel, 0);

        const Basis bbasis = rng.bit() ? Basis::Diagonal : Basis::Rectilinear;
        if (bbasis == Basis::Diagonal) state = apply_gate(state, h, {0});

        const auto dist = measure_distribution(state);
        const int bob_bit = decide_bit(dist, mode, shots, rng);
        const bool conclusive = abasis == bbasis;

        t.alice_bits.push_back(bit);
        t.alice_bases->push_back(abasis);
        t.bob_bases->push_back(bbasis);
        t.bob_bits.push_back(bob_bit);
        t.scores.push_back(dist.probabilities[1]);
        t.conclusive_mask.push_back(conclusive ? 1 : 0);
        if (conclusive) t.sifted_key.push_back(bob_bit);
    }
    return t;
}

}  // namespace qkdlab
