#pragma once

#include <cstdint>
#include <stdexcept>

#include "qkdlab/channels.hpp"
#include "qkdlab/density.hpp"
#include "qkdlab/gates.hpp"
#include "qkdlab/shots.hpp"
#include "qkdlab/transcript.hpp"

namespace qkdlab {

/// Two conclusive-outcome conventions. Standard: a rectilinear outcome 1
/// excludes |0>, so bit 1; a diagonal outcome |-> excludes |+>, so bit 0.
/// PaperFaithful keeps the inverse mapping (outcome |0> -> bit 0, outcome
/// |-> -> bit 1) even though it decodes against the conclusive-exclusion
/// logic; both are preserved rather than silently corrected.
enum class B92Mode { Standard, PaperFaithful };

/// Two-state protocol: 0 -> |0>, 1 -> |+>. The receiver measures in a
/// uniformly random basis; inconclusive positions are discarded from the
/// sifted key. bob_bits keeps the decoded bit at conclusive positions and
/// the raw outcome elsewhere.
inline ProtocolTranscript b92_run(int n, const KrausChannel* channel, int shots,
                                  std::uint64_t seed, B92Mode mode = B92Mode::Standard,
                                  ProbMode prob_mode = ProbMode::Sampled) {
    if (n < 1) throw std::invalid_argument("b92_run: n must be >= 1");
    if (shots < 1) throw std::invalid_argument("b92_run: shots must be >= 1");

    Rng rng(seed);
    ProtocolTranscript t;
    t.seed = seed;
    t.bob_bases = BasisString{};

    const CMat h = make_gate(Gate::H);

    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();

        DensityMatrix state = DensityMatrix::basis_state(1, 0);
        if (bit == 1) state = apply_gate(state, h, {0});

        if (channel) state = apply_channel(state, *channel, 0);

        const Basis bbasis = rng.bit() ? Basis::Diagonal : Basis::Rectilinear;
        if (bbasis == Basis::Diagonal) state = apply_gate(state, h, {0});

        const auto dist = measure_distribution(state);
        const int outcome = decide_bit(dist, prob_mode, shots, rng);

        bool conclusive = false;
        int decoded = outcome;
        if (mode == B92Mode::Standard) {
            if (bbasis == Basis::Rectilinear && outcome == 1) {
                conclusive = true;
                decoded = 1;
            } else if (bbasis == Basis::Diagonal && outcome == 1) {
                conclusive = true;  // outcome |->
                decoded = 0;
            }
        } else {
            if (bbasis == Basis::Rectilinear && outcome == 0) {
                conclusive = true;
                decoded = 0;
            } else if (bbasis == Basis::Diagonal && outcome == 1) {
                conclusive = true;  // outcome |->
                decoded = 1;
            }
        }

        t.alice_bits.push_back(bit);
        t.bob_bases->push_back(bbasis);
        t.bob_bits.push_back(conclusive ? decoded : outcome);
        t.scores.push_back(dist.probabilities[1]);
        t.conclusive_mask.push_back(conclusive ? 1 : 0);
        if (conclusive) t.sifted_key.push_back(decoded);
    }
    return t;
}

/// Squared overlap tr(rho0 rho1) of the two encoding states.
inline double b92_state_overlap() {
    const DensityMatrix psi0 = DensityMatrix::basis_state(1, 0);
    DensityMatrix psi1 = DensityMatrix::basis_state(1, 0);
    psi1 = apply_gate(psi1, make_gate(Gate::H), {0});
    return (psi0.matrix() * psi1.matrix()).trace().real();
}

}  // namespace qkdlab
