#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/density.hpp"
#include "qkdlab/gates.hpp"

namespace qkdlab {

enum class ChannelKind {
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
};

inline constexpr std::array<ChannelKind, 6> kAllChannelKinds = {
    ChannelKind::BitFlip,        ChannelKind::PhaseFlip,       ChannelKind::BitPhaseFlip,
    ChannelKind::Depolarizing,   ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
};

inline std::string_view channel_name(ChannelKind k) {
    switch (k) {
        case ChannelKind::BitFlip: return "bit-flip";
        case ChannelKind::PhaseFlip: return "phase-flip";
        case ChannelKind::BitPhaseFlip: return "bit-phase-flip";
        case ChannelKind::Depolarizing: return "depolarizing";
        case ChannelKind::AmplitudeDamping: return "amplitude-damping";
        case ChannelKind::PhaseDamping: return "phase-damping";
    }
    throw std::logic_error("channel_name: unreachable");
}

inline ChannelKind channel_from_name(std::string_view name) {
    for (ChannelKind k : kAllChannelKinds)
        if (channel_name(k) == name) return k;
    throw std::invalid_argument("unknown channel kind: " + std::string(name));
}

/// One single-qubit noise process at a fixed strength, in operator-sum form.
struct KrausChannel {
    ChannelKind kind;
    double strength;
    std::vector<CMat> operators;
};

/// Standard Kraus operators:
///   bit flip        {sqrt(1-p) I, sqrt(p) X}
///   phase flip      {sqrt(1-p) I, sqrt(p) Z}
///   bit-phase flip  {sqrt(1-p) I, sqrt(p) Y}
///   depolarizing    {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}
///   amplitude damp  {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}
///   phase damp      {[[1,0],[0,sqrt(1-l)]], [[0,0],[0,sqrt(l)]]}
inline KrausChannel build_channel(ChannelKind kind, double strength) {
    if (!(strength >= 0.0 && strength <= 1.0))
        throw std::invalid_argument("build_channel: strength must lie in [0, 1]");
    const double p = strength;
    std::vector<CMat> ops;
    switch (kind) {
        case ChannelKind::BitFlip:
            ops.push_back(make_gate(Gate::I).scaled(std::sqrt(1.0 - p)));
            ops.push_back(make_gate(Gate::X).scaled(std::sqrt(p)));
            break;
        case ChannelKind::PhaseFlip:
            ops.push_back(make_gate(Gate::I).scaled(std::sqrt(1.0 - p)));
            ops.push_back(make_gate(Gate::Z).scaled(std::sqrt(p)));
            break;
        case ChannelKind::BitPhaseFlip:
            ops.push_back(make_gate(Gate::I).scaled(std::sqrt(1.0 - p)));
            ops.push_back(make_gate(Gate::Y).scaled(std::sqrt(p)));
            break;
        case ChannelKind::Depolarizing:
            ops.push_back(make_gate(Gate::I).scaled(std::sqrt(1.0 - 3.0 * p / 4.0)));
            ops.push_back(make_gate(Gate::X).scaled(std::sqrt(p / 4.0)));
            ops.push_back(make_gate(Gate::Y).scaled(std::sqrt(p / 4.0)));
            ops.push_back(make_gate(Gate::Z).scaled(std::sqrt(p / 4.0)));
            break;
        case ChannelKind::AmplitudeDamping: {
            CMat k0(2);
            k0.at(0, 0) = 1.0;
            k0.at(1, 1) = std::sqrt(1.0 - p);
            CMat k1(2);
            k1.at(0, 1) = std::sqrt(p);
            ops.push_back(std::move(k0));
            ops.push_back(std::move(k1));
            break;
        }
        case ChannelKind::PhaseDamping: {
            CMat k0(2);
            k0.at(0, 0) = 1.0;
            k0.at(1, 1) = std::sqrt(1.0 - p);
            CMat k1(2);
            k1.at(1, 1) = std::sqrt(p);
            ops.push_back(std::move(k0));
            ops.push_back(std::move(k1));
            break;
        }
    }
    return KrausChannel{kind, strength, std::move(ops)};
}

inline KrausChannel build_channel(std::string_view name, double strength) {
    return build_channel(channel_from_name(name), strength);
}

/// Max-norm deviation of sum_k K^dagger K from the identity.
inline double completeness_deviation(const KrausChannel& ch) {
    if (ch.operators.empty()) throw std::invalid_argument("completeness: empty channel");
    CMat acc(ch.operators.front().dim());
    for (const CMat& k : ch.operators) acc += k.adjoint() * k;
    return max_abs_diff(acc, CMat::identity(acc.dim()));
}

/// rho' = sum_k K rho K^dagger on the chosen qubit.
inline DensityMatrix apply_channel(const DensityMatrix& state, const KrausChannel& ch,
                                   int target = 0) {
    if (target < 0 || target >= state.qubits())
        throw std::out_of_range("apply_channel: target out of range");
    CMat acc(state.dim());
    for (const CMat& k : ch.operators) {
        const CMat full = embed_operator(k, {target}, state.qubits());
        acc += full * state.matrix() * full.adjoint();
    }
    return DensityMatrix(std::move(acc));
}

}  // namespace qkdlab
