#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkdlab/channels.hpp"
#include "qkdlab/density.hpp"
#include "qkdlab/gates.hpp"
#include "qkdlab/pqc.hpp"
#include "qkdlab/shots.hpp"
#include "qkdlab/transcript.hpp"

namespace qkdlab {

/// Reward for one decoding attempt: max(P0, P1), always in [0.5, 1].
inline double reward(double p0, double p1) {
    if (std::abs(p0 + p1 - 1.0) > 1e-9)
        throw std::invalid_argument("reward: probabilities must sum to 1");
    return p0 > p1 ? p0 : p1;
}

enum class QrlVersion { V1, V2 };

inline std::string_view qrl_version_name(QrlVersion v) { return v == QrlVersion::V1 ? "v1" : "v2"; }

struct QrlConfig {
    int max_episodes = 1000;  // v2 conventionally runs with 100
    double epsilon = 0.01;    // stop once n3 - n1 < epsilon
    double target = 1.2;      // reference angle gap recorded in the episode log
    int shots = 1024;
    ProbMode reward_mode = ProbMode::Exact;     // reward evaluation during learning
    ProbMode decision_mode = ProbMode::Sampled; // final bit decision
    const KrausChannel* channel = nullptr;
    const PqcParams* pqc = nullptr;  // appended to every circuit when set
};

inline int default_qrl_episodes(QrlVersion v) { return v == QrlVersion::V1 ? 1000 : 100; }

struct EpisodeRecord {
    int episode = 0;  // 1-based; two candidates per episode share the index
    double n1 = 0.0, n2 = 0.0, n3 = 0.0;  // interval before this episode's update
    double theta2 = 0.0;                  // candidate decoding angle
    double delta_theta = 0.0;             // theta1 - theta2
    double p0 = 0.0, p1 = 0.0;
    double reward = 0.0;
    double target_gap = 0.0;              // |delta_theta - target|
};

struct EpisodeLog {
    std::vector<EpisodeRecord> records;
    std::optional<int> convergence_iteration;
};

/// Candidate angle -> last observed reward.
struct QTable {
    std::map<double, double> entries;
};

inline double qtable_argmax(const QTable& q, double fallback) {
    double best_angle = fallback;
    double best_reward = -1.0;
    for (const auto& [angle, r] : q.entries) {
        if (r > best_reward) {
            best_reward = r;
            best_angle = angle;
        }
    }
    return best_angle;
}

/// State after prep |bit>, H, P(theta1), channel, P(-theta2), H — everything
/// up to the optional trainable circuit.
inline DensityMatrix qrl_circuit_state(int bit, double theta1, double theta2,
                                       const KrausChannel* channel) {
    DensityMatrix s = DensityMatrix::basis_state(1, bit);
    s = apply_gate(s, make_gate(Gate::H), {0});
    s = apply_gate(s, make_gate(Gate::P, theta1), {0});
    if (channel) s = apply_channel(s, *channel, 0);
    s = apply_gate(s, make_gate(Gate::P, -theta2), {0});
    s = apply_gate(s, make_gate(Gate::H), {0});
    return s;
}

inline MeasurementDistribution qrl_circuit_distribution(int bit, double theta1, double theta2,
                                                        const KrausChannel* channel,
                                                        const PqcParams* pqc) {
    DensityMatrix s = qrl_circuit_state(bit, theta1, theta2, channel);
    if (pqc) s = apply_pqc(s, *pqc);
    return measure_distribution(s);
}

struct QrlRunResult {
    double theta1 = 0.0;
    double theta2_final = 0.0;
    int decoded_bit = 0;
    int true_bit = 0;
    EpisodeLog log;
    QTable qtable;
};

namespace detail {

inline std::pair<double, double> qrl_probs(int bit, double theta1, double theta2,
                                           const QrlConfig& cfg, Rng& rng) {
    const auto dist = qrl_circuit_distribution(bit, theta1, theta2, cfg.channel, cfg.pqc);
    if (cfg.reward_mode == ProbMode::Exact)
        return {dist.probabilities[0], dist.probabilities[1]};
    const auto rec = sample_shots(dist, cfg.shots, rng.child_seed());
    const double f1 = static_cast<double>(rec.counts[1]) / static_cast<double>(rec.shots);
    return {1.0 - f1, f1};
}

inline QrlRunResult qrl_learn(QrlVersion version, int bit, double theta1, const QrlConfig& cfg,
                              std::uint64_t seed) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("qrl_learn: bit must be 0 or 1");
    if (!(theta1 >= 0.0 && theta1 <= kPi))
        throw std::invalid_argument("qrl_learn: theta1 must lie in [0, pi]");
    if (cfg.max_episodes < 1) throw std::invalid_argument("qrl_learn: max_episodes must be >= 1");

    Rng rng(seed);
    double n1 = 0.0;
    double n3 = kPi;
    double n2 = version == QrlVersion::V1 ? 0.5 * (n1 + n3) : rng.uniform(0.0, kPi);

    QrlRunResult res;
    res.theta1 = theta1;
    res.true_bit = bit;

    auto try_candidate = [&](int episode, double m) {
        const auto [p0, p1] = qrl_probs(bit, theta1, m, cfg, rng);
        const double r = reward(p0, p1);
        res.qtable.entries[m] = r;
        EpisodeRecord rec;
        rec.episode = episode;
        rec.n1 = n1;
        rec.n2 = n2;
        rec.n3 = n3;
        rec.theta2 = m;
        rec.delta_theta = theta1 - m;
        rec.p0 = p0;
        rec.p1 = p1;
        rec.reward = r;
        rec.target_gap = std::abs(rec.delta_theta - cfg.target);
        res.log.records.push_back(rec);
        return r;
    };

    for (int ep = 1; ep <= cfg.max_episodes; ++ep) {
        double m1;
        double m2;
        if (version == QrlVersion::V1) {
            m1 = 0.5 * (n1 + n2);
            m2 = 0.5 * (n2 + n3);
        } else {
            m1 = rng.uniform(n1, n2);
            m2 = rng.uniform(n2, n3);
        }
        const double r1 = try_candidate(ep, m1);
        const double r2 = try_candidate(ep, m2);
        if (version == QrlVersion::V1) {
            // Keep the half whose midpoint scored better; ties keep the lower half.
            if (r1 >= r2) n3 = n2; else n1 = n2;
            n2 = 0.5 * (n1 + n3);
        } else {
            // The reward is periodic with a second ridge half a period away,
            // so a win at probe midpoint c only rules out the region within
            // pi/2 beyond c. Trim an end only when that end lies inside the
            // ruled-out span; otherwise keep the bounds and resample.
            const double c = 0.5 * (m1 + m2);
            if (r1 >= r2) {
                if (n3 - c <= kPi / 2.0) {
                    n3 = c;
                    n2 = m1;
                }
            } else if (c - n1 <= kPi / 2.0) {
                n1 = c;
                n2 = m2;
            }
        }
        if (n3 - n1 < cfg.epsilon) {
            res.log.convergence_iteration = ep;
            break;
        }
    }

    res.theta2_final = qtable_argmax(res.qtable, n2);
    const auto dist =
        qrl_circuit_distribution(bit, theta1, res.theta2_final, cfg.channel, cfg.pqc);
    res.decoded_bit = decide_bit(dist, cfg.decision_mode, cfg.shots, rng);
    return res;
}

}  // namespace detail

/// Bisection search: per episode the two half-interval midpoints are scored
/// with the full circuit and the better half is kept, so the interval width
/// halves every episode.
inline QrlRunResult qrl_v1_learn(int bit, double theta1, const QrlConfig& cfg,
                                 std::uint64_t seed) {
    return detail::qrl_learn(QrlVersion::V1, bit, theta1, cfg, seed);
}

/// Randomized narrowing: candidates are drawn uniformly inside the two
/// sub-intervals and the bounds close in on the higher-reward region.
inline QrlRunResult qrl_v2_learn(int bit, double theta1, const QrlConfig& cfg,
                                 std::uint64_t seed) {
    return detail::qrl_learn(QrlVersion::V2, bit, theta1, cfg, seed);
}

inline QrlRunResult qrl_learn(QrlVersion version, int bit, double theta1, const QrlConfig& cfg,
                              std::uint64_t seed) {
    return detail::qrl_learn(version, bit, theta1, cfg, seed);
}

/// Runs one learner per key bit with fresh random (bit, theta1). Positions
/// whose learner converged form the sifted key.
inline ProtocolTranscript qrl_keygen(QrlVersion version, int n, const QrlConfig& cfg,
                                     std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("qrl_keygen: n must be >= 1");
    Rng rng(seed);
    ProtocolTranscript t;
    t.seed = seed;
    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();
        const double theta1 = rng.uniform(0.0, kPi);
        const QrlRunResult r = detail::qrl_learn(version, bit, theta1, cfg, rng.child_seed());
        const auto dist =
            qrl_circuit_distribution(bit, theta1, r.theta2_final, cfg.channel, cfg.pqc);
        const bool conclusive = r.log.convergence_iteration.has_value();
        t.alice_bits.push_back(bit);
        t.bob_bits.push_back(r.decoded_bit);
        t.scores.push_back(dist.probabilities[1]);
        t.conclusive_mask.push_back(conclusive ? 1 : 0);
        if (conclusive) t.sifted_key.push_back(r.decoded_bit);
    }
    return t;
}

}  // namespace qkdlab
