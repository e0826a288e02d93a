#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkdlab/b92.hpp"
#include "qkdlab/bb84.hpp"
#include "qkdlab/metrics.hpp"
#include "qkdlab/qrl.hpp"
#include "qkdlab/training.hpp"

namespace qkdlab {

// ---------------------------------------------------------------------------
// Training contexts: the states entering the trainable circuit, paired with
// the bit the receiver should decode.
// ---------------------------------------------------------------------------

inline std::vector<BatchItem> bb84_contexts(int n, const KrausChannel* channel, Rng& rng,
                                            bool matched_only = false) {
    if (n < 1) throw std::invalid_argument("bb84_contexts: n must be >= 1");
    const CMat h = make_gate(Gate::H);
    const CMat x = make_gate(Gate::X);
    std::vector<BatchItem> batch;
    batch.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();
        const int encode = rng.bit();
        const int decode = matched_only ? encode : rng.bit();
        DensityMatrix s = DensityMatrix::basis_state(1, 0);
        if (bit == 1) s = apply_gate(s, x, {0});
        if (encode == 1) s = apply_gate(s, h, {0});
        if (channel) s = apply_channel(s, *channel, 0);
        if (decode == 1) s = apply_gate(s, h, {0});
        batch.push_back(BatchItem{std::move(s), bit});
    }
    return batch;
}

inline std::vector<BatchItem> b92_contexts(int n, const KrausChannel* channel, Rng& rng) {
    if (n < 1) throw std::invalid_argument("b92_contexts: n must be >= 1");
    const CMat h = make_gate(Gate::H);
    std::vector<BatchItem> batch;
    batch.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();
        DensityMatrix s = DensityMatrix::basis_state(1, 0);
        if (bit == 1) s = apply_gate(s, h, {0});
        if (channel) s = apply_channel(s, *channel, 0);
        if (rng.bit() == 1) s = apply_gate(s, h, {0});
        batch.push_back(BatchItem{std::move(s), bit});
    }
    return batch;
}

/// Runs the bare angle learner per bit and captures the state reaching the
/// trainable circuit at the final decoding angle.
inline std::vector<BatchItem> qrl_contexts(QrlVersion version, int n, QrlConfig cfg, Rng& rng) {
    if (n < 1) throw std::invalid_argument("qrl_contexts: n must be >= 1");
    cfg.pqc = nullptr;
    std::vector<BatchItem> batch;
    batch.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int bit = rng.bit();
        const double theta1 = rng.uniform(0.0, kPi);
        const QrlRunResult r = qrl_learn(version, bit, theta1, cfg, rng.child_seed());
        batch.push_back(BatchItem{qrl_circuit_state(bit, theta1, r.theta2_final, cfg.channel), bit});
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Protocol runners
// ---------------------------------------------------------------------------

struct QnnProtocolConfig {
    TrainingConfig training;
    bool train = true;
    std::optional<std::vector<double>> frozen_thetas;  // evaluated as-is when train is false
    AnsatzSpec ansatz;
    int shots = 1024;
    ProbMode decision_mode = ProbMode::Sampled;
    B92Mode b92_sift = B92Mode::PaperFaithful;
    QrlConfig qrl;  // inner learner settings for the QRL-based variants
};

struct QnnRunResult {
    std::vector<ProtocolTranscript> transcripts;  // one per sample
    std::vector<SampleMetrics> sample_metrics;
    MetricsSummary summary;
    PqcParams params;
    std::optional<TrainingTrace> trace;
};

namespace detail {

/// Optimizes over a fixed batch with restarts: the first round starts from
/// zero angles, later rounds from random ones; the best round wins.
inline TrainingTrace train_pqc(const std::vector<BatchItem>& batch, const AnsatzSpec& ansatz,
                               const TrainingConfig& cfg, Rng& rng) {
    const int d = ansatz.param_count();
    ScalarObjective scalar = [&](const std::vector<double>& x) {
        return loss_mse(PqcParams::from(x, ansatz), batch);
    };
    VectorObjective vec = [&](const std::vector<double>& x) {
        return wrong_probabilities(PqcParams::from(x, ansatz), batch);
    };

    TrainingTrace merged;
    const int rounds = cfg.outer_rounds < 1 ? 1 : cfg.outer_rounds;
    for (int round = 0; round < rounds; ++round) {
        std::vector<double> start(static_cast<std::size_t>(d), 0.0);
        if (round > 0)
            for (double& v : start) v = rng.uniform(0.0, 2.0 * kPi);
        const PqcParams init = PqcParams::from(start, ansatz);
        const TrainingTrace t = cfg.optimizer == OptimizerKind::DerivativeFree
                                    ? optimize_derivative_free(scalar, init, cfg)
                                    : optimize_gradient(vec, init, cfg);
        merged.entries.insert(merged.entries.end(), t.entries.begin(), t.entries.end());
        if (t.best_loss < merged.best_loss) {
            merged.best_loss = t.best_loss;
            merged.best_thetas = t.best_thetas;
        }
    }
    return merged;
}

inline PqcParams resolve_params(const QnnProtocolConfig& cfg, std::optional<TrainingTrace>& trace,
                                const std::vector<BatchItem>& batch, Rng& rng) {
    if (!cfg.train) {
        if (cfg.frozen_thetas) return PqcParams::from(*cfg.frozen_thetas, cfg.ansatz);
        return PqcParams::zeros(cfg.ansatz);
    }
    trace = train_pqc(batch, cfg.ansatz, cfg.training, rng);
    return PqcParams::from(trace->best_thetas, cfg.ansatz);
}

inline QnnRunResult finish_run(QnnRunResult&& res) {
    res.summary = summarize(res.sample_metrics);
    return std::move(res);
}

}  // namespace detail

/// Four-state pipeline with the trainable circuit inserted before the
/// measurement. Training minimizes the decode loss over a fresh batch of
/// transmissions; evaluation draws new bits with the angles frozen.
inline QnnRunResult qnn_bb84_run(const QnnProtocolConfig& cfg, const KrausChannel* channel,
                                 std::uint64_t seed) {
    Rng rng(seed);
    Rng train_rng = rng.split();
    std::optional<TrainingTrace> trace;
    std::vector<BatchItem> batch;
    if (cfg.train) batch = bb84_contexts(cfg.training.key_bits, channel, train_rng);
    const PqcParams params = detail::resolve_params(cfg, trace, batch, train_rng);

    const CMat h = make_gate(Gate::H);
    const CMat x = make_gate(Gate::X);
    QnnRunResult res{.transcripts = {}, .sample_metrics = {}, .summary = {}, .params = params,
                     .trace = std::move(trace)};
    for (int s = 0; s < cfg.training.samples; ++s) {
        Rng srng = rng.split();
        ProtocolTranscript t;
        t.seed = seed;
        t.alice_bases = BasisString{};
        t.bob_bases = BasisString{};
        for (int i = 0; i < cfg.training.key_bits; ++i) {
            const int bit = srng.bit();
            const int encode = srng.bit();
            const int decode = srng.bit();
            DensityMatrix state = DensityMatrix::basis_state(1, 0);
            if (bit == 1) state = apply_gate(state, x, {0});
            if (encode == 1) state = apply_gate(state, h, {0});
            if (channel) state = apply_channel(state, *channel, 0);
            if (decode == 1) state = apply_gate(state, h, {0});
            state = apply_pqc(state, params);
            const auto dist = measure_distribution(state);
            const int bob_bit = decide_bit(dist, cfg.decision_mode, cfg.shots, srng);
            const bool conclusive = encode == decode;
            t.alice_bits.push_back(bit);
            t.alice_bases->push_back(encode ? Basis::Diagonal : Basis::Rectilinear);
            t.bob_bases->push_back(decode ? Basis::Diagonal : Basis::Rectilinear);
            t.bob_bits.push_back(bob_bit);
            t.scores.push_back(dist.probabilities[1]);
            t.conclusive_mask.push_back(conclusive ? 1 : 0);
            if (conclusive) t.sifted_key.push_back(bob_bit);
        }
        res.sample_metrics.push_back(metrics_from_transcript(t));
        res.transcripts.push_back(std::move(t));
    }
    return detail::finish_run(std::move(res));
}

/// Two-state pipeline with the trainable circuit before measurement. The
/// receiver records the raw outcome at every position; the sift rule is
/// selected by b92_sift (PaperFaithful keeps bit == basis, Standard keeps
/// conclusive outcomes and stores the decoded bit).
inline QnnRunResult qnn_b92_run(const QnnProtocolConfig& cfg, const KrausChannel* channel,
                                std::uint64_t seed) {
    Rng rng(seed);
    Rng train_rng = rng.split();
    std::optional<TrainingTrace> trace;
    std::vector<BatchItem> batch;
    if (cfg.train) batch = b92_contexts(cfg.training.key_bits, channel, train_rng);
    const PqcParams params = detail::resolve_params(cfg, trace, batch, train_rng);

    const CMat h = make_gate(Gate::H);
    QnnRunResult res{.transcripts = {}, .sample_metrics = {}, .summary = {}, .params = params,
                     .trace = std::move(trace)};
    for (int s = 0; s < cfg.training.samples; ++s) {
        Rng srng = rng.split();
        ProtocolTranscript t;
        t.seed = seed;
        t.bob_bases = BasisString{};
        for (int i = 0; i < cfg.training.key_bits; ++i) {
            const int bit = srng.bit();
            const int decode = srng.bit();
            DensityMatrix state = DensityMatrix::basis_state(1, 0);
            if (bit == 1) state = apply_gate(state, h, {0});
            if (channel) state = apply_channel(state, *channel, 0);
            if (decode == 1) state = apply_gate(state, h, {0});
            state = apply_pqc(state, params);
            const auto dist = measure_distribution(state);
            const int outcome = decide_bit(dist, cfg.decision_mode, cfg.shots, srng);

            bool conclusive = false;
            int sift_bit = outcome;
            if (cfg.b92_sift == B92Mode::PaperFaithful) {
                conclusive = bit == decode;
            } else if (decode == 0 && outcome == 1) {
                conclusive = true;
                sift_bit = 1;
            } else if (decode == 1 && outcome == 1) {
                conclusive = true;
                sift_bit = 0;
            }

            t.alice_bits.push_back(bit);
            t.bob_bases->push_back(decode ? Basis::Diagonal : Basis::Rectilinear);
            t.bob_bits.push_back(outcome);
            t.scores.push_back(dist.probabilities[1]);
            t.conclusive_mask.push_back(conclusive ? 1 : 0);
            if (conclusive) t.sifted_key.push_back(sift_bit);
        }
        res.sample_metrics.push_back(metrics_from_transcript(t));
        res.transcripts.push_back(std::move(t));
    }
    return detail::finish_run(std::move(res));
}

/// Angle learner with the trainable circuit appended to every evaluation
/// circuit. Training captures the per-bit states at the converged decoding
/// angles and fits the circuit to decode them.
inline QnnRunResult qnn_qrl_run(QrlVersion version, const QnnProtocolConfig& cfg,
                                const KrausChannel* channel, std::uint64_t seed) {
    Rng rng(seed);
    Rng train_rng = rng.split();

    QrlConfig inner = cfg.qrl;
    inner.channel = channel;
    inner.max_episodes = cfg.training.inner_iterations > 0 ? cfg.training.inner_iterations
                                                           : default_qrl_episodes(version);
    inner.decision_mode = cfg.decision_mode;
    inner.shots = cfg.shots;

    std::optional<TrainingTrace> trace;
    std::vector<BatchItem> batch;
    if (cfg.train) batch = qrl_contexts(version, cfg.training.key_bits, inner, train_rng);
    const PqcParams params = detail::resolve_params(cfg, trace, batch, train_rng);

    QrlConfig eval_cfg = inner;
    eval_cfg.pqc = &params;

    QnnRunResult res{.transcripts = {}, .sample_metrics = {}, .summary = {}, .params = params,
                     .trace = std::move(trace)};
    for (int s = 0; s < cfg.training.samples; ++s) {
        const ProtocolTranscript t =
            qrl_keygen(version, cfg.training.key_bits, eval_cfg, rng.child_seed());
        res.sample_metrics.push_back(metrics_from_transcript(t));
        res.transcripts.push_back(t);
    }
    return detail::finish_run(std::move(res));
}

}  // namespace qkdlab
