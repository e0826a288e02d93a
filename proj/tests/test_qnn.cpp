#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qkdlab/bb84.hpp"
#include "qkdlab/qnn.hpp"

using namespace qkdlab;

namespace {

QnnProtocolConfig quick_config(bool train) {
    QnnProtocolConfig cfg;
    cfg.train = train;
    cfg.training.samples = 4;
    cfg.training.key_bits = 120;
    cfg.training.max_iterations = 60;
    cfg.training.outer_rounds = 3;
    cfg.shots = 256;
    return cfg;
}

}  // namespace

TEST_CASE("frozen zero angles reproduce baseline bb84 statistics", "[qnn]") {
    QnnProtocolConfig cfg = quick_config(false);
    cfg.training.samples = 6;
    cfg.training.key_bits = 400;
    const auto res = qnn_bb84_run(cfg, nullptr, 321);
    // Identity circuit: matched-basis bits are perfect, the rest coin flips.
    REQUIRE(res.summary.qber_sifted.mean == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(res.summary.accuracy.mean == Catch::Approx(0.75).margin(0.05));

    const auto base = bb84_run(400, nullptr, false, 256, 321);
    const auto base_m = metrics_from_transcript(base);
    REQUIRE(std::abs(res.summary.accuracy.mean - base_m.scalar.accuracy) < 0.07);
}

TEST_CASE("trained qnn-bb84 reaches near-perfect accuracy", "[qnn]") {
    const auto res = qnn_bb84_run(quick_config(true), nullptr, 5150);
    REQUIRE(res.trace.has_value());
    REQUIRE(res.summary.accuracy.mean >= 0.99);
    REQUIRE(res.summary.qber_all.mean <= 0.01);
    REQUIRE(res.summary.qber_sifted.mean <= 0.01);
}

TEST_CASE("accuracy equals one minus the all-positions error rate", "[qnn]") {
    const auto res = qnn_bb84_run(quick_config(false), nullptr, 11);
    for (std::size_t s = 0; s < res.sample_metrics.size(); ++s) {
        REQUIRE(res.sample_metrics[s].scalar.accuracy ==
                Catch::Approx(1.0 - res.sample_metrics[s].qber_all).margin(1e-15));
    }
}

TEST_CASE("training compensates a full bit flip on rectilinear contexts", "[qnn]") {
    // Grid search over the Ry angle shows the flip is invertible for
    // rectilinear transmissions; training on those contexts recovers them.
    const auto ch = build_channel(ChannelKind::BitFlip, 1.0);
    Rng rng(2);
    std::vector<BatchItem> batch;
    const CMat x = make_gate(Gate::X);
    for (int i = 0; i < 24; ++i) {
        const int bit = rng.bit();
        DensityMatrix s = DensityMatrix::basis_state(1, bit);
        s = apply_channel(s, ch, 0);
        batch.push_back(BatchItem{std::move(s), bit});
    }
    const AnsatzSpec spec{1, 1};
    double grid_best = 1.0;
    for (int i = 0; i <= 360; ++i) {
        const double b = 2.0 * kPi * i / 360.0;
        grid_best = std::min(grid_best, loss_mse(PqcParams::from({0.0, b, 0.0}, spec), batch));
    }
    REQUIRE(grid_best < 1e-9);  // Ry(pi) undoes the flip

    TrainingConfig tc;
    tc.max_iterations = 80;
    Rng trng(3);
    const auto trace = qkdlab::detail::train_pqc(batch, spec, tc, trng);
    REQUIRE(trace.best_loss < 1e-3);
}

TEST_CASE("qnn-b92 with zero angles matches the baseline flow", "[qnn]") {
    QnnProtocolConfig cfg = quick_config(false);
    cfg.training.samples = 6;
    cfg.training.key_bits = 500;
    cfg.b92_sift = B92Mode::PaperFaithful;
    const auto res = qnn_b92_run(cfg, nullptr, 77);
    // Raw-outcome agreement: |0> reads 0 rectilinearly and flips a coin
    // diagonally; |+> flips a coin rectilinearly and never reads 1
    // diagonally. Net accuracy one half.
    REQUIRE(res.summary.accuracy.mean == Catch::Approx(0.5).margin(0.06));
    for (const auto& t : res.transcripts) validate_transcript(t);
}

TEST_CASE("trained qnn-b92 stays at chance-level accuracy", "[qnn]") {
    QnnProtocolConfig cfg = quick_config(true);
    cfg.b92_sift = B92Mode::PaperFaithful;
    const auto res = qnn_b92_run(cfg, nullptr, 31337);
    REQUIRE(res.summary.accuracy.mean > 0.4);
    REQUIRE(res.summary.accuracy.mean < 0.6);
}

TEST_CASE("qnn-qrl with zero angles reduces to the bare learner", "[qnn]") {
    QnnProtocolConfig cfg = quick_config(false);
    cfg.training.samples = 2;
    cfg.training.key_bits = 40;
    cfg.qrl.reward_mode = ProbMode::Exact;
    cfg.decision_mode = ProbMode::Exact;
    const auto res = qnn_qrl_run(QrlVersion::V1, cfg, nullptr, 606);
    REQUIRE(res.summary.accuracy.mean == Catch::Approx(1.0).margin(1e-12));

    QrlConfig bare;
    bare.decision_mode = ProbMode::Exact;
    const auto t = qrl_keygen(QrlVersion::V1, 40, bare, 606);
    REQUIRE(metrics_from_transcript(t).scalar.accuracy == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("trained qnn-qrl keeps near-perfect agreement", "[qnn]") {
    for (QrlVersion v : {QrlVersion::V1, QrlVersion::V2}) {
        QnnProtocolConfig cfg = quick_config(true);
        cfg.training.samples = 3;
        cfg.training.key_bits = 60;
        cfg.training.outer_rounds = 2;
        const auto res = qnn_qrl_run(v, cfg, nullptr, 2222);
        REQUIRE(res.summary.accuracy.mean >= 0.95);
        REQUIRE(res.summary.qber_all.mean <= 0.05);
    }
}

TEST_CASE("qnn runs are reproducible under a fixed seed", "[qnn]") {
    const auto a = qnn_bb84_run(quick_config(true), nullptr, 424242);
    const auto b = qnn_bb84_run(quick_config(true), nullptr, 424242);
    REQUIRE(a.params.thetas == b.params.thetas);
    REQUIRE(a.summary.accuracy.mean == b.summary.accuracy.mean);
    for (std::size_t s = 0; s < a.transcripts.size(); ++s)
        REQUIRE(a.transcripts[s].bob_bits == b.transcripts[s].bob_bits);
}

TEST_CASE("context builders honor the channel and matched flag", "[qnn]") {
    Rng rng(12);
    const auto matched = bb84_contexts(50, nullptr, rng, true);
    const PqcParams id = PqcParams::zeros({1, 1});
    REQUIRE(loss_mse(id, matched) == Catch::Approx(0.0).margin(1e-12));

    Rng rng2(12);
    const auto full = bb84_contexts(200, nullptr, rng2, false);
    REQUIRE(loss_mse(id, full) > 0.05);  // mismatched bases contribute
}
