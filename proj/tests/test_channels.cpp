#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qkdlab/channels.hpp"
#include "qkdlab/density.hpp"
#include "qkdlab/rng.hpp"

using namespace qkdlab;

namespace {

DensityMatrix random_single_qubit(Rng& rng) {
    std::vector<cplx> amp(2);
    for (auto& a : amp) a = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const DensityMatrix pure = DensityMatrix::pure(amp);
    const double w = rng.uniform01();
    CMat mixed = pure.matrix().scaled(w) + CMat::identity(2).scaled(0.5 * (1.0 - w));
    return DensityMatrix(std::move(mixed));
}

DensityMatrix maximally_mixed() { return DensityMatrix(CMat::identity(2).scaled(0.5)); }

}  // namespace

TEST_CASE("kraus completeness holds for every kind and strength", "[channels]") {
    for (ChannelKind kind : kAllChannelKinds) {
        for (int i = 0; i <= 10; ++i) {
            const auto ch = build_channel(kind, 0.1 * i);
            REQUIRE(completeness_deviation(ch) < kAlgebraTol);
        }
    }
}

TEST_CASE("strength is range-checked", "[channels]") {
    REQUIRE_THROWS_AS(build_channel(ChannelKind::BitFlip, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_channel(ChannelKind::BitFlip, 1.1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_channel("no-such-channel", 0.5), std::invalid_argument);
}

TEST_CASE("zero strength is the identity channel", "[channels]") {
    Rng rng(3);
    for (ChannelKind kind : kAllChannelKinds) {
        const auto ch = build_channel(kind, 0.0);
        const DensityMatrix rho = random_single_qubit(rng);
        REQUIRE(max_abs_diff(apply_channel(rho, ch).matrix(), rho.matrix()) < kAlgebraTol);
    }
}

TEST_CASE("full bit flip swaps the basis states", "[channels]") {
    const auto ch = build_channel(ChannelKind::BitFlip, 1.0);
    const auto out = apply_channel(DensityMatrix::basis_state(1, 0), ch);
    REQUIRE(measure_distribution(out).probabilities[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("full amplitude damping decays |1> to |0>", "[channels]") {
    const auto ch = build_channel(ChannelKind::AmplitudeDamping, 1.0);
    const auto out = apply_channel(DensityMatrix::basis_state(1, 1), ch);
    REQUIRE(measure_distribution(out).probabilities[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("full depolarizing reaches the maximally mixed state", "[channels]") {
    Rng rng(17);
    const auto ch = build_channel(ChannelKind::Depolarizing, 1.0);
    for (int i = 0; i < 10; ++i) {
        const auto out = apply_channel(random_single_qubit(rng), ch);
        REQUIRE(max_abs_diff(out.matrix(), CMat::identity(2).scaled(0.5)) < 1e-10);
    }
}

TEST_CASE("phase flip fixes a computational basis state", "[channels]") {
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        const auto ch = build_channel(ChannelKind::PhaseFlip, rng.uniform01());
        const auto out = apply_channel(DensityMatrix::basis_state(1, 0), ch);
        REQUIRE(max_abs_diff(out.matrix(), DensityMatrix::basis_state(1, 0).matrix()) < 1e-12);
    }
}

TEST_CASE("bit flip at 0.3 puts 0.3 of the weight on the flipped outcome", "[channels]") {
    // By hand: rho' = 0.7 |0><0| + 0.3 X|0><0|X = diag(0.7, 0.3).
    const auto ch = build_channel(ChannelKind::BitFlip, 0.3);
    const auto out = apply_channel(DensityMatrix::basis_state(1, 0), ch);
    REQUIRE(measure_distribution(out).probabilities[1] == Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("channels preserve trace and positivity on random states", "[channels]") {
    Rng rng(29);
    for (ChannelKind kind : kAllChannelKinds) {
        for (int i = 0; i < 100; ++i) {
            const auto ch = build_channel(kind, rng.uniform01());
            const auto out = apply_channel(random_single_qubit(rng), ch);
            const auto check = check_density(out);
            REQUIRE(check.trace_dev < kAlgebraTol);
            REQUIRE(check.hermiticity_dev < kAlgebraTol);
            REQUIRE(check.min_eigenvalue > -1e-10);
        }
    }
}

TEST_CASE("maximally mixed state is a fixed point of the unital channels", "[channels]") {
    for (ChannelKind kind : {ChannelKind::BitFlip, ChannelKind::PhaseFlip,
                             ChannelKind::BitPhaseFlip, ChannelKind::Depolarizing,
                             ChannelKind::PhaseDamping}) {
        for (int i = 0; i <= 10; ++i) {
            const auto ch = build_channel(kind, 0.1 * i);
            const auto out = apply_channel(maximally_mixed(), ch);
            REQUIRE(max_abs_diff(out.matrix(), maximally_mixed().matrix()) < kAlgebraTol);
        }
    }
}

TEST_CASE("channel application targets one qubit of a pair", "[channels]") {
    const auto ch = build_channel(ChannelKind::BitFlip, 1.0);
    const auto out = apply_channel(DensityMatrix::basis_state(2, 0), ch, 1);
    REQUIRE(measure_distribution(out).probabilities[1] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE_THROWS_AS(apply_channel(DensityMatrix::basis_state(1, 0), ch, 1), std::out_of_range);
}

TEST_CASE("channel names round-trip", "[channels]") {
    for (ChannelKind kind : kAllChannelKinds)
        REQUIRE(channel_from_name(channel_name(kind)) == kind);
}
