// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each criterion enforces its own runtime ceiling alongside the checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkdlab/experiment.hpp"

using namespace qkdlab;
namespace fs = std::filesystem;

namespace {

struct Check {
    int id;
    std::string name;
    double time_limit_s;
    std::function<bool(std::string&)> fn;
};

double sifted_error_rate(const ProtocolTranscript& t) {
    const BitString truth = alice_sifted_bits(t);
    std::int64_t bad = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] != t.sifted_key[i]) ++bad;
    return truth.empty() ? 0.0 : static_cast<double>(bad) / static_cast<double>(truth.size());
}

bool criterion_exact_probabilities(std::string& detail) {
    Rng rng(10001);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t1 = rng.uniform(0.0, kPi);
        const double t2 = rng.uniform(0.0, kPi);
        const auto dist = qrl_circuit_distribution(0, t1, t2, nullptr, nullptr);
        const double expected = 0.5 * (1.0 + std::cos(t1 - t2));
        worst = std::max(worst, std::abs(dist.probabilities[0] - expected));
    }
    detail = "max |P0 - (1+cos)/2| = " + format_double(worst);
    return worst < 1e-12;
}

bool criterion_channel_algebra(std::string& detail) {
    double worst_completeness = 0.0;
    double worst_trace = 0.0;
    double worst_eig = 0.0;
    Rng rng(10002);
    for (ChannelKind kind : kAllChannelKinds) {
        for (int i = 0; i <= 10; ++i) {
            const auto ch = build_channel(kind, 0.1 * i);
            worst_completeness = std::max(worst_completeness, completeness_deviation(ch));
        }
        for (int i = 0; i < 100; ++i) {
            std::vector<cplx> amp{cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)),
                                  cplx(rng.uniform(-1, 1), rng.uniform(-1, 1))};
            const DensityMatrix pure = DensityMatrix::pure(amp);
            const double w = rng.uniform01();
            const DensityMatrix rho(pure.matrix().scaled(w) +
                                    CMat::identity(2).scaled(0.5 * (1.0 - w)));
            const auto ch = build_channel(kind, rng.uniform01());
            const auto check = check_density(apply_channel(rho, ch));
            worst_trace = std::max(worst_trace, check.trace_dev);
            worst_eig = std::min(worst_eig, check.min_eigenvalue);
        }
    }
    detail = "completeness dev " + format_double(worst_completeness) + ", trace dev " +
             format_double(worst_trace) + ", min eig " + format_double(worst_eig);
    return worst_completeness < 1e-12 && worst_trace < 1e-12 && worst_eig > -1e-12;
}

bool criterion_bb84(std::string& detail) {
    const auto clean = bb84_run(10000, nullptr, false, 1024, 20001);
    const double sift_fraction =
        static_cast<double>(clean.sifted_key.size()) / static_cast<double>(clean.size());
    const double clean_qber = qber(alice_sifted_bits(clean), clean.sifted_key);

    const auto tapped = bb84_run(10000, nullptr, true, 1024, 20002);
    const double eve_error = sifted_error_rate(tapped);

    detail = "qber_sifted " + format_double(clean_qber) + ", sift fraction " +
             format_double(sift_fraction) + ", eve error " + format_double(eve_error);
    return clean_qber == 0.0 && std::abs(sift_fraction - 0.5) <= 0.015 &&
           std::abs(eve_error - 0.25) <= 0.03;
}

bool criterion_b92(std::string& detail) {
    const auto t = b92_run(10000, nullptr, 1, 20003, B92Mode::Standard);
    const double conclusive_fraction =
        static_cast<double>(t.sifted_key.size()) / static_cast<double>(t.size());
    const double err = sifted_error_rate(t);
    detail = "conclusive fraction " + format_double(conclusive_fraction) + ", conclusive errors " +
             format_double(err);
    return std::abs(conclusive_fraction - 0.25) <= 0.02 && err == 0.0;
}

bool criterion_qrl(std::string& detail) {
    // V1 bisection widths follow pi/2^k.
    QrlConfig v1;
    v1.epsilon = 1e-4;
    v1.decision_mode = ProbMode::Exact;
    const auto run = qrl_v1_learn(0, 2.2, v1, 30001);
    int last_ep = 0;
    for (const auto& rec : run.log.records) {
        if (rec.episode == last_ep) continue;
        last_ep = rec.episode;
        const double expected = kPi / std::pow(2.0, rec.episode - 1);
        if (std::abs((rec.n3 - rec.n1) - expected) > 1e-12) {
            detail = "episode " + std::to_string(rec.episode) + " width off";
            return false;
        }
    }

    // V1 convergence over 100 random encodings.
    Rng rng(30002);
    QrlConfig cfg;
    cfg.decision_mode = ProbMode::Exact;
    for (int i = 0; i < 100; ++i) {
        const double theta1 = rng.uniform(0.0, kPi);
        const auto res = qrl_v1_learn(rng.bit(), theta1, cfg, rng.next_u64());
        if (std::abs(res.theta2_final - theta1) >= 0.01) {
            detail = "v1 missed theta1 by " + format_double(std::abs(res.theta2_final - theta1));
            return false;
        }
    }

    // V2 hit rate over 100 seeded trials.
    QrlConfig cfg2;
    cfg2.max_episodes = default_qrl_episodes(QrlVersion::V2);
    cfg2.decision_mode = ProbMode::Exact;
    int hits = 0;
    for (int i = 0; i < 100; ++i) {
        const double theta1 = rng.uniform(0.0, kPi);
        const auto res = qrl_v2_learn(rng.bit(), theta1, cfg2, rng.next_u64());
        if (std::abs(res.theta2_final - theta1) < 0.1) ++hits;
    }

    // Trajectory files show monotone interval shrinkage.
    const fs::path dir = fs::temp_directory_path() / "qkdlab_acceptance";
    fs::create_directories(dir);
    for (QrlVersion v : {QrlVersion::V1, QrlVersion::V2}) {
        QrlConfig ccfg;
        ccfg.max_episodes = default_qrl_episodes(v);
        const auto trials = convergence_trials(v, 5, ccfg, 30003);
        const fs::path file = dir / ("trajectories_" + std::string(qrl_version_name(v)) + ".csv");
        write_convergence_csv(file, "seed=30003 config_hash=acceptance", trials);
        std::ifstream in(file);
        std::string line;
        std::getline(in, line);  // metadata
        std::getline(in, line);  // header
        int trial = -1;
        int episode = 0;
        double last_width = 1e9;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            const int tr = std::stoi(cells[0]);
            const int ep = std::stoi(cells[1]);
            const double width = std::stod(cells[4]) - std::stod(cells[2]);
            if (tr != trial) {
                trial = tr;
                episode = 0;
                last_width = 1e9;
            }
            if (ep == episode) continue;
            episode = ep;
            if (width > last_width + 1e-12) {
                detail = "trajectory widths not monotone";
                return false;
            }
            last_width = width;
        }
    }

    detail = "v1 100/100 within 0.01, v2 " + std::to_string(hits) + "/100 within 0.1";
    return hits >= 95;
}

bool criterion_qnn_bb84(std::string& detail) {
    ExperimentConfig c;
    c.protocol = Protocol::QnnBb84;
    c.bits = 100;
    c.samples = 10;
    c.shots = 1024;
    c.seed = 40001;
    const auto trained = execute_protocol(c);

    ExperimentConfig frozen = c;
    frozen.training.train = false;
    const auto zero = execute_protocol(frozen);

    ExperimentConfig base = c;
    base.protocol = Protocol::Bb84;
    const auto baseline = execute_protocol(base);

    detail = "trained accuracy " + format_double(trained.summary.accuracy.mean) +
             ", frozen accuracy " + format_double(zero.summary.accuracy.mean) +
             ", baseline accuracy " + format_double(baseline.summary.accuracy.mean);
    return trained.summary.accuracy.mean >= 0.99 &&
           std::abs(zero.summary.accuracy.mean - baseline.summary.accuracy.mean) <= 0.05 &&
           zero.summary.qber_sifted.mean == 0.0 && baseline.summary.qber_sifted.mean == 0.0;
}

bool criterion_qnn_qrl(std::string& detail) {
    std::ostringstream msg;
    for (Protocol p : {Protocol::QnnQrlV1, Protocol::QnnQrlV2}) {
        ExperimentConfig c;
        c.protocol = p;
        c.bits = 100;
        c.samples = 10;
        c.shots = 1024;
        c.seed = 40002;
        const auto out = execute_protocol(c);
        msg << protocol_name(p) << " accuracy " << format_double(out.summary.accuracy.mean)
            << " qber_all " << format_double(out.summary.qber_all.mean) << "; ";
        if (out.summary.accuracy.mean < 0.95 || out.summary.qber_all.mean > 0.05) {
            detail = msg.str();
            return false;
        }
    }
    detail = msg.str();
    return true;
}

bool criterion_noise(std::string& detail) {
    // Full depolarizing noise pins every protocol at chance level.
    for (Protocol p : kAllProtocols) {
        ExperimentConfig c;
        c.protocol = p;
        c.bits = is_qnn(p) ? 150 : 400;
        c.samples = 3;
        c.shots = 128;
        c.seed = 50001;
        c.channel = ChannelKind::Depolarizing;
        c.strength = 1.0;
        const auto out = execute_protocol(c);
        if (std::abs(out.summary.accuracy.mean - 0.5) > 0.05) {
            detail = std::string(protocol_name(p)) + " accuracy " +
                     format_double(out.summary.accuracy.mean) + " at full depolarizing";
            return false;
        }
    }

    // Full bit flip inverts the rectilinear matched-basis bits.
    const auto ch = build_channel(ChannelKind::BitFlip, 1.0);
    const auto t = bb84_run(4000, &ch, false, 128, 50002);
    std::int64_t rect = 0;
    std::int64_t flipped = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if ((*t.alice_bases)[i] != (*t.bob_bases)[i]) continue;
        if ((*t.alice_bases)[i] != Basis::Rectilinear) continue;
        ++rect;
        if (t.alice_bits[i] != t.bob_bits[i]) ++flipped;
    }
    const double rect_error = static_cast<double>(flipped) / static_cast<double>(rect);
    if (rect_error < 0.95) {
        detail = "rectilinear matched error " + format_double(rect_error) + " at full bit flip";
        return false;
    }

    // Accuracy versus bit-flip strength falls from ~0.75 to ~0.5.
    ExperimentConfig sweep_cfg;
    sweep_cfg.protocol = Protocol::Bb84;
    sweep_cfg.bits = 400;
    sweep_cfg.samples = 3;
    sweep_cfg.shots = 128;
    sweep_cfg.seed = 50003;
    sweep_cfg.sweep_channels = {"bit-flip"};
    const SweepResult sweep = run_sweep(sweep_cfg);
    const double first = sweep.cells.front().summary.accuracy.mean;
    const double last = sweep.cells.back().summary.accuracy.mean;
    detail = "rect error " + format_double(rect_error) + ", bit-flip sweep " +
             format_double(first) + " -> " + format_double(last);
    return first >= 0.70 && first <= 0.80 && std::abs(last - 0.5) <= 0.05;
}

bool criterion_metric_identities(std::string& detail) {
    Rng rng(60001);
    for (int n = 0; n < 1000; ++n) {
        const int len = 2 + static_cast<int>(rng.uniform01() * 30.0);
        BitString truth, pred;
        for (int i = 0; i < len; ++i) {
            truth.push_back(rng.bit());
            pred.push_back(rng.bit());
        }
        const auto m = scalar_metrics(confusion(truth, pred));
        std::int64_t agree = 0;
        for (int i = 0; i < len; ++i)
            if (truth[i] == pred[i]) ++agree;
        if (std::abs(m.accuracy - static_cast<double>(agree) / len) > 1e-12) {
            detail = "brute-force recount mismatch";
            return false;
        }
        if (std::abs(m.accuracy - (1.0 - qber(truth, pred))) > 1e-15) {
            detail = "accuracy != 1 - qber_all";
            return false;
        }
    }
    for (int n = 0; n < 100; ++n) {
        BitString truth;
        std::vector<double> scores;
        bool has0 = false, has1 = false;
        const int len = 6 + static_cast<int>(rng.uniform01() * 40.0);
        for (int i = 0; i < len; ++i) {
            const int b = rng.bit();
            truth.push_back(b);
            has0 = has0 || b == 0;
            has1 = has1 || b == 1;
            scores.push_back(std::floor(rng.uniform01() * 4.0) / 4.0);
        }
        if (!has0 || !has1) continue;
        const auto curve = roc(truth, scores);
        if (std::abs(curve.auc - curve.auc_rank) > 1e-9) {
            detail = "trapezoid auc != rank auc";
            return false;
        }
    }
    const auto perfect = roc({1, 1, 0, 0}, {0.9, 0.8, 0.1, 0.2});
    if (perfect.auc != 1.0) {
        detail = "perfect classifier auc != 1";
        return false;
    }
    detail = "recount, auc identity, perfect auc all hold";
    return true;
}

bool criterion_declared_exclusions(std::string& detail) {
    // The exact comparison-table means/stds for the baseline two-state and
    // learner protocols, the published confusion-matrix counts, and AUC for
    // untrained protocols are not desk-reproducible; the substitute is the
    // property suite above plus side-by-side reporting of both error-rate
    // definitions. Verify the substitute exists end to end.
    const fs::path dir = fs::temp_directory_path() / "qkdlab_acceptance" / "declared";
    fs::remove_all(dir);
    ExperimentConfig c;
    c.protocol = Protocol::Bb84;
    c.bits = 50;
    c.samples = 2;
    c.shots = 16;
    c.seed = 70001;
    c.out_dir = dir.string();
    run_single(c);
    std::ifstream in(dir / "metrics.csv");
    std::string meta, header;
    std::getline(in, meta);
    std::getline(in, header);
    const bool both = header.find("qber_sifted") != std::string::npos &&
                      header.find("qber_all") != std::string::npos;
    detail = both ? "both error-rate definitions reported side by side"
                  : "metrics.csv missing an error-rate column";
    return both;
}

}  // namespace

int main() {
    std::vector<Check> checks = {
        {1, "exact measurement probabilities match the closed form", 1.0,
         criterion_exact_probabilities},
        {2, "channel completeness, trace and positivity", 5.0, criterion_channel_algebra},
        {3, "bb84 sift fraction, clean error rate, attacker error rate", 30.0, criterion_bb84},
        {4, "b92 conclusive fraction and error-free conclusive bits", 30.0, criterion_b92},
        {5, "learner bisection widths, convergence, trajectories", 60.0, criterion_qrl},
        {6, "trained qnn-bb84 headline and frozen-identity equivalence", 120.0,
         criterion_qnn_bb84},
        {7, "trained qnn-qrl v1/v2 accuracy and error rate", 300.0, criterion_qnn_qrl},
        {8, "noise sweep sanity", 300.0, criterion_noise},
        {9, "metric identities", 5.0, criterion_metric_identities},
        {10, "declared exclusions with side-by-side error reporting", 30.0,
         criterion_declared_exclusions},
    };

    int failures = 0;
    for (const Check& check : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = check.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed <= check.time_limit_s;
        if (!in_time) detail += " [over time limit]";
        const bool pass = ok && in_time;
        if (!pass) ++failures;
        std::printf("criterion %2d: %s (%.2fs) %s — %s\n", check.id, pass ? "PASS" : "FAIL",
                    elapsed, check.name.c_str(), detail.c_str());
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
