#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qkdlab/density.hpp"
#include "qkdlab/pqc.hpp"

namespace qkdlab {

enum class OptimizerKind { DerivativeFree, GradientDescent };

inline std::string_view optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::DerivativeFree ? "derivative-free" : "gradient-descent";
}

inline OptimizerKind optimizer_from_name(std::string_view name) {
    if (name == "derivative-free") return OptimizerKind::DerivativeFree;
    if (name == "gradient-descent") return OptimizerKind::GradientDescent;
    throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

struct TrainingConfig {
    OptimizerKind optimizer = OptimizerKind::DerivativeFree;
    double learning_rate = 0.5;
    int max_iterations = 60;   // optimizer evaluation/step budget
    int samples = 10;          // evaluation repetitions S
    int key_bits = 100;        // key length N per sample
    int inner_iterations = 0;  // per-bit learner episode budget I (0 = per-version default)
    int outer_rounds = 5;      // training restarts; best parameters win
    std::uint64_t seed = 1;
    double trust_initial = 0.5;  // derivative-free trust radius
    double trust_final = 1e-6;
};

/// One training example: the state entering the trainable circuit plus the
/// bit the receiver should decode.
struct BatchItem {
    DensityMatrix state;
    int true_bit;
};

/// Per-item probability of decoding the wrong bit, in exact mode.
inline std::vector<double> wrong_probabilities(const PqcParams& params,
                                               const std::vector<BatchItem>& batch) {
    if (batch.empty()) throw std::invalid_argument("wrong_probabilities: empty batch");
    std::vector<double> out;
    out.reserve(batch.size());
    const CMat u = pqc_unitary(params);
    for (const BatchItem& item : batch) {
        if (item.state.dim() != u.dim())
            throw std::invalid_argument("wrong_probabilities: dimension mismatch");
        const DensityMatrix after(u * item.state.matrix() * u.adjoint());
        const auto dist = measure_distribution(after);
        out.push_back(dist.probabilities[static_cast<std::size_t>(1 - item.true_bit)]);
    }
    return out;
}

/// Mean squared miss probability: (1/N) sum P(outcome != true bit)^2.
inline double loss_mse(const PqcParams& params, const std::vector<BatchItem>& batch) {
    const auto probs = wrong_probabilities(params, batch);
    double acc = 0.0;
    for (double p : probs) acc += p * p;
    return acc / static_cast<double>(probs.size());
}

struct TraceEntry {
    double loss;
    std::vector<double> thetas;
};

struct TrainingTrace {
    std::vector<TraceEntry> entries;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> best_thetas;
};

using ScalarObjective = std::function<double(const std::vector<double>&)>;
/// Per-sample wrong probabilities as a function of the raw angle vector.
using VectorObjective = std::function<std::vector<double>(const std::vector<double>&)>;

/// Derivative-free trust-region search: a coordinate simplex of d+1 points
/// around the incumbent supplies a linear model of the objective; the step
/// follows the model within the trust radius, which shrinks whenever no
/// improvement is found. max_iterations counts objective evaluations beyond
/// the initial one.
inline TrainingTrace optimize_derivative_free(const ScalarObjective& objective,
                                              const PqcParams& initial,
                                              const TrainingConfig& cfg) {
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("optimize_derivative_free: max_iterations must be >= 1");
    const std::size_t d = initial.thetas.size();
    if (d == 0) throw std::invalid_argument("optimize_derivative_free: empty parameter vector");

    TrainingTrace trace;
    auto eval = [&](const std::vector<double>& x) {
        const double v = objective(x);
        if (!std::isfinite(v))
            throw std::runtime_error("optimize_derivative_free: objective returned non-finite value");
        trace.entries.push_back({v, x});
        if (v < trace.best_loss) {
            trace.best_loss = v;
            trace.best_thetas = x;
        }
        return v;
    };

    std::vector<double> x = initial.thetas;
    double fx = eval(x);
    int budget = cfg.max_iterations;
    double rho = cfg.trust_initial;
    std::vector<double> grad(d, 0.0);
    std::vector<double> vertex_f(d, 0.0);

    while (budget > 0 && rho > cfg.trust_final) {
        bool exhausted = false;
        for (std::size_t j = 0; j < d; ++j) {
            if (budget == 0) {
                exhausted = true;
                break;
            }
            std::vector<double> xj = x;
            xj[j] += rho;
            --budget;
            vertex_f[j] = eval(xj);
        }
        if (exhausted) break;

        double gnorm = 0.0;
        std::size_t jbest = 0;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = (vertex_f[j] - fx) / rho;
            gnorm += grad[j] * grad[j];
            if (vertex_f[j] < vertex_f[jbest]) jbest = j;
        }
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-14) {
            rho *= 0.5;
            continue;
        }

        std::vector<double> xc = x;
        for (std::size_t j = 0; j < d; ++j) xc[j] -= rho * grad[j] / gnorm;
        if (budget == 0) break;
        --budget;
        const double fc = eval(xc);

        if (fc < fx && fc <= vertex_f[jbest]) {
            x = xc;
            fx = fc;
        } else if (vertex_f[jbest] < fx) {
            x[jbest] += rho;
            fx = vertex_f[jbest];
        } else {
            rho *= 0.5;
        }
    }
    return trace;
}

/// Exact gradient of the mean squared miss probability via two +-pi/2
/// circuit evaluations per coordinate and the chain rule.
inline std::vector<double> parameter_shift_gradient(const VectorObjective& probs,
                                                    const std::vector<double>& thetas) {
    const auto base = probs(thetas);
    if (base.empty()) throw std::invalid_argument("parameter_shift_gradient: empty batch");
    std::vector<double> grad(thetas.size(), 0.0);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        std::vector<double> tp = thetas;
        std::vector<double> tm = thetas;
        tp[j] += kPi / 2.0;
        tm[j] -= kPi / 2.0;
        const auto pp = probs(tp);
        const auto pm = probs(tm);
        double acc = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double dp = 0.5 * (pp[i] - pm[i]);
            acc += 2.0 * base[i] * dp;
        }
        grad[j] = acc / static_cast<double>(base.size());
        if (!std::isfinite(grad[j]))
            throw std::runtime_error("parameter_shift_gradient: non-finite gradient");
    }
    return grad;
}

inline double mean_squared(const std::vector<double>& probs) {
    double acc = 0.0;
    for (double p : probs) acc += p * p;
    return acc / static_cast<double>(probs.size());
}

/// Plain gradient descent: theta <- theta - eta * g with the parameter-shift
/// gradient. The trace records the loss after every step.
inline TrainingTrace optimize_gradient(const VectorObjective& probs, const PqcParams& initial,
                                       const TrainingConfig& cfg) {
    if (cfg.learning_rate <= 0.0)
        throw std::invalid_argument("optimize_gradient: learning rate must be positive");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("optimize_gradient: max_iterations must be >= 1");

    TrainingTrace trace;
    auto record = [&](const std::vector<double>& x) {
        const double v = mean_squared(probs(x));
        if (!std::isfinite(v))
            throw std::runtime_error("optimize_gradient: objective returned non-finite value");
        trace.entries.push_back({v, x});
        if (v < trace.best_loss) {
            trace.best_loss = v;
            trace.best_thetas = x;
        }
        return v;
    };

    std::vector<double> x = initial.thetas;
    record(x);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const auto g = parameter_shift_gradient(probs, x);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] -= cfg.learning_rate * g[j];
        record(x);
    }
    return trace;
}

}  // namespace qkdlab
