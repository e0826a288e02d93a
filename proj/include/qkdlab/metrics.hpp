#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkdlab/transcript.hpp"

namespace qkdlab {

/// Binary confusion counts with bit 1 as the positive class.
struct ConfusionMatrix {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(const BitString& truth, const BitString& predicted) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1)
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

/// Scalar scores; a degenerate denominator yields 0 with its flag cleared
/// instead of NaN, so batch summaries stay finite and auditable.
struct ScalarMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

inline ScalarMetrics scalar_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("scalar_metrics: empty confusion matrix");
    ScalarMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0) {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    } else {
        m.precision_defined = false;
    }
    if (cm.tp + cm.fn > 0) {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    } else {
        m.recall_defined = false;
    }
    if (m.precision_defined && m.recall_defined && m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.f1_defined = false;
    }
    return m;
}

/// Mismatch fraction, over all positions or over the masked subset.
inline double qber(const BitString& truth, const BitString& predicted,
                   const std::vector<std::uint8_t>* mask = nullptr) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("qber: length mismatch");
    if (mask && mask->size() != truth.size())
        throw std::invalid_argument("qber: mask length mismatch");
    std::int64_t compared = 0;
    std::int64_t mismatched = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        ++compared;
        if (truth[i] != predicted[i]) ++mismatched;
    }
    if (compared == 0) throw std::invalid_argument("qber: empty comparison set");
    return static_cast<double>(mismatched) / static_cast<double>(compared);
}

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
    double auc_rank = 0.0;  // rank-statistic cross-check, ties counted half
    bool auc_defined = true;
};

/// Threshold sweep over the distinct scores, descending; equal scores move
/// as one group, which makes the trapezoid area equal the rank statistic.
inline RocCurve roc(const BitString& truth, const std::vector<double>& scores) {
    if (truth.size() != scores.size()) throw std::invalid_argument("roc: length mismatch");
    if (truth.empty()) throw std::invalid_argument("roc: empty input");
    for (double s : scores)
        if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("roc: scores must lie in [0, 1]");

    std::int64_t npos = 0;
    for (int b : truth) npos += b == 1 ? 1 : 0;
    const std::int64_t nneg = static_cast<std::int64_t>(truth.size()) - npos;

    RocCurve curve;
    if (npos == 0 || nneg == 0) {
        curve.auc_defined = false;
        curve.points = {{0.0, 0.0}, {1.0, 1.0}};
        return curve;
    }

    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            truth[order[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(nneg),
                                  static_cast<double>(tp) / static_cast<double>(npos));
    }

    double area = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& [x0, y0] = curve.points[k - 1];
        const auto& [x1, y1] = curve.points[k];
        area += (x1 - x0) * 0.5 * (y0 + y1);
    }
    curve.auc = area;

    // Rank statistic: P(random positive outranks random negative), ties half.
    std::vector<std::size_t> asc(order.rbegin(), order.rend());
    double rank_sum_pos = 0.0;
    std::size_t j = 0;
    while (j < asc.size()) {
        const double s = scores[asc[j]];
        std::size_t k = j;
        while (k < asc.size() && scores[asc[k]] == s) ++k;
        const double avg_rank = 0.5 * (static_cast<double>(j + 1) + static_cast<double>(k));
        for (std::size_t t = j; t < k; ++t)
            if (truth[asc[t]] == 1) rank_sum_pos += avg_rank;
        j = k;
    }
    curve.auc_rank = (rank_sum_pos - 0.5 * static_cast<double>(npos) * static_cast<double>(npos + 1)) /
                     (static_cast<double>(npos) * static_cast<double>(nneg));
    return curve;
}

struct SampleMetrics {
    ScalarMetrics scalar;
    double qber_sifted = 0.0;
    bool qber_sifted_defined = true;
    double qber_all = 0.0;
};

/// All scalar metrics for one transcript. Accuracy and friends compare the
/// full sender/receiver strings; both error-rate definitions are computed,
/// the sifted-subset variant and the all-positions variant.
inline SampleMetrics metrics_from_transcript(const ProtocolTranscript& t) {
    SampleMetrics m;
    m.scalar = scalar_metrics(confusion(t.alice_bits, t.bob_bits));
    m.qber_all = qber(t.alice_bits, t.bob_bits);
    bool any = false;
    for (std::uint8_t b : t.conclusive_mask) any = any || b;
    if (any) {
        m.qber_sifted = qber(alice_sifted_bits(t), t.sifted_key);
    } else {
        m.qber_sifted_defined = false;
    }
    return m;
}

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct MetricsSummary {
    Aggregate accuracy, precision, recall, f1, qber_sifted, qber_all;
    int samples = 0;
};

inline Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return a;
}

inline MetricsSummary summarize(const std::vector<SampleMetrics>& samples) {
    if (samples.empty()) throw std::invalid_argument("summarize: no samples");
    MetricsSummary s;
    s.samples = static_cast<int>(samples.size());
    std::vector<double> acc, prec, rec, f1, qs, qa;
    for (const SampleMetrics& m : samples) {
        acc.push_back(m.scalar.accuracy);
        prec.push_back(m.scalar.precision);
        rec.push_back(m.scalar.recall);
        f1.push_back(m.scalar.f1);
        if (m.qber_sifted_defined) qs.push_back(m.qber_sifted);
        qa.push_back(m.qber_all);
    }
    s.accuracy = aggregate(acc);
    s.precision = aggregate(prec);
    s.recall = aggregate(rec);
    s.f1 = aggregate(f1);
    s.qber_sifted = aggregate(qs);
    s.qber_all = aggregate(qa);
    return s;
}

}  // namespace qkdlab
