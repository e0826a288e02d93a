#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qkdlab/b92.hpp"
#include "qkdlab/bb84.hpp"
#include "qkdlab/csvio.hpp"
#include "qkdlab/metrics.hpp"
#include "qkdlab/qnn.hpp"
#include "qkdlab/qrl.hpp"

namespace qkdlab {

// ---------------------------------------------------------------------------
// Protocol catalogue
// ---------------------------------------------------------------------------

enum class Protocol {
    Bb84,
    B92,
    QrlV1,
    QrlV2,
    QnnBb84,
    QnnB92,
    QnnQrlV1,
    QnnQrlV2,
};

inline constexpr std::array<Protocol, 8> kAllProtocols = {
    Protocol::Bb84,    Protocol::B92,    Protocol::QrlV1,    Protocol::QrlV2,
    Protocol::QnnBb84, Protocol::QnnB92, Protocol::QnnQrlV1, Protocol::QnnQrlV2,
};

inline std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Bb84: return "bb84";
        case Protocol::B92: return "b92";
        case Protocol::QrlV1: return "qrl-v1";
        case Protocol::QrlV2: return "qrl-v2";
        case Protocol::QnnBb84: return "qnn-bb84";
        case Protocol::QnnB92: return "qnn-b92";
        case Protocol::QnnQrlV1: return "qnn-qrl-v1";
        case Protocol::QnnQrlV2: return "qnn-qrl-v2";
    }
    throw std::logic_error("protocol_name: unreachable");
}

inline Protocol protocol_from_name(std::string_view name) {
    for (Protocol p : kAllProtocols)
        if (protocol_name(p) == name) return p;
    throw std::invalid_argument("unknown protocol: " + std::string(name));
}

inline bool is_qnn(Protocol p) {
    return p == Protocol::QnnBb84 || p == Protocol::QnnB92 || p == Protocol::QnnQrlV1 ||
           p == Protocol::QnnQrlV2;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct TrainingSettings {
    OptimizerKind optimizer = OptimizerKind::DerivativeFree;
    double learning_rate = 0.5;
    int max_iterations = 60;
    int outer_rounds = 5;
    int inner_iterations = 0;  // learner episode budget; 0 = per-version default
    int layers = 1;
    bool train = true;
    std::optional<std::vector<double>> thetas;  // frozen angles when train is false
};

struct QrlSettings {
    double epsilon = 0.01;
    double target = 1.2;
    int episodes = 0;  // 0 = per-version default
    ProbMode reward_mode = ProbMode::Exact;
};

struct ExperimentConfig {
    int schema_version = 1;
    Protocol protocol = Protocol::Bb84;
    int bits = 100;
    int samples = 10;
    int shots = 1024;
    std::optional<ChannelKind> channel;
    double strength = 0.0;
    std::vector<std::string> sweep_channels;  // empty = all six kinds
    std::vector<double> grid;                 // empty = 0.0 .. 1.0 step 0.1
    bool eve = false;
    std::uint64_t seed = 12345;
    ProbMode mode = ProbMode::Sampled;
    std::optional<B92Mode> b92_mode;  // unset: standard baseline, paper-faithful QNN sift
    std::string qber_def = "all";     // which error-rate column the tables display
    TrainingSettings training;
    QrlSettings qrl;
    int threads = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";
};

inline std::string prob_mode_name(ProbMode m) { return m == ProbMode::Exact ? "exact" : "sampled"; }

inline ProbMode prob_mode_from_name(std::string_view s) {
    if (s == "exact") return ProbMode::Exact;
    if (s == "sampled") return ProbMode::Sampled;
    throw std::invalid_argument("unknown mode: " + std::string(s));
}

inline std::string b92_mode_name(B92Mode m) {
    return m == B92Mode::Standard ? "standard" : "paper";
}

inline B92Mode b92_mode_from_name(std::string_view s) {
    if (s == "standard") return B92Mode::Standard;
    if (s == "paper") return B92Mode::PaperFaithful;
    throw std::invalid_argument("unknown b92 mode: " + std::string(s));
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["schema_version"] = c.schema_version;
    j["protocol"] = std::string(protocol_name(c.protocol));
    j["bits"] = c.bits;
    j["samples"] = c.samples;
    j["shots"] = c.shots;
    if (c.channel)
        j["channel"] = {{"kind", std::string(channel_name(*c.channel))}, {"strength", c.strength}};
    else
        j["channel"] = nullptr;
    j["sweep_channels"] = c.sweep_channels;
    j["grid"] = c.grid;
    j["eve"] = c.eve;
    j["seed"] = c.seed;
    j["mode"] = prob_mode_name(c.mode);
    if (c.b92_mode)
        j["b92_mode"] = b92_mode_name(*c.b92_mode);
    else
        j["b92_mode"] = nullptr;
    j["qber_def"] = c.qber_def;
    j["training"] = {
        {"optimizer", std::string(optimizer_name(c.training.optimizer))},
        {"learning_rate", c.training.learning_rate},
        {"max_iterations", c.training.max_iterations},
        {"outer_rounds", c.training.outer_rounds},
        {"inner_iterations", c.training.inner_iterations},
        {"layers", c.training.layers},
        {"train", c.training.train},
    };
    if (c.training.thetas) j["training"]["thetas"] = *c.training.thetas;
    j["qrl"] = {
        {"epsilon", c.qrl.epsilon},
        {"target", c.qrl.target},
        {"episodes", c.qrl.episodes},
        {"reward_mode", prob_mode_name(c.qrl.reward_mode)},
    };
    j["threads"] = c.threads;
    j["out"] = c.out_dir;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.schema_version = j.value("schema_version", 1);
    if (c.schema_version != 1)
        throw std::invalid_argument("unsupported config schema_version");
    if (j.contains("protocol")) c.protocol = protocol_from_name(j.at("protocol").get<std::string>());
    c.bits = j.value("bits", c.bits);
    c.samples = j.value("samples", c.samples);
    c.shots = j.value("shots", c.shots);
    if (j.contains("channel") && !j.at("channel").is_null()) {
        const auto& ch = j.at("channel");
        c.channel = channel_from_name(ch.at("kind").get<std::string>());
        c.strength = ch.value("strength", 0.0);
    }
    if (j.contains("sweep_channels")) c.sweep_channels = j.at("sweep_channels").get<std::vector<std::string>>();
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
    c.eve = j.value("eve", false);
    c.seed = j.value("seed", c.seed);
    if (j.contains("mode")) c.mode = prob_mode_from_name(j.at("mode").get<std::string>());
    if (j.contains("b92_mode") && !j.at("b92_mode").is_null())
        c.b92_mode = b92_mode_from_name(j.at("b92_mode").get<std::string>());
    c.qber_def = j.value("qber_def", c.qber_def);
    if (j.contains("training")) {
        const auto& t = j.at("training");
        if (t.contains("optimizer"))
            c.training.optimizer = optimizer_from_name(t.at("optimizer").get<std::string>());
        c.training.learning_rate = t.value("learning_rate", c.training.learning_rate);
        c.training.max_iterations = t.value("max_iterations", c.training.max_iterations);
        c.training.outer_rounds = t.value("outer_rounds", c.training.outer_rounds);
        c.training.inner_iterations = t.value("inner_iterations", c.training.inner_iterations);
        c.training.layers = t.value("layers", c.training.layers);
        c.training.train = t.value("train", c.training.train);
        if (t.contains("thetas")) c.training.thetas = t.at("thetas").get<std::vector<double>>();
    }
    if (j.contains("qrl")) {
        const auto& q = j.at("qrl");
        c.qrl.epsilon = q.value("epsilon", c.qrl.epsilon);
        c.qrl.target = q.value("target", c.qrl.target);
        c.qrl.episodes = q.value("episodes", c.qrl.episodes);
        if (q.contains("reward_mode"))
            c.qrl.reward_mode = prob_mode_from_name(q.at("reward_mode").get<std::string>());
    }
    c.threads = j.value("threads", 0);
    c.out_dir = j.value("out", c.out_dir);
    return c;
}

/// Stable hash of the canonical config serialization; recorded in every
/// output file so artifacts can be traced back to their settings.
inline std::string config_hash_hex(const ExperimentConfig& c) {
    const std::uint64_t h = fnv1a64(config_to_json(c).dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string csv_meta(const ExperimentConfig& c) {
    return "seed=" + std::to_string(c.seed) + " config_hash=" + config_hash_hex(c);
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct ProtocolOutput {
    std::vector<ProtocolTranscript> transcripts;
    std::vector<SampleMetrics> sample_metrics;
    MetricsSummary summary;
    std::optional<PqcParams> params;
    std::optional<TrainingTrace> trace;
};

inline QrlVersion qrl_version_of(Protocol p) {
    if (p == Protocol::QrlV1 || p == Protocol::QnnQrlV1) return QrlVersion::V1;
    if (p == Protocol::QrlV2 || p == Protocol::QnnQrlV2) return QrlVersion::V2;
    throw std::invalid_argument("protocol has no learner version");
}

inline QrlConfig make_qrl_config(const ExperimentConfig& c, QrlVersion v,
                                 const KrausChannel* channel) {
    QrlConfig q;
    q.max_episodes = c.qrl.episodes > 0 ? c.qrl.episodes : default_qrl_episodes(v);
    q.epsilon = c.qrl.epsilon;
    q.target = c.qrl.target;
    q.shots = c.shots;
    q.reward_mode = c.qrl.reward_mode;
    q.decision_mode = c.mode;
    q.channel = channel;
    return q;
}

inline QnnProtocolConfig make_qnn_config(const ExperimentConfig& c) {
    QnnProtocolConfig q;
    q.training.optimizer = c.training.optimizer;
    q.training.learning_rate = c.training.learning_rate;
    q.training.max_iterations = c.training.max_iterations;
    q.training.samples = c.samples;
    q.training.key_bits = c.bits;
    q.training.inner_iterations = c.training.inner_iterations;
    q.training.outer_rounds = c.training.outer_rounds;
    q.train = c.training.train;
    q.frozen_thetas = c.training.thetas;
    q.ansatz = AnsatzSpec{1, c.training.layers};
    q.shots = c.shots;
    q.decision_mode = c.mode;
    q.b92_sift = c.b92_mode.value_or(B92Mode::PaperFaithful);
    q.qrl.epsilon = c.qrl.epsilon;
    q.qrl.target = c.qrl.target;
    q.qrl.reward_mode = c.qrl.reward_mode;
    if (c.qrl.episodes > 0 && c.training.inner_iterations == 0)
        q.training.inner_iterations = c.qrl.episodes;
    return q;
}

inline ProtocolOutput execute_protocol(const ExperimentConfig& c) {
    if (c.bits < 1) throw std::invalid_argument("config: bits must be >= 1");
    if (c.samples < 1) throw std::invalid_argument("config: samples must be >= 1");
    if (c.shots < 1) throw std::invalid_argument("config: shots must be >= 1");

    std::optional<KrausChannel> ch;
    if (c.channel) ch.emplace(build_channel(*c.channel, c.strength));
    const KrausChannel* chp = ch ? &*ch : nullptr;

    ProtocolOutput out;
    switch (c.protocol) {
        case Protocol::Bb84:
        case Protocol::B92:
        case Protocol::QrlV1:
        case Protocol::QrlV2: {
            Rng master(c.seed);
            for (int s = 0; s < c.samples; ++s) {
                const std::uint64_t ss = master.child_seed();
                ProtocolTranscript t;
                if (c.protocol == Protocol::Bb84) {
                    t = bb84_run(c.bits, chp, c.eve, c.shots, ss, c.mode);
                } else if (c.protocol == Protocol::B92) {
                    t = b92_run(c.bits, chp, c.shots, ss, c.b92_mode.value_or(B92Mode::Standard),
                                c.mode);
                } else {
                    const QrlVersion v = qrl_version_of(c.protocol);
                    t = qrl_keygen(v, c.bits, make_qrl_config(c, v, chp), ss);
                }
                out.sample_metrics.push_back(metrics_from_transcript(t));
                out.transcripts.push_back(std::move(t));
            }
            break;
        }
        case Protocol::QnnBb84:
        case Protocol::QnnB92:
        case Protocol::QnnQrlV1:
        case Protocol::QnnQrlV2: {
            const QnnProtocolConfig qc = make_qnn_config(c);
            QnnRunResult r = c.protocol == Protocol::QnnBb84 ? qnn_bb84_run(qc, chp, c.seed)
                             : c.protocol == Protocol::QnnB92
                                 ? qnn_b92_run(qc, chp, c.seed)
                                 : qnn_qrl_run(qrl_version_of(c.protocol), qc, chp, c.seed);
            out.transcripts = std::move(r.transcripts);
            out.sample_metrics = std::move(r.sample_metrics);
            out.params = std::move(r.params);
            out.trace = std::move(r.trace);
            break;
        }
    }
    out.summary = summarize(out.sample_metrics);
    return out;
}

inline RocCurve pooled_roc(const std::vector<ProtocolTranscript>& ts) {
    BitString truth;
    std::vector<double> scores;
    for (const auto& t : ts) {
        truth.insert(truth.end(), t.alice_bits.begin(), t.alice_bits.end());
        scores.insert(scores.end(), t.scores.begin(), t.scores.end());
    }
    return roc(truth, scores);
}

inline ConfusionMatrix pooled_confusion(const std::vector<ProtocolTranscript>& ts) {
    ConfusionMatrix cm;
    for (const auto& t : ts) {
        const ConfusionMatrix c = confusion(t.alice_bits, t.bob_bits);
        cm.tp += c.tp;
        cm.fp += c.fp;
        cm.tn += c.tn;
        cm.fn += c.fn;
    }
    return cm;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

template <typename Fn>
inline void parallel_for(std::size_t n, int threads, Fn&& fn) {
    std::size_t nt = threads > 0 ? static_cast<std::size_t>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min(nt, n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Artifact writers
// ---------------------------------------------------------------------------

namespace io {

inline std::string basis_cell(const std::optional<BasisString>& bases, std::size_t i) {
    if (!bases) return "";
    return (*bases)[i] == Basis::Rectilinear ? "R" : "D";
}

inline void write_transcripts_csv(const std::filesystem::path& path, const std::string& meta,
                                  const std::vector<ProtocolTranscript>& ts) {
    CsvWriter csv(path, meta,
                  {"sample", "index", "alice_bit", "alice_basis", "bob_basis", "bob_bit",
                   "conclusive", "score"});
    for (std::size_t s = 0; s < ts.size(); ++s) {
        const auto& t = ts[s];
        for (std::size_t i = 0; i < t.size(); ++i) {
            csv.row({std::to_string(s), std::to_string(i), std::to_string(t.alice_bits[i]),
                     basis_cell(t.alice_bases, i), basis_cell(t.bob_bases, i),
                     std::to_string(t.bob_bits[i]), std::to_string(int(t.conclusive_mask[i])),
                     format_double(t.scores[i])});
        }
    }
}

inline void write_metrics_csv(const std::filesystem::path& path, const std::string& meta,
                              const std::vector<SampleMetrics>& ms) {
    CsvWriter csv(path, meta,
                  {"sample", "accuracy", "precision", "precision_defined", "recall",
                   "recall_defined", "f1", "f1_defined", "qber_sifted", "qber_sifted_defined",
                   "qber_all"});
    for (std::size_t s = 0; s < ms.size(); ++s) {
        const auto& m = ms[s];
        csv.row({std::to_string(s), format_double(m.scalar.accuracy),
                 format_double(m.scalar.precision), std::to_string(int(m.scalar.precision_defined)),
                 format_double(m.scalar.recall), std::to_string(int(m.scalar.recall_defined)),
                 format_double(m.scalar.f1), std::to_string(int(m.scalar.f1_defined)),
                 format_double(m.qber_sifted), std::to_string(int(m.qber_sifted_defined)),
                 format_double(m.qber_all)});
    }
}

inline void write_confusion_csv(const std::filesystem::path& path, const std::string& meta,
                                const std::vector<ProtocolTranscript>& ts) {
    CsvWriter csv(path, meta, {"scope", "tp", "fp", "tn", "fn"});
    for (std::size_t s = 0; s < ts.size(); ++s) {
        const ConfusionMatrix cm = confusion(ts[s].alice_bits, ts[s].bob_bits);
        csv.row({std::to_string(s), std::to_string(cm.tp), std::to_string(cm.fp),
                 std::to_string(cm.tn), std::to_string(cm.fn)});
    }
    const ConfusionMatrix cm = pooled_confusion(ts);
    csv.row({"pooled", std::to_string(cm.tp), std::to_string(cm.fp), std::to_string(cm.tn),
             std::to_string(cm.fn)});
}

inline void write_roc_csv(const std::filesystem::path& path, const std::string& meta,
                          const RocCurve& curve) {
    CsvWriter csv(path, meta, {"fpr", "tpr"});
    for (const auto& [fpr, tpr] : curve.points) csv.row({format_double(fpr), format_double(tpr)});
}

inline nlohmann::json aggregate_json(const Aggregate& a) {
    return {{"mean", a.mean}, {"std", a.stddev}};
}

inline nlohmann::json summary_json(const MetricsSummary& s) {
    return {
        {"samples", s.samples},
        {"accuracy", aggregate_json(s.accuracy)},
        {"precision", aggregate_json(s.precision)},
        {"recall", aggregate_json(s.recall)},
        {"f1", aggregate_json(s.f1)},
        {"qber_sifted", aggregate_json(s.qber_sifted)},
        {"qber_all", aggregate_json(s.qber_all)},
    };
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace io

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct RunResultFiles {
    ProtocolOutput output;
    RocCurve roc;
    std::filesystem::path manifest;
};

/// Executes one protocol configuration and writes transcript, metrics,
/// confusion, ROC and manifest files under the configured output directory.
inline RunResultFiles run_single(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    const fs::path dir(c.out_dir);
    fs::create_directories(dir);
    const std::string meta = csv_meta(c);

    RunResultFiles r{execute_protocol(c), RocCurve{}, dir / "manifest.json"};
    r.roc = pooled_roc(r.output.transcripts);

    io::write_transcripts_csv(dir / "transcript.csv", meta, r.output.transcripts);
    io::write_metrics_csv(dir / "metrics.csv", meta, r.output.sample_metrics);
    io::write_confusion_csv(dir / "confusion.csv", meta, r.output.transcripts);
    io::write_roc_csv(dir / "roc.csv", meta, r.roc);

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = "run";
    manifest["config"] = config_to_json(c);
    manifest["config_hash"] = config_hash_hex(c);
    manifest["summary"] = io::summary_json(r.output.summary);
    manifest["roc"] = {{"auc", r.roc.auc}, {"auc_rank", r.roc.auc_rank},
                       {"defined", r.roc.auc_defined}};
    if (r.output.params) manifest["trained_thetas"] = r.output.params->thetas;
    manifest["outputs"] = {"transcript.csv", "metrics.csv", "confusion.csv", "roc.csv"};
    io::write_json(r.manifest, manifest);
    return r;
}

struct TableRow {
    Protocol protocol;
    MetricsSummary summary;
};

/// One row per configuration, every configuration executed; failures
/// propagate instead of dropping rows.
inline std::vector<TableRow> run_table(const std::vector<ExperimentConfig>& configs) {
    if (configs.empty()) throw std::invalid_argument("run_table: no configurations");
    std::vector<TableRow> rows;
    rows.reserve(configs.size());
    for (const ExperimentConfig& c : configs)
        rows.push_back(TableRow{c.protocol, execute_protocol(c).summary});
    return rows;
}

inline std::string format_mean_std(const Aggregate& a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f +/- %.3f", a.mean, a.stddev);
    return buf;
}

/// Plain-text comparison table: Accuracy, Precision, Recall, F1, QBER.
inline std::string format_table(const std::vector<TableRow>& rows, const std::string& qber_def) {
    std::ostringstream out;
    out << "Protocol      Accuracy         Precision        Recall           F1               QBER(" << qber_def << ")\n";
    for (const TableRow& r : rows) {
        char name[16];
        std::snprintf(name, sizeof name, "%-12s", std::string(protocol_name(r.protocol)).c_str());
        out << name << "  " << format_mean_std(r.summary.accuracy) << "  "
            << format_mean_std(r.summary.precision) << "  " << format_mean_std(r.summary.recall)
            << "  " << format_mean_std(r.summary.f1) << "  "
            << format_mean_std(qber_def == "sifted" ? r.summary.qber_sifted : r.summary.qber_all)
            << "\n";
    }
    return out.str();
}

inline void write_table_csv(const std::filesystem::path& path, const std::string& meta,
                            const std::vector<TableRow>& rows) {
    CsvWriter csv(path, meta,
                  {"protocol", "accuracy_mean", "accuracy_std", "precision_mean", "precision_std",
                   "recall_mean", "recall_std", "f1_mean", "f1_std", "qber_sifted_mean",
                   "qber_sifted_std", "qber_all_mean", "qber_all_std"});
    for (const TableRow& r : rows) {
        csv.row({std::string(protocol_name(r.protocol)), format_double(r.summary.accuracy.mean),
                 format_double(r.summary.accuracy.stddev), format_double(r.summary.precision.mean),
                 format_double(r.summary.precision.stddev), format_double(r.summary.recall.mean),
                 format_double(r.summary.recall.stddev), format_double(r.summary.f1.mean),
                 format_double(r.summary.f1.stddev), format_double(r.summary.qber_sifted.mean),
                 format_double(r.summary.qber_sifted.stddev), format_double(r.summary.qber_all.mean),
                 format_double(r.summary.qber_all.stddev)});
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepCell {
    Protocol protocol;
    ChannelKind kind;
    double strength;
    std::uint64_t seed;
    MetricsSummary summary;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

inline std::vector<double> default_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(0.1 * i);
    return g;
}

inline std::uint64_t sweep_cell_seed(std::uint64_t base, Protocol p, ChannelKind kind,
                                     double strength) {
    std::uint64_t h = hash_mix(base, fnv1a64(protocol_name(p)));
    h = hash_mix(h, fnv1a64(channel_name(kind)));
    h = hash_mix(h, std::bit_cast<std::uint64_t>(strength));
    return h;
}

/// Trains the QNN family once on the clean channel so the sweep evaluates a
/// frozen circuit across strengths; baseline protocols pass through.
inline std::optional<std::vector<double>> sweep_frozen_thetas(const ExperimentConfig& c) {
    if (!is_qnn(c.protocol)) return std::nullopt;
    if (!c.training.train) return c.training.thetas;
    Rng rng(hash_mix(c.seed, fnv1a64("sweep-train")));
    const QnnProtocolConfig qc = make_qnn_config(c);
    std::vector<BatchItem> batch;
    if (c.protocol == Protocol::QnnBb84) {
        batch = bb84_contexts(c.bits, nullptr, rng);
    } else if (c.protocol == Protocol::QnnB92) {
        batch = b92_contexts(c.bits, nullptr, rng);
    } else {
        QrlConfig inner = qc.qrl;
        inner.max_episodes = qc.training.inner_iterations > 0
                                 ? qc.training.inner_iterations
                                 : default_qrl_episodes(qrl_version_of(c.protocol));
        batch = qrl_contexts(qrl_version_of(c.protocol), c.bits, inner, rng);
    }
    const TrainingTrace trace = detail::train_pqc(batch, qc.ansatz, qc.training, rng);
    return trace.best_thetas;
}

/// Full factorial over channel kinds and strengths. Cells run in a worker
/// pool with derived seeds; assembly is index-ordered, so results do not
/// depend on scheduling.
inline SweepResult run_sweep(const ExperimentConfig& c) {
    std::vector<ChannelKind> kinds;
    if (c.sweep_channels.empty())
        kinds.assign(kAllChannelKinds.begin(), kAllChannelKinds.end());
    else
        for (const std::string& name : c.sweep_channels) kinds.push_back(channel_from_name(name));

    const std::vector<double> grid = c.grid.empty() ? default_grid() : c.grid;
    if (grid.empty()) throw std::invalid_argument("run_sweep: empty strength grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] > 1.0)
            throw std::invalid_argument("run_sweep: strengths must lie in [0, 1]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("run_sweep: strengths must be strictly increasing");
    }

    const std::optional<std::vector<double>> frozen = sweep_frozen_thetas(c);

    SweepResult result;
    result.cells.resize(kinds.size() * grid.size());
    parallel_for(result.cells.size(), c.threads, [&](std::size_t i) {
        const ChannelKind kind = kinds[i / grid.size()];
        const double strength = grid[i % grid.size()];
        ExperimentConfig cell = c;
        cell.channel = kind;
        cell.strength = strength;
        cell.seed = sweep_cell_seed(c.seed, c.protocol, kind, strength);
        if (frozen) {
            cell.training.train = false;
            cell.training.thetas = frozen;
        }
        result.cells[i] = SweepCell{c.protocol, kind, strength, cell.seed,
                                    execute_protocol(cell).summary};
    });
    return result;
}

inline void write_sweep_csv(const std::filesystem::path& path, const std::string& meta,
                            const SweepResult& sweep) {
    CsvWriter csv(path, meta,
                  {"protocol", "channel", "strength", "accuracy_mean", "accuracy_std",
                   "qber_sifted_mean", "qber_sifted_std", "qber_all_mean", "qber_all_std",
                   "seed"});
    for (const SweepCell& cell : sweep.cells) {
        csv.row({std::string(protocol_name(cell.protocol)), std::string(channel_name(cell.kind)),
                 format_double(cell.strength), format_double(cell.summary.accuracy.mean),
                 format_double(cell.summary.accuracy.stddev),
                 format_double(cell.summary.qber_sifted.mean),
                 format_double(cell.summary.qber_sifted.stddev),
                 format_double(cell.summary.qber_all.mean),
                 format_double(cell.summary.qber_all.stddev), std::to_string(cell.seed)});
    }
}

// ---------------------------------------------------------------------------
// Convergence trajectories
// ---------------------------------------------------------------------------

struct ConvergenceTrial {
    int trial;
    double theta1;
    int bit;
    EpisodeLog log;
};

inline std::vector<ConvergenceTrial> convergence_trials(QrlVersion v, int trials,
                                                        const QrlConfig& cfg,
                                                        std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("convergence_trials: trials must be >= 1");
    Rng rng(seed);
    std::vector<ConvergenceTrial> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        ConvergenceTrial trial;
        trial.trial = i;
        trial.bit = rng.bit();
        trial.theta1 = rng.uniform(0.0, kPi);
        trial.log = qrl_learn(v, trial.bit, trial.theta1, cfg, rng.child_seed()).log;
        out.push_back(std::move(trial));
    }
    return out;
}

inline void write_convergence_csv(const std::filesystem::path& path, const std::string& meta,
                                  const std::vector<ConvergenceTrial>& trials) {
    CsvWriter csv(path, meta,
                  {"trial", "episode", "n1", "n2", "n3", "theta2", "delta_theta", "p0", "p1",
                   "reward"});
    for (const ConvergenceTrial& t : trials) {
        for (const EpisodeRecord& r : t.log.records) {
            csv.row({std::to_string(t.trial), std::to_string(r.episode), format_double(r.n1),
                     format_double(r.n2), format_double(r.n3), format_double(r.theta2),
                     format_double(r.delta_theta), format_double(r.p0), format_double(r.p1),
                     format_double(r.reward)});
        }
    }
}

inline void write_trace_csv(const std::filesystem::path& path, const std::string& meta,
                            const TrainingTrace& trace) {
    std::vector<std::string> header{"iteration", "loss"};
    const std::size_t d = trace.entries.empty() ? 0 : trace.entries.front().thetas.size();
    for (std::size_t j = 0; j < d; ++j) header.push_back("theta" + std::to_string(j));
    CsvWriter csv(path, meta, header);
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        std::vector<std::string> cells{std::to_string(i), format_double(trace.entries[i].loss)};
        for (double t : trace.entries[i].thetas) cells.push_back(format_double(t));
        csv.row(cells);
    }
}

}  // namespace qkdlab
