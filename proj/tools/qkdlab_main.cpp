// Command-line front end: single runs, comparison tables, noise sweeps,
// learner convergence traces, and standalone circuit training. Every command
// writes CSV data plus a JSON manifest into --out and is reproducible from
// (config, seed).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdlab/experiment.hpp"

namespace fs = std::filesystem;
using namespace qkdlab;

namespace {

struct CliOptions {
    std::string config_path;
    std::string protocol;
    std::string protocols;  // table: comma list
    int bits = -1;
    int samples = -1;
    int shots = -1;
    std::string channel;
    double strength = -1.0;
    std::string grid;
    std::string mode;
    std::string b92_mode;
    std::string qber_def;
    std::string out_dir;
    std::int64_t seed = -1;
    int trials = -1;
    int threads = -1;
    bool eve = false;
    bool no_train = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        // start:stop:step
        const auto parts = split_list([&] {
            std::string s = spec;
            for (char& c : s)
                if (c == ':') c = ',';
            return s;
        }());
        if (parts.size() != 3) throw CLI::ValidationError("--grid", "expected start:stop:step");
        const double start = std::stod(parts[0]);
        const double stop = std::stod(parts[1]);
        const double step = std::stod(parts[2]);
        if (step <= 0.0) throw CLI::ValidationError("--grid", "step must be positive");
        for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v < 1e-15 ? 0.0 : v);
    } else {
        for (const std::string& item : split_list(spec)) grid.push_back(std::stod(item));
    }
    return grid;
}

ExperimentConfig build_config(const CliOptions& o, CLI::App* cmd) {
    ExperimentConfig c;
    if (cmd->count("--config")) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot read config file: " + o.config_path);
        nlohmann::json j;
        in >> j;
        c = config_from_json(j);
    }
    if (cmd->count("--protocol")) c.protocol = protocol_from_name(o.protocol);
    if (cmd->count("--bits")) c.bits = o.bits;
    if (cmd->count("--samples")) c.samples = o.samples;
    if (cmd->count("--shots")) c.shots = o.shots;
    if (cmd->count("--channel")) {
        if (o.channel == "none")
            c.channel.reset();
        else
            c.channel = channel_from_name(o.channel);
    }
    if (cmd->count("--strength")) c.strength = o.strength;
    if (cmd->count("--grid")) c.grid = parse_grid(o.grid);
    if (cmd->count("--seed")) c.seed = static_cast<std::uint64_t>(o.seed);
    if (cmd->count("--mode")) c.mode = prob_mode_from_name(o.mode);
    if (cmd->count("--b92-mode")) c.b92_mode = b92_mode_from_name(o.b92_mode);
    if (cmd->count("--qber-def")) {
        if (o.qber_def != "sifted" && o.qber_def != "all")
            throw CLI::ValidationError("--qber-def", "expected sifted or all");
        c.qber_def = o.qber_def;
    }
    if (cmd->count("--out")) c.out_dir = o.out_dir;
    if (cmd->count("--threads")) c.threads = o.threads;
    if (cmd->count("--eve")) c.eve = true;
    if (cmd->count("--no-train")) c.training.train = false;
    return c;
}

void add_common_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its fields");
    cmd->add_option("--protocol", o.protocol, "bb84|b92|qrl-v1|qrl-v2|qnn-bb84|qnn-b92|qnn-qrl-v1|qnn-qrl-v2");
    cmd->add_option("--bits", o.bits, "key bits per sample");
    cmd->add_option("--samples", o.samples, "evaluation repetitions");
    cmd->add_option("--shots", o.shots, "measurement shots per bit");
    cmd->add_option("--channel", o.channel, "noise channel kind or 'none'");
    cmd->add_option("--strength", o.strength, "channel strength in [0,1]");
    cmd->add_option("--grid", o.grid, "sweep strengths: comma list or start:stop:step");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--mode", o.mode, "exact|sampled bit decisions");
    cmd->add_option("--b92-mode", o.b92_mode, "paper|standard sifting");
    cmd->add_option("--qber-def", o.qber_def, "sifted|all for displayed QBER");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads for sweeps (0 = auto)");
    cmd->add_flag("--eve", o.eve, "enable the intercept-resend attacker (bb84)");
    cmd->add_flag("--no-train", o.no_train, "freeze the trainable circuit at given/zero angles");
}

void print_summary(const MetricsSummary& s, const std::string& qber_def) {
    std::cout << "accuracy  " << format_mean_std(s.accuracy) << "\n"
              << "precision " << format_mean_std(s.precision) << "\n"
              << "recall    " << format_mean_std(s.recall) << "\n"
              << "f1        " << format_mean_std(s.f1) << "\n"
              << "qber(" << qber_def << ") "
              << format_mean_std(qber_def == "sifted" ? s.qber_sifted : s.qber_all) << "\n";
}

int cmd_run(const ExperimentConfig& c) {
    const RunResultFiles r = run_single(c);
    std::cout << "protocol " << protocol_name(c.protocol) << ", " << c.samples << " samples, "
              << c.bits << " bits\n";
    print_summary(r.output.summary, c.qber_def);
    if (r.roc.auc_defined)
        std::cout << "auc       " << format_double(r.roc.auc) << "\n";
    std::cout << "artifacts in " << c.out_dir << "\n";
    return 0;
}

int cmd_table(const ExperimentConfig& base, const std::string& protocols_csv) {
    std::vector<ExperimentConfig> configs;
    std::vector<std::string> names = protocols_csv.empty()
                                         ? std::vector<std::string>{}
                                         : split_list(protocols_csv);
    if (names.empty())
        for (Protocol p : kAllProtocols) names.emplace_back(protocol_name(p));
    for (const std::string& name : names) {
        ExperimentConfig c = base;
        c.protocol = protocol_from_name(name);
        configs.push_back(c);
    }
    const std::vector<TableRow> rows = run_table(configs);

    fs::create_directories(base.out_dir);
    write_table_csv(fs::path(base.out_dir) / "table.csv", csv_meta(base), rows);
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = "table";
    manifest["config"] = config_to_json(base);
    manifest["config_hash"] = config_hash_hex(base);
    manifest["protocols"] = names;
    nlohmann::json summaries = nlohmann::json::array();
    for (const TableRow& r : rows) {
        nlohmann::json row = io::summary_json(r.summary);
        row["protocol"] = std::string(protocol_name(r.protocol));
        summaries.push_back(row);
    }
    manifest["rows"] = summaries;
    manifest["outputs"] = {"table.csv"};
    io::write_json(fs::path(base.out_dir) / "manifest.json", manifest);

    std::cout << format_table(rows, base.qber_def);
    std::cout << "artifacts in " << base.out_dir << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& c) {
    const SweepResult sweep = run_sweep(c);
    fs::create_directories(c.out_dir);
    write_sweep_csv(fs::path(c.out_dir) / "sweep.csv", csv_meta(c), sweep);
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = "sweep";
    manifest["config"] = config_to_json(c);
    manifest["config_hash"] = config_hash_hex(c);
    manifest["cells"] = sweep.cells.size();
    manifest["outputs"] = {"sweep.csv"};
    io::write_json(fs::path(c.out_dir) / "manifest.json", manifest);
    std::cout << "swept " << sweep.cells.size() << " cells for " << protocol_name(c.protocol)
              << "; artifacts in " << c.out_dir << "\n";
    return 0;
}

int cmd_converge(const ExperimentConfig& c, int trials) {
    const QrlVersion v = qrl_version_of(c.protocol);
    QrlConfig cfg = make_qrl_config(c, v, nullptr);
    const auto trials_log = convergence_trials(v, trials, cfg, c.seed);
    fs::create_directories(c.out_dir);
    write_convergence_csv(fs::path(c.out_dir) / "trajectories.csv", csv_meta(c), trials_log);
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = "converge";
    manifest["config"] = config_to_json(c);
    manifest["config_hash"] = config_hash_hex(c);
    manifest["trials"] = trials;
    manifest["outputs"] = {"trajectories.csv"};
    io::write_json(fs::path(c.out_dir) / "manifest.json", manifest);
    std::cout << "wrote " << trials << " trajectories for " << protocol_name(c.protocol)
              << " to " << c.out_dir << "\n";
    return 0;
}

int cmd_train(const ExperimentConfig& c) {
    if (!is_qnn(c.protocol))
        throw std::invalid_argument("train: protocol must be one of the qnn variants");
    const QnnProtocolConfig qc = make_qnn_config(c);
    Rng rng(hash_mix(c.seed, fnv1a64("train")));
    std::vector<BatchItem> batch;
    if (c.protocol == Protocol::QnnBb84) {
        std::optional<KrausChannel> ch;
        if (c.channel) ch.emplace(build_channel(*c.channel, c.strength));
        batch = bb84_contexts(c.bits, ch ? &*ch : nullptr, rng);
    } else if (c.protocol == Protocol::QnnB92) {
        std::optional<KrausChannel> ch;
        if (c.channel) ch.emplace(build_channel(*c.channel, c.strength));
        batch = b92_contexts(c.bits, ch ? &*ch : nullptr, rng);
    } else {
        std::optional<KrausChannel> ch;
        if (c.channel) ch.emplace(build_channel(*c.channel, c.strength));
        QrlConfig inner = qc.qrl;
        inner.channel = ch ? &*ch : nullptr;
        inner.max_episodes = qc.training.inner_iterations > 0
                                 ? qc.training.inner_iterations
                                 : default_qrl_episodes(qrl_version_of(c.protocol));
        batch = qrl_contexts(qrl_version_of(c.protocol), c.bits, inner, rng);
    }
    const TrainingTrace trace = detail::train_pqc(batch, qc.ansatz, qc.training, rng);

    fs::create_directories(c.out_dir);
    write_trace_csv(fs::path(c.out_dir) / "trace.csv", csv_meta(c), trace);
    nlohmann::json params;
    params["thetas"] = trace.best_thetas;
    params["loss"] = trace.best_loss;
    params["layers"] = c.training.layers;
    io::write_json(fs::path(c.out_dir) / "params.json", params);
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = "train";
    manifest["config"] = config_to_json(c);
    manifest["config_hash"] = config_hash_hex(c);
    manifest["best_loss"] = trace.best_loss;
    manifest["outputs"] = {"trace.csv", "params.json"};
    io::write_json(fs::path(c.out_dir) / "manifest.json", manifest);
    std::cout << "best loss " << format_double(trace.best_loss) << " after "
              << trace.entries.size() << " evaluations; artifacts in " << c.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum key distribution protocol laboratory"};
    app.require_subcommand(1);

    CliOptions o;
    CLI::App* run = app.add_subcommand("run", "run one protocol configuration");
    CLI::App* table = app.add_subcommand("table", "compare protocols side by side");
    CLI::App* sweep = app.add_subcommand("sweep", "accuracy versus channel strength");
    CLI::App* converge = app.add_subcommand("converge", "emit learner trajectories");
    CLI::App* train = app.add_subcommand("train", "train the circuit and dump the trace");
    for (CLI::App* cmd : {run, table, sweep, converge, train}) add_common_options(cmd, o);
    table->add_option("--protocols", o.protocols, "comma list (default: all eight)");
    converge->add_option("--trials", o.trials, "trajectory count");

    std::string sweep_channels;
    sweep->add_option("--sweep-channels", sweep_channels,
                      "comma list of channel kinds (default: all six)");

    try {
        app.parse(argc, argv);
        CLI::App* active = run->parsed() ? run
                           : table->parsed() ? table
                           : sweep->parsed() ? sweep
                           : converge->parsed() ? converge
                                                : train;
        ExperimentConfig c = build_config(o, active);
        if (sweep->parsed() && sweep->count("--sweep-channels"))
            c.sweep_channels = split_list(sweep_channels);
        if (run->parsed()) return cmd_run(c);
        if (table->parsed()) return cmd_table(c, table->count("--protocols") ? o.protocols : "");
        if (sweep->parsed()) return cmd_sweep(c);
        if (converge->parsed()) return cmd_converge(c, converge->count("--trials") ? o.trials : 10);
        return cmd_train(c);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
