#pragma once

// Experiment execution and report emission. Experiments may run on several
// worker threads (each run owns its RNGs and models); rows are written in
// config order regardless of completion order so reruns are byte-identical
// apart from the wall-time column.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tabadv/attacks.hpp"
#include "tabadv/config.hpp"
#include "tabadv/errors.hpp"

namespace tabadv::cli {

using attacks::AttackReport;
using nlohmann::json;

struct RunRecord {
    ExperimentConfig config;
    std::optional<AttackReport> report;  // empty on failure
    std::string error;
    std::string stage;

    bool ok() const { return report.has_value(); }
};

struct RunOutcome {
    std::vector<RunRecord> records;
    bool any_failed = false;

    int exit_code() const { return any_failed ? 1 : 0; }
};

// ---------------------------------------------------------------------------
// JSON serialization; a report embeds its full config so any run can be
// reproduced from the report file alone.
// ---------------------------------------------------------------------------

inline json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dataset_path"] = cfg.dataset_path;
    j["label_column"] = cfg.label_column;
    j["attack"] = to_string(cfg.attack);
    j["victim"] = to_string(cfg.victim);
    j["generator"] = to_string(cfg.generator);
    j["epochs"] = cfg.epochs;
    j["hidden_layers"] = cfg.hidden_layers;
    j["lr"] = cfg.lr;
    j["momentum"] = cfg.momentum;
    j["optimizer"] = to_string(cfg.optimizer);
    j["activation"] = to_string(cfg.activation);
    j["wavelet"] = to_string(cfg.wavelet);
    j["latent_dim"] = cfg.latent_dim;
    j["batch_size"] = cfg.batch_size;
    j["smote"] = to_string(cfg.smote);
    j["smote_k"] = cfg.smote_k;
    j["threshold"] = cfg.threshold;
    j["dt_max_depth"] = cfg.dt_max_depth;
    j["lr_epochs"] = cfg.lr_epochs;
    j["lr_rate"] = cfg.lr_rate;
    j["seed"] = cfg.seed;
    j["chaos_seed"] = cfg.chaos_seed;
    j["deterministic_latent"] = cfg.deterministic_latent;
    j["identity_generator"] = cfg.identity_generator;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.dataset_path = j.at("dataset_path").get<std::string>();
    cfg.label_column = j.at("label_column").get<std::string>();
    cfg.attack = parse_attack(j.at("attack").get<std::string>());
    cfg.victim = parse_victim(j.at("victim").get<std::string>());
    cfg.generator = parse_generator(j.at("generator").get<std::string>());
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
    cfg.lr = j.at("lr").get<double>();
    cfg.momentum = j.at("momentum").get<double>();
    cfg.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    cfg.activation = parse_activation(j.at("activation").get<std::string>());
    cfg.wavelet = parse_wavelet(j.at("wavelet").get<std::string>());
    cfg.latent_dim = j.at("latent_dim").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.smote = parse_smote(j.at("smote").get<std::string>());
    cfg.smote_k = j.at("smote_k").get<std::size_t>();
    cfg.threshold = j.at("threshold").get<double>();
    cfg.dt_max_depth = j.at("dt_max_depth").get<std::size_t>();
    cfg.lr_epochs = j.at("lr_epochs").get<std::size_t>();
    cfg.lr_rate = j.at("lr_rate").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.chaos_seed = j.at("chaos_seed").get<double>();
    cfg.deterministic_latent = j.at("deterministic_latent").get<bool>();
    cfg.identity_generator = j.at("identity_generator").get<bool>();
    return cfg;
}

inline json record_to_json(const RunRecord& rec) {
    json j;
    j["config"] = config_to_json(rec.config);
    j["status"] = rec.ok() ? "ok" : "error";
    if (!rec.ok()) {
        j["error"] = rec.error;
        j["stage"] = rec.stage;
        return j;
    }
    const AttackReport& r = *rec.report;
    j["auc_before"] = r.auc_before;
    j["auc_after"] = r.auc_after;
    j["delta"] = r.delta;
    j["roc_auc_before"] = r.roc_auc_before;
    j["roc_auc_after"] = r.roc_auc_after;
    j["loss_epochs"] = r.loss_epochs;
    j["loss_first"] = r.loss_first;
    j["loss_last"] = r.loss_last;
    j["smote_applied"] = r.smote_applied;
    j["smote_duplication_fallback"] = r.smote_duplication_fallback;
    if (r.eps_mean) {
        j["eps_mean"] = *r.eps_mean;
    } else {
        j["eps_mean"] = nullptr;
    }
    j["wall_time_ms"] = r.wall_time_ms;
    return j;
}

/// Rebuild the exact experiment a report file came from.
inline ExperimentConfig config_from_report_json(const json& report) {
    return config_from_json(report.at("config"));
}

// ---------------------------------------------------------------------------
// CSV summary
// ---------------------------------------------------------------------------

inline const char* kSummaryHeader =
    "dataset,attack,victim,generator,wavelet,activation,latent_dim,epochs,lr,momentum,"
    "optimizer,batch_size,seed,chaos_seed,auc_before,auc_after,delta,roc_auc_before,"
    "roc_auc_after,status,wall_time_ms";

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6f") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace detail

inline std::string summary_row(const RunRecord& rec) {
    const ExperimentConfig& c = rec.config;
    std::string row;
    row += c.dataset_id() + ",";
    row += to_string(c.attack) + ",";
    row += to_string(c.victim) + ",";
    row += to_string(c.generator) + ",";
    row += (vae::is_wnn(c.generator) ? to_string(c.wavelet) : std::string()) + ",";
    row += (vae::is_wnn(c.generator) ? std::string() : to_string(c.activation)) + ",";
    row += std::to_string(c.latent_dim) + ",";
    row += std::to_string(c.epochs) + ",";
    row += detail::fmt(c.lr, "%.17g") + ",";
    row += detail::fmt(c.momentum, "%.17g") + ",";
    row += to_string(c.optimizer) + ",";
    row += std::to_string(c.batch_size) + ",";
    row += std::to_string(c.seed) + ",";
    row += (vae::is_chaotic(c.generator) ? detail::fmt(c.chaos_seed, "%.17g") : std::string()) + ",";
    if (rec.ok()) {
        row += detail::fmt(rec.report->auc_before) + ",";
        row += detail::fmt(rec.report->auc_after) + ",";
        row += detail::fmt(rec.report->delta) + ",";
        row += detail::fmt(rec.report->roc_auc_before) + ",";
        row += detail::fmt(rec.report->roc_auc_after) + ",";
        row += "ok,";
        row += detail::fmt(rec.report->wall_time_ms, "%.1f");
    } else {
        row += ",,,,,error:" + rec.stage + ",";
    }
    return row;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

inline RunRecord run_one(const ExperimentConfig& cfg) {
    RunRecord rec;
    rec.config = cfg;
    try {
        rec.report = attacks::run_attack(cfg);
    } catch (const attacks::StageError& e) {
        rec.error = e.what();
        rec.stage = e.stage;
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.stage = "setup";
    }
    return rec;
}

/// Execute every config and write summary.csv plus run_<index>.json into
/// out_dir. Failures are recorded per experiment; the rest still run.
inline RunOutcome run_experiments(const std::vector<ExperimentConfig>& configs,
                                  const std::string& out_dir, unsigned workers = 1) {
    namespace fs = std::filesystem;
    if (!out_dir.empty()) fs::create_directories(out_dir);

    RunOutcome outcome;
    outcome.records.resize(configs.size());

    if (workers <= 1 || configs.size() <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            outcome.records[i] = run_one(configs[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= configs.size()) return;
                outcome.records[i] = run_one(configs[i]);
            }
        };
        std::vector<std::thread> pool;
        const unsigned count = std::min<unsigned>(workers, static_cast<unsigned>(configs.size()));
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const RunRecord& rec : outcome.records) outcome.any_failed |= !rec.ok();

    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    {
        std::ofstream csv(dir / "summary.csv");
        if (!csv) throw IoError("cannot write " + (dir / "summary.csv").string());
        csv << kSummaryHeader << "\n";
        for (const RunRecord& rec : outcome.records) csv << summary_row(rec) << "\n";
    }
    for (std::size_t i = 0; i < outcome.records.size(); ++i) {
        const fs::path path = dir / ("run_" + std::to_string(i) + ".json");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << record_to_json(outcome.records[i]).dump(2) << "\n";
    }
    return outcome;
}

}  // namespace tabadv::cli
