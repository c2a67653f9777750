#pragma once

// End-to-end white-box attacks. Both pipelines share the preprocessing spine
// (stratified 70:30 split, min-max scale fitted on train, optional SMOTE on
// train) and the generator training stage; they differ in which partition is
// perturbed and where the after-attack AUC is measured:
//
//   evasion: victim keeps its clean training; the test set is replaced by its
//            VAE reconstruction and the victim is re-evaluated on it.
//   poison:  the training set is replaced by its VAE reconstruction (labels
//            kept); the victim is retrained from scratch on it and evaluated
//            on the untouched test set.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/config.hpp"
#include "tabadv/dataprep.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/metrics.hpp"
#include "tabadv/vae.hpp"
#include "tabadv/victims.hpp"

namespace tabadv::attacks {

using cli::AttackKind;
using cli::ExperimentConfig;
using cli::VictimKind;
using data::Dataset;
using num::Matrix;

/// Error annotated with the pipeline stage that raised it.
struct StageError : Error {
    StageError(std::string stage_name, const std::string& msg)
        : Error("stage=" + stage_name + ": " + msg), stage(std::move(stage_name)) {}
    std::string stage;
};

namespace detail {

template <typename F>
auto run_stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace detail

struct AttackReport {
    ExperimentConfig config;

    double auc_before = 0.0;
    double auc_after = 0.0;
    double delta = 0.0;  // auc_before - auc_after
    double roc_auc_before = 0.0;
    double roc_auc_after = 0.0;

    std::size_t loss_epochs = 0;
    double loss_first = 0.0;
    double loss_last = 0.0;

    bool smote_applied = false;
    bool smote_duplication_fallback = false;
    std::optional<double> eps_mean;  // chaotic runs only

    double wall_time_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Victim plumbing
// ---------------------------------------------------------------------------

struct VictimModel {
    VictimKind kind = VictimKind::Lr;
    victims::LogisticModel lr;
    std::unique_ptr<victims::TreeNode> dt;
};

/// Always trains from fresh parameters; there is no warm-start path.
inline VictimModel train_victim(const ExperimentConfig& cfg, const Dataset& train) {
    VictimModel v;
    v.kind = cfg.victim;
    if (cfg.victim == VictimKind::Lr) {
        v.lr = victims::train_lr(train, cfg.lr_epochs, cfg.lr_rate);
    } else {
        v.dt = victims::train_dt(train, victims::DtConfig{cfg.dt_max_depth, 2});
    }
    return v;
}

inline std::vector<double> victim_proba(const VictimModel& v, const Matrix& x) {
    if (v.kind == VictimKind::Lr) return victims::predict_proba_lr(v.lr, x);
    return victims::predict_dt(*v.dt, x).probabilities;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace detail {

struct Prepared {
    Dataset train, test;
    bool smote_applied = false;
    bool smote_duplication = false;
};

inline Prepared prepare(const ExperimentConfig& cfg, num::RngState& seeds) {
    const std::uint64_t split_seed = seeds.next_u64();
    const std::uint64_t smote_seed = seeds.next_u64();

    Dataset raw = run_stage("load", [&] { return data::load_csv(cfg.dataset_path, cfg.label_column); });
    auto [train, test] = run_stage("split", [&] { return data::stratified_split(raw, 0.7, split_seed); });

    run_stage("scale", [&] {
        const data::ScalerParams scaler = data::fit_minmax(train);
        train = data::apply_minmax(train, scaler);
        test = data::apply_minmax(test, scaler);
        return 0;
    });

    Prepared out;
    const bool want_smote = run_stage("smote", [&] {
        if (cfg.smote == cli::SmoteMode::Off) return false;
        if (cfg.smote == cli::SmoteMode::On) return true;
        const auto zeros = data::class_indices(train, 0);
        const auto ones = data::class_indices(train, 1);
        const double lo = static_cast<double>(std::min(zeros.size(), ones.size()));
        const double hi = static_cast<double>(std::max(zeros.size(), ones.size()));
        return lo / hi < 0.8;
    });
    if (want_smote) {
        data::SmoteResult res =
            run_stage("smote", [&] { return data::smote(train, cfg.smote_k, smote_seed); });
        train = std::move(res.dataset);
        out.smote_applied = res.applied;
        out.smote_duplication = res.duplication_fallback;
    }
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

struct TrainedGenerator {
    std::optional<vae::VaeModel> model;  // empty for the identity hook
    std::vector<double> loss_history;
};

inline TrainedGenerator train_generator(const ExperimentConfig& cfg, const Dataset& train,
                                        vae::NoiseState& noise, std::uint64_t init_seed,
                                        std::uint64_t shuffle_seed) {
    TrainedGenerator out;
    if (cfg.identity_generator) return out;

    vae::VaeArchitecture arch;
    arch.variant = cfg.generator;
    arch.feature_count = train.f();
    arch.hidden = cfg.hidden_layers;
    arch.latent_dim = cfg.latent_dim;
    arch.activation = cfg.activation;
    arch.wavelet = cfg.wavelet;

    num::RngState init_rng(init_seed);
    out.model = vae::build_vae(arch, init_rng);

    vae::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.lr = cfg.lr;
    tc.momentum = cfg.momentum;
    tc.optimizer = cfg.optimizer;
    tc.batch_size = cfg.batch_size;
    tc.shuffle_seed = shuffle_seed;
    out.loss_history = vae::train(*out.model, train, tc, noise);
    return out;
}

inline Dataset generate_adversarial(const ExperimentConfig& cfg, const TrainedGenerator& gen,
                                    const Dataset& source, vae::NoiseState& noise) {
    if (cfg.identity_generator) return source;
    return vae::generate(*gen.model, source, noise, cfg.deterministic_latent);
}

}  // namespace detail

inline AttackReport run_attack(const ExperimentConfig& cfg) {
    cli::validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    // Deterministic sub-seed layout: split, smote, init, shuffle, noise.
    num::RngState seeds(cfg.seed);
    detail::Prepared prep = detail::prepare(cfg, seeds);
    const std::uint64_t init_seed = seeds.next_u64();
    const std::uint64_t shuffle_seed = seeds.next_u64();
    const std::uint64_t noise_seed = seeds.next_u64();

    AttackReport report;
    report.config = cfg;
    report.smote_applied = prep.smote_applied;
    report.smote_duplication_fallback = prep.smote_duplication;

    const VictimModel victim =
        detail::run_stage("victim_train", [&] { return train_victim(cfg, prep.train); });

    const auto probs_before = victim_proba(victim, prep.test.features);
    report.auc_before =
        metrics::auc(metrics::confusion(prep.test.labels, probs_before, cfg.threshold));
    report.roc_auc_before = metrics::roc_auc(prep.test.labels, probs_before);

    // The partition the attack must not touch: train for evasion (the victim
    // already consumed it), test for poisoning (it stays the clean yardstick).
    const bool evasion = cfg.attack == AttackKind::Evasion;
    const Dataset& protected_part = evasion ? prep.train : prep.test;
    const std::uint64_t protected_sum = data::checksum(protected_part);

    vae::NoiseState noise = vae::is_chaotic(cfg.generator)
                                ? vae::NoiseState::chaotic(cfg.chaos_seed)
                                : vae::NoiseState::gaussian(noise_seed);

    const detail::TrainedGenerator gen = detail::run_stage("generator_train", [&] {
        return detail::train_generator(cfg, prep.train, noise, init_seed, shuffle_seed);
    });
    report.loss_epochs = gen.loss_history.size();
    if (!gen.loss_history.empty()) {
        report.loss_first = gen.loss_history.front();
        report.loss_last = gen.loss_history.back();
    }

    const Dataset& source = evasion ? prep.test : prep.train;
    const Dataset adversarial = detail::run_stage(
        "generate", [&] { return detail::generate_adversarial(cfg, gen, source, noise); });

    detail::run_stage("evaluate", [&] {
        if (evasion) {
            const auto probs_after = victim_proba(victim, adversarial.features);
            report.auc_after = metrics::auc(
                metrics::confusion(prep.test.labels, probs_after, cfg.threshold));
            report.roc_auc_after = metrics::roc_auc(prep.test.labels, probs_after);
        } else {
            Dataset poisoned = adversarial;        // features from the generator,
            poisoned.labels = prep.train.labels;   // labels from the original train rows
            const VictimModel retrained = train_victim(cfg, poisoned);
            const auto probs_after = victim_proba(retrained, prep.test.features);
            report.auc_after = metrics::auc(
                metrics::confusion(prep.test.labels, probs_after, cfg.threshold));
            report.roc_auc_after = metrics::roc_auc(prep.test.labels, probs_after);
        }
        return 0;
    });

    if (data::checksum(protected_part) != protected_sum) {
        throw StageError("evaluate", evasion ? "training partition mutated after victim training"
                                             : "test partition mutated by poisoning pipeline");
    }

    report.delta = report.auc_before - report.auc_after;
    report.eps_mean = noise.chaotic_mean();
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// Algorithm: train victim on clean train, generate X' from the test set,
/// re-evaluate the same victim on (X' features, original test labels).
inline AttackReport run_evasion(const ExperimentConfig& cfg) {
    if (cfg.attack != AttackKind::Evasion) {
        ExperimentConfig c = cfg;
        c.attack = AttackKind::Evasion;
        return run_attack(c);
    }
    return run_attack(cfg);
}

/// Algorithm: generate X' from the train set, retrain the victim from scratch
/// on (X' features, original train labels), evaluate on the clean test set.
inline AttackReport run_poison(const ExperimentConfig& cfg) {
    if (cfg.attack != AttackKind::Poison) {
        ExperimentConfig c = cfg;
        c.attack = AttackKind::Poison;
        return run_attack(c);
    }
    return run_attack(cfg);
}

}  // namespace tabadv::attacks
