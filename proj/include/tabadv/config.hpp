#pragma once

// Experiment configuration: a flat key = value file format where any
// hyperparameter key may carry a bracketed list, expanding to the Cartesian
// product of experiments (grid axes expand in file order, first axis
// outermost). Defaults are variant-conditional: wavelet applies to WNN
// generators, activation to MLP generators, chaos_seed to chaotic ones.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tabadv/chaos.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/vae.hpp"
#include "tabadv/wavenet.hpp"

namespace tabadv::cli {

using net::Activation;
using net::OptimizerKind;
using net::WaveletKind;
using vae::GeneratorVariant;

enum class AttackKind { Evasion, Poison };
enum class VictimKind { Lr, Dt };
enum class SmoteMode { On, Off, Auto };

// ---------------------------------------------------------------------------
// Token <-> enum maps (also used by report serialization)
// ---------------------------------------------------------------------------

inline std::string to_string(AttackKind a) { return a == AttackKind::Evasion ? "evasion" : "poison"; }
inline std::string to_string(VictimKind v) { return v == VictimKind::Lr ? "lr" : "dt"; }
inline std::string to_string(SmoteMode m) {
    switch (m) {
        case SmoteMode::On: return "on";
        case SmoteMode::Off: return "off";
        case SmoteMode::Auto: return "auto";
    }
    return "auto";
}
inline std::string to_string(GeneratorVariant g) {
    switch (g) {
        case GeneratorVariant::VaeMlp: return "vae_mlp";
        case GeneratorVariant::VaeWnn: return "vae_wnn";
        case GeneratorVariant::CvaeMlp: return "cvae_mlp";
        case GeneratorVariant::CvaeWnn: return "cvae_wnn";
    }
    return "vae_mlp";
}
inline std::string to_string(WaveletKind w) {
    switch (w) {
        case WaveletKind::Morlet: return "morlet";
        case WaveletKind::Gaussian: return "gaussian";
        case WaveletKind::MexicanHat: return "mexican_hat";
        case WaveletKind::Shannon: return "shannon";
        case WaveletKind::GGW: return "ggw";
    }
    return "morlet";
}
inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "relu";
}
inline std::string to_string(OptimizerKind o) {
    switch (o) {
        case OptimizerKind::SGD: return "sgd";
        case OptimizerKind::Momentum: return "momentum";
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::Adagrad: return "adagrad";
    }
    return "adam";
}

inline AttackKind parse_attack(const std::string& s) {
    if (s == "evasion") return AttackKind::Evasion;
    if (s == "poison") return AttackKind::Poison;
    throw ConfigError("attack: unknown value '" + s + "' (want evasion|poison)");
}
inline VictimKind parse_victim(const std::string& s) {
    if (s == "lr") return VictimKind::Lr;
    if (s == "dt") return VictimKind::Dt;
    throw ConfigError("victim: unknown value '" + s + "' (want lr|dt)");
}
inline SmoteMode parse_smote(const std::string& s) {
    if (s == "on") return SmoteMode::On;
    if (s == "off") return SmoteMode::Off;
    if (s == "auto") return SmoteMode::Auto;
    throw ConfigError("smote: unknown value '" + s + "' (want on|off|auto)");
}
inline GeneratorVariant parse_generator(const std::string& s) {
    if (s == "vae_mlp") return GeneratorVariant::VaeMlp;
    if (s == "vae_wnn") return GeneratorVariant::VaeWnn;
    if (s == "cvae_mlp") return GeneratorVariant::CvaeMlp;
    if (s == "cvae_wnn") return GeneratorVariant::CvaeWnn;
    throw ConfigError("generator: unknown value '" + s +
                      "' (want vae_mlp|vae_wnn|cvae_mlp|cvae_wnn)");
}
inline WaveletKind parse_wavelet(const std::string& s) {
    if (s == "morlet") return WaveletKind::Morlet;
    if (s == "gaussian") return WaveletKind::Gaussian;
    if (s == "mexican_hat") return WaveletKind::MexicanHat;
    if (s == "shannon") return WaveletKind::Shannon;
    if (s == "ggw") return WaveletKind::GGW;
    throw ConfigError("wavelet: unknown value '" + s +
                      "' (want morlet|gaussian|mexican_hat|shannon|ggw)");
}
inline Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::ReLU;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("activation: unknown value '" + s + "' (want relu|tanh)");
}
inline OptimizerKind parse_optimizer(const std::string& s) {
    if (s == "sgd") return OptimizerKind::SGD;
    if (s == "momentum") return OptimizerKind::Momentum;
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "adagrad") return OptimizerKind::Adagrad;
    throw ConfigError("optimizer: unknown value '" + s + "' (want sgd|momentum|adam|adagrad)");
}

// ---------------------------------------------------------------------------
// ExperimentConfig
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string dataset_path;
    std::string label_column;  // empty = last column
    AttackKind attack = AttackKind::Evasion;
    VictimKind victim = VictimKind::Lr;
    GeneratorVariant generator = GeneratorVariant::VaeMlp;

    std::size_t epochs = 200;
    std::vector<std::size_t> hidden_layers{16};
    double lr = 0.01;
    double momentum = 0.01;
    OptimizerKind optimizer = OptimizerKind::Adam;
    Activation activation = Activation::ReLU;  // MLP variants
    WaveletKind wavelet = WaveletKind::Morlet;  // WNN variants
    std::size_t latent_dim = 2;
    std::size_t batch_size = 64;

    SmoteMode smote = SmoteMode::Auto;
    std::size_t smote_k = 5;
    double threshold = 0.5;

    std::size_t dt_max_depth = 8;
    std::size_t lr_epochs = 500;
    double lr_rate = 0.1;

    std::uint64_t seed = 42;
    double chaos_seed = 0.1234;  // chaotic variants
    bool deterministic_latent = false;
    bool identity_generator = false;  // test hook: bypass the VAE entirely

    std::string out_dir = ".";

    std::string dataset_id() const {
        std::string stem = dataset_path;
        if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
            stem = stem.substr(slash + 1);
        if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
        return stem;
    }
};

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.dataset_path.empty()) throw ConfigError("dataset_path is required");
    if (cfg.epochs == 0) throw ConfigError("epochs: must be >= 1");
    if (cfg.hidden_layers.empty()) throw ConfigError("hidden_layers: need at least one layer");
    for (std::size_t h : cfg.hidden_layers)
        if (h == 0) throw ConfigError("hidden_layers: layer width must be >= 1");
    if (!(cfg.lr > 0.0)) throw ConfigError("lr: must be > 0");
    if (cfg.momentum < 0.0) throw ConfigError("momentum: must be >= 0");
    if (cfg.latent_dim == 0) throw ConfigError("latent_dim: must be >= 1");
    if (cfg.batch_size == 0) throw ConfigError("batch_size: must be >= 1");
    if (cfg.smote_k == 0) throw ConfigError("smote_k: must be >= 1");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
        throw ConfigError("threshold: must lie in (0,1)");
    }
    if (cfg.dt_max_depth == 0) throw ConfigError("dt_max_depth: must be >= 1");
    if (!(cfg.lr_rate > 0.0)) throw ConfigError("lr_rate: must be > 0");
    if (vae::is_chaotic(cfg.generator)) {
        try {
            chaos::LogisticMapStream::validate_seed(cfg.chaos_seed);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("chaos_seed: ") + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// Config-file parsing and grid expansion
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& body, const std::string& key) {
    std::vector<std::string> items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(key + ": empty list element");
        items.push_back(item);
    }
    if (items.empty()) throw ConfigError(key + ": empty list");
    return items;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected unsigned integer, got '" + s + "'");
    }
}

inline double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected number, got '" + s + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "on" || s == "1") return true;
    if (s == "false" || s == "off" || s == "0") return false;
    throw ConfigError(key + ": expected true|false, got '" + s + "'");
}

/// hidden_layers values are 'x'-separated widths, e.g. "16x8" = two layers.
inline std::vector<std::size_t> parse_hidden(const std::string& s) {
    std::vector<std::size_t> widths;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, 'x')) {
        widths.push_back(static_cast<std::size_t>(parse_u64("hidden_layers", trim(tok))));
    }
    if (widths.empty()) throw ConfigError("hidden_layers: empty value");
    return widths;
}

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "dataset_path", "label_column", "attack",       "victim",
        "generator",    "epochs",       "hidden_layers", "lr",
        "momentum",     "optimizer",    "activation",   "wavelet",
        "latent_dim",   "batch_size",   "smote",        "smote_k",
        "threshold",    "dt_max_depth", "lr_epochs",    "lr_rate",
        "seed",         "chaos_seed",   "deterministic_latent",
        "identity_generator", "out_dir"};
    return keys;
}

/// Keys that identify a run rather than parameterize it; lists make no sense.
inline bool scalar_only(const std::string& key) {
    return key == "dataset_path" || key == "label_column" || key == "out_dir";
}

inline void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dataset_path") cfg.dataset_path = value;
    else if (key == "label_column") cfg.label_column = value;
    else if (key == "attack") cfg.attack = parse_attack(value);
    else if (key == "victim") cfg.victim = parse_victim(value);
    else if (key == "generator") cfg.generator = parse_generator(value);
    else if (key == "epochs") cfg.epochs = parse_u64(key, value);
    else if (key == "hidden_layers") cfg.hidden_layers = parse_hidden(value);
    else if (key == "lr") cfg.lr = parse_double(key, value);
    else if (key == "momentum") cfg.momentum = parse_double(key, value);
    else if (key == "optimizer") cfg.optimizer = parse_optimizer(value);
    else if (key == "activation") cfg.activation = parse_activation(value);
    else if (key == "wavelet") cfg.wavelet = parse_wavelet(value);
    else if (key == "latent_dim") cfg.latent_dim = parse_u64(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_u64(key, value);
    else if (key == "smote") cfg.smote = parse_smote(value);
    else if (key == "smote_k") cfg.smote_k = parse_u64(key, value);
    else if (key == "threshold") cfg.threshold = parse_double(key, value);
    else if (key == "dt_max_depth") cfg.dt_max_depth = parse_u64(key, value);
    else if (key == "lr_epochs") cfg.lr_epochs = parse_u64(key, value);
    else if (key == "lr_rate") cfg.lr_rate = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "chaos_seed") cfg.chaos_seed = parse_double(key, value);
    else if (key == "deterministic_latent") cfg.deterministic_latent = parse_bool(key, value);
    else if (key == "identity_generator") cfg.identity_generator = parse_bool(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else throw ConfigError("unknown key '" + key + "'");
}

inline void check_compatibility(const ExperimentConfig& cfg,
                                const std::set<std::string>& explicit_keys) {
    const bool wnn = vae::is_wnn(cfg.generator);
    const bool chaotic = vae::is_chaotic(cfg.generator);
    if (explicit_keys.count("wavelet") && !wnn) {
        throw ConfigError("wavelet: only valid for WNN generators, got generator=" +
                          to_string(cfg.generator));
    }
    if (explicit_keys.count("activation") && wnn) {
        throw ConfigError("activation: only valid for MLP generators, got generator=" +
                          to_string(cfg.generator));
    }
    if (explicit_keys.count("chaos_seed") && !chaotic) {
        throw ConfigError("chaos_seed: only valid for chaotic generators, got generator=" +
                          to_string(cfg.generator));
    }
}

}  // namespace detail

/// Parse a config file into the list of experiments it describes. A value in
/// brackets turns its key into a grid axis; the result is the Cartesian
/// product over all axes in file order.
inline std::vector<ExperimentConfig> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> scalars;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::set<std::string> seen, explicit_keys;

    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(stripped.substr(0, eq));
        std::string value = detail::trim(stripped.substr(eq + 1));
        if (!detail::known_keys().count(key)) {
            throw ConfigError("unknown key '" + key + "' at line " + std::to_string(lineno));
        }
        if (seen.count(key)) {
            throw ConfigError("duplicate key '" + key + "' at line " + std::to_string(lineno));
        }
        seen.insert(key);
        explicit_keys.insert(key);

        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') {
                throw ConfigError(key + ": unterminated list at line " + std::to_string(lineno));
            }
            if (detail::scalar_only(key)) {
                throw ConfigError(key + ": does not accept a list");
            }
            axes.emplace_back(key, detail::split_list(value.substr(1, value.size() - 2), key));
        } else {
            scalars[key] = value;
        }
    }

    for (const char* required : {"dataset_path", "attack", "victim", "generator"}) {
        bool present = scalars.count(required) > 0;
        for (const auto& [k, _] : axes) present = present || k == required;
        if (!present) throw ConfigError(std::string("missing required key '") + required + "'");
    }

    std::size_t total = 1;
    for (const auto& [_, values] : axes) total *= values.size();

    std::vector<ExperimentConfig> configs;
    configs.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        ExperimentConfig cfg;
        for (const auto& [key, value] : scalars) detail::apply_key(cfg, key, value);
        // first axis outermost
        std::size_t radix = total;
        for (const auto& [key, values] : axes) {
            radix /= values.size();
            detail::apply_key(cfg, key, values[(index / radix) % values.size()]);
        }
        detail::check_compatibility(cfg, explicit_keys);
        validate(cfg);
        configs.push_back(std::move(cfg));
    }
    return configs;
}

inline std::vector<ExperimentConfig> parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace tabadv::cli
