#pragma once

// The four generator variants: VAE-MLP, VAE-Deep-WNN and their chaotic
// counterparts C-VAE-MLP, C-VAE-Deep-WNN. They share one architecture --
// encoder network, mu / log-variance heads, decoder ending in a sigmoid
// layer -- and differ in the hidden-layer family (dense vs wavelet) and in
// where the latent noise epsilon comes from (Gaussian vs logistic map).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tabadv/chaos.hpp"
#include "tabadv/dataprep.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/numkernel.hpp"
#include "tabadv/wavenet.hpp"

namespace tabadv::vae {

using data::Dataset;
using num::Matrix;
using num::RngState;
using net::Activation;
using net::DenseLayer;
using net::Network;
using net::OptimizerKind;
using net::WaveletKind;

enum class NoiseSource { Gaussian, Chaotic };
enum class GeneratorVariant { VaeMlp, VaeWnn, CvaeMlp, CvaeWnn };

inline bool is_wnn(GeneratorVariant v) {
    return v == GeneratorVariant::VaeWnn || v == GeneratorVariant::CvaeWnn;
}
inline bool is_chaotic(GeneratorVariant v) {
    return v == GeneratorVariant::CvaeMlp || v == GeneratorVariant::CvaeWnn;
}
inline NoiseSource noise_source_of(GeneratorVariant v) {
    return is_chaotic(v) ? NoiseSource::Chaotic : NoiseSource::Gaussian;
}

// ---------------------------------------------------------------------------
// Noise plumbing: one state per experiment run, consumed row-major in draw
// order by training and then by generation.
// ---------------------------------------------------------------------------

class NoiseState {
public:
    static NoiseState gaussian(std::uint64_t seed) {
        NoiseState s;
        s.kind_ = NoiseSource::Gaussian;
        s.gauss_.emplace(seed);
        return s;
    }

    static NoiseState chaotic(double chaos_seed) {
        NoiseState s;
        s.kind_ = NoiseSource::Chaotic;
        s.chaos_.emplace(chaos_seed);
        return s;
    }

    NoiseSource kind() const { return kind_; }

    Matrix draw(std::size_t rows, std::size_t cols) {
        Matrix eps(rows, cols);
        if (kind_ == NoiseSource::Gaussian) {
            for (double& v : eps.values()) v = gauss_->next_normal();
        } else {
            for (double& v : eps.values()) v = chaos_->next();
        }
        return eps;
    }

    /// Mean of every chaotic epsilon drawn so far; reported because the raw
    /// logistic-map values live in (0,1) rather than being zero-centered.
    std::optional<double> chaotic_mean() const {
        if (kind_ != NoiseSource::Chaotic || chaos_->drawn_count() == 0) return std::nullopt;
        return chaos_->drawn_mean();
    }

private:
    NoiseState() = default;
    NoiseSource kind_ = NoiseSource::Gaussian;
    std::optional<RngState> gauss_;
    std::optional<chaos::LogisticMapStream> chaos_;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct VaeModel {
    Network encoder;
    DenseLayer mu_head;      // identity activation
    DenseLayer logvar_head;  // identity activation
    Network decoder;         // final layer is dense sigmoid sized f
    std::size_t latent_dim = 0;
    NoiseSource noise_source = NoiseSource::Gaussian;
    GeneratorVariant variant = GeneratorVariant::VaeMlp;

    std::size_t feature_count() const { return encoder.input_width(); }
};

struct VaeArchitecture {
    GeneratorVariant variant = GeneratorVariant::VaeMlp;
    std::size_t feature_count = 0;
    std::vector<std::size_t> hidden;  // encoder widths; decoder mirrors them
    std::size_t latent_dim = 2;
    Activation activation = Activation::ReLU;            // MLP variants
    WaveletKind wavelet = WaveletKind::Morlet;            // WNN variants
};

/// Parameter draw order is fixed (encoder, mu head, logvar head, decoder) so a
/// seed fully determines the model.
inline VaeModel build_vae(const VaeArchitecture& arch, RngState& rng) {
    if (arch.feature_count == 0) throw ConfigError("feature_count must be >= 1");
    if (arch.latent_dim == 0) throw ConfigError("latent_dim must be >= 1");
    if (arch.hidden.empty()) throw ConfigError("need at least one hidden layer");

    const bool wnn = is_wnn(arch.variant);
    VaeModel model;
    model.latent_dim = arch.latent_dim;
    model.noise_source = noise_source_of(arch.variant);
    model.variant = arch.variant;

    std::vector<net::Layer> enc;
    std::size_t in = arch.feature_count;
    for (std::size_t h : arch.hidden) {
        if (wnn)
            enc.emplace_back(net::init_wavelet(h, in, arch.wavelet, rng));
        else
            enc.emplace_back(net::init_dense(h, in, arch.activation, rng));
        in = h;
    }
    model.encoder = Network(std::move(enc));

    model.mu_head = net::init_dense(arch.latent_dim, in, Activation::Identity, rng);
    model.logvar_head = net::init_dense(arch.latent_dim, in, Activation::Identity, rng);

    std::vector<net::Layer> dec;
    in = arch.latent_dim;
    for (auto it = arch.hidden.rbegin(); it != arch.hidden.rend(); ++it) {
        if (wnn)
            dec.emplace_back(net::init_wavelet(*it, in, arch.wavelet, rng));
        else
            dec.emplace_back(net::init_dense(*it, in, arch.activation, rng));
        in = *it;
    }
    dec.emplace_back(net::init_dense(arch.feature_count, in, Activation::Sigmoid, rng));
    model.decoder = Network(std::move(dec));
    return model;
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

struct EncodeResult {
    Matrix mu, logvar;
};

/// Per-row mu and log sigma^2, each latent_dim wide. Cache-free.
inline EncodeResult encode(const VaeModel& model, const Matrix& x) {
    const Matrix h = model.encoder.forward_pure(x);
    return {net::dense_forward(model.mu_head, h, nullptr),
            net::dense_forward(model.logvar_head, h, nullptr)};
}

/// z = mu + exp(logvar / 2) * eps, elementwise.
inline Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps) {
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.rows() != eps.rows() ||
        mu.cols() != eps.cols()) {
        throw ShapeError("reparameterize shapes differ: mu " + mu.shape_string() + ", logvar " +
                         logvar.shape_string() + ", eps " + eps.shape_string());
    }
    Matrix z(mu.rows(), mu.cols());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z.values()[i] =
            mu.values()[i] + std::exp(0.5 * logvar.values()[i]) * eps.values()[i];
    }
    return z;
}

struct LossBreakdown {
    double recon = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

/// recon: batch mean of the per-row summed squared error. kl: batch mean of
/// the closed-form Gaussian KL to the standard normal prior. This is the
/// negated ELBO, so training minimizes it.
inline LossBreakdown vae_loss(const Matrix& x, const Matrix& x_hat, const Matrix& mu,
                              const Matrix& logvar) {
    if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
        throw ShapeError("vae_loss: x " + x.shape_string() + " vs x_hat " + x_hat.shape_string());
    }
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.rows() != x.rows()) {
        throw ShapeError("vae_loss: mu " + mu.shape_string() + " vs logvar " +
                         logvar.shape_string());
    }
    if (!x.all_finite() || !x_hat.all_finite() || !mu.all_finite() || !logvar.all_finite()) {
        throw NumericError("vae_loss: non-finite input");
    }
    const double batch = static_cast<double>(x.rows());
    double recon = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.values()[i] - x_hat.values()[i];
        recon += d * d;
    }
    recon /= batch;

    // 0.5 * (mu^2 + e^lv - 1 - lv) per dimension; expm1 keeps the small-lv
    // regime from cancelling below zero.
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double m = mu.values()[i];
        const double lv = logvar.values()[i];
        kl += 0.5 * (m * m + std::expm1(lv) - lv);
    }
    kl /= batch;
    if (kl < 0.0) kl = 0.0;

    LossBreakdown out{recon, kl, recon + kl};
    if (!std::isfinite(out.total)) throw NumericError("vae_loss: non-finite loss");
    return out;
}

// ---------------------------------------------------------------------------
// Full-model forward/backward for training
// ---------------------------------------------------------------------------

namespace detail {

struct ForwardPass {
    net::LayerCache mu_cache, logvar_cache;
    Matrix mu, logvar, eps, z, x_hat;
};

inline ForwardPass forward_train(VaeModel& model, const Matrix& x, Matrix eps) {
    ForwardPass fp;
    const Matrix h = model.encoder.forward(x);
    fp.mu = net::dense_forward(model.mu_head, h, &fp.mu_cache);
    fp.logvar = net::dense_forward(model.logvar_head, h, &fp.logvar_cache);
    fp.eps = std::move(eps);
    fp.z = reparameterize(fp.mu, fp.logvar, fp.eps);
    fp.x_hat = model.decoder.forward(fp.z);
    return fp;
}

struct BackwardResult {
    net::NetworkGrads encoder, decoder;
    net::DenseGrads mu_head, logvar_head;
};

/// Gradients of vae_loss wrt every parameter, given the cached forward pass.
inline BackwardResult backward_train(VaeModel& model, const Matrix& x, const ForwardPass& fp) {
    const double batch = static_cast<double>(x.rows());
    BackwardResult out;

    Matrix d_xhat(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        d_xhat.values()[i] = 2.0 * (fp.x_hat.values()[i] - x.values()[i]) / batch;
    }
    out.decoder = model.decoder.backward(d_xhat);
    const Matrix& dz = out.decoder.input;

    Matrix d_mu(fp.mu.rows(), fp.mu.cols());
    Matrix d_logvar(fp.mu.rows(), fp.mu.cols());
    for (std::size_t i = 0; i < fp.mu.size(); ++i) {
        const double lv = fp.logvar.values()[i];
        const double sigma = std::exp(0.5 * lv);
        d_mu.values()[i] = dz.values()[i] + fp.mu.values()[i] / batch;
        d_logvar.values()[i] = dz.values()[i] * fp.eps.values()[i] * 0.5 * sigma +
                               0.5 * std::expm1(lv) / batch;
    }

    Matrix dh_mu, dh_lv;
    out.mu_head = net::dense_backward(model.mu_head, fp.mu_cache, d_mu, &dh_mu);
    out.logvar_head = net::dense_backward(model.logvar_head, fp.logvar_cache, d_logvar, &dh_lv);
    for (std::size_t i = 0; i < dh_mu.size(); ++i) dh_mu.values()[i] += dh_lv.values()[i];
    out.encoder = model.encoder.backward(dh_mu);
    return out;
}

inline std::vector<net::ParamView> all_param_views(VaeModel& model) {
    std::vector<net::ParamView> views = net::param_views(model.encoder);
    for (auto v : net::param_views(model.mu_head)) views.push_back(v);
    for (auto v : net::param_views(model.logvar_head)) views.push_back(v);
    for (auto v : net::param_views(model.decoder)) views.push_back(v);
    return views;
}

inline std::vector<std::span<const double>> all_grad_views(const BackwardResult& grads) {
    std::vector<std::span<const double>> views = net::grad_views(grads.encoder);
    net::collect_grad_views(grads.mu_head, views);
    net::collect_grad_views(grads.logvar_head, views);
    for (auto v : net::grad_views(grads.decoder)) views.push_back(v);
    return views;
}

inline void scale_network_grads(net::NetworkGrads& grads, double factor) {
    for (net::LayerGrads& lg : grads.layers) {
        if (auto* d = std::get_if<net::DenseGrads>(&lg)) {
            for (double& v : d->weights.values()) v *= factor;
            for (double& v : d->bias) v *= factor;
        } else {
            auto& w = std::get<net::WaveletGrads>(lg);
            for (double& v : w.weights.values()) v *= factor;
            for (double& v : w.translation) v *= factor;
            for (double& v : w.dilation) v *= factor;
        }
    }
}

/// Global-norm gradient clipping. The exp(logvar) term can spike the KL
/// gradient arbitrarily hard right after N(0,1) initialization; capping the
/// step direction keeps plain SGD from diverging on the first batches while
/// leaving the loss and the optimizer update rules untouched.
inline void clip_grad_norm(BackwardResult& grads, double max_norm) {
    double sq = 0.0;
    for (auto view : all_grad_views(grads)) {
        for (double v : view) sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (!(norm > max_norm)) return;
    const double factor = max_norm / norm;
    scale_network_grads(grads.encoder, factor);
    scale_network_grads(grads.decoder, factor);
    for (double& v : grads.mu_head.weights.values()) v *= factor;
    for (double& v : grads.mu_head.bias) v *= factor;
    for (double& v : grads.logvar_head.weights.values()) v *= factor;
    for (double& v : grads.logvar_head.bias) v *= factor;
}

}  // namespace detail

/// One optimizer step on a single batch; returns the loss before the step.
/// Exposed for tests; train() loops over this.
inline LossBreakdown train_step(VaeModel& model, const Matrix& x, const Matrix& eps,
                                net::OptimizerState& opt, double max_grad_norm = 0.0) {
    detail::ForwardPass fp = detail::forward_train(model, x, eps);
    const LossBreakdown loss = vae_loss(x, fp.x_hat, fp.mu, fp.logvar);
    detail::BackwardResult grads = detail::backward_train(model, x, fp);
    if (max_grad_norm > 0.0) detail::clip_grad_norm(grads, max_grad_norm);
    auto params = detail::all_param_views(model);
    opt.step(params, detail::all_grad_views(grads));
    return loss;
}

struct TrainConfig {
    std::size_t epochs = 200;
    double lr = 0.01;
    double momentum = 0.01;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::size_t batch_size = 64;
    std::uint64_t shuffle_seed = 0;
    double max_grad_norm = 5.0;  // 0 disables clipping
};

/// Per epoch: shuffle rows, then per minibatch encode, draw epsilon from the
/// variant's noise source, reparameterize, decode, compute the loss and step
/// the optimizer. Returns the per-epoch mean total loss.
inline std::vector<double> train(VaeModel& model, const Dataset& x_train, const TrainConfig& cfg,
                                 NoiseState& noise) {
    if (cfg.epochs == 0) throw ConfigError("epochs must be >= 1");
    if (!(cfg.lr > 0.0)) throw ConfigError("lr must be > 0");
    if (cfg.batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (x_train.f() != model.feature_count()) {
        throw ShapeError("train: dataset has " + std::to_string(x_train.f()) +
                         " features, model expects " + std::to_string(model.feature_count()));
    }
    if ((noise.kind() == NoiseSource::Chaotic) != (model.noise_source == NoiseSource::Chaotic)) {
        throw ConfigError("noise source does not match model variant");
    }

    const std::size_t n = x_train.n();
    RngState shuffle_rng(cfg.shuffle_seed);
    net::OptimizerState opt(cfg.optimizer, cfg.lr, cfg.momentum);
    std::vector<double> history;
    history.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = num::shuffled_indices(shuffle_rng, n);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t rows = std::min(cfg.batch_size, n - start);
            Matrix batch(rows, x_train.f());
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < x_train.f(); ++c) {
                    batch(r, c) = x_train.features(order[start + r], c);
                }
            }
            Matrix eps = noise.draw(rows, model.latent_dim);
            LossBreakdown loss;
            try {
                loss = train_step(model, batch, eps, opt, cfg.max_grad_norm);
            } catch (const NumericError& e) {
                throw TrainingError("training diverged at epoch " + std::to_string(epoch) + ": " +
                                        e.what(),
                                    static_cast<long>(epoch));
            }
            epoch_loss += loss.total * static_cast<double>(rows);
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError("training diverged at epoch " + std::to_string(epoch),
                                static_cast<long>(epoch));
        }
        history.push_back(epoch_loss);
    }
    return history;
}

/// Encode, reparameterize with freshly drawn epsilon and decode every source
/// row. Labels ride along untouched; row order is preserved.
inline Dataset generate(const VaeModel& model, const Dataset& source, NoiseState& noise,
                        bool deterministic_latent = false) {
    if (source.f() != model.feature_count()) {
        throw ShapeError("generate: dataset has " + std::to_string(source.f()) +
                         " features, model expects " + std::to_string(model.feature_count()));
    }
    const EncodeResult enc = encode(model, source.features);
    Matrix z;
    if (deterministic_latent) {
        z = enc.mu;
    } else {
        const Matrix eps = noise.draw(source.n(), model.latent_dim);
        z = reparameterize(enc.mu, enc.logvar, eps);
    }
    Dataset out;
    out.features = model.decoder.forward_pure(z);
    out.labels = source.labels;
    out.feature_names = source.feature_names;
    return out;
}

}  // namespace tabadv::vae
