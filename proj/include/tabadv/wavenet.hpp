#pragma once

// Network layers: standard dense layers and wavelet layers whose wavelons
// carry trainable translation b and dilation a. A wavelon computes
//   u_j = (sum_i w_ji x_i - b_j) / a_j,   y_j = f(u_j)
// with f one of five wavelet functions. Backpropagation updates w, b and a;
// dilations are kept away from zero by a clamp re-applied after every
// optimizer step.

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tabadv/errors.hpp"
#include "tabadv/numkernel.hpp"

namespace tabadv::net {

using num::Matrix;
using num::RngState;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDilationFloor = 1e-3;

// ---------------------------------------------------------------------------
// Wavelet functions and their analytic derivatives
// ---------------------------------------------------------------------------

enum class WaveletKind { Morlet, Gaussian, MexicanHat, Shannon, GGW };

inline constexpr double kMexicanHatNorm = 1.1547005383792515 * 0.7511255444649425;  // 2/sqrt(3) * pi^(-1/4)

/// Shannon has a removable singularity at x = 0.5; inside |x-0.5| < 1e-4 a
/// second-order series keeps value and derivative finite and smooth.
inline constexpr double kShannonBranch = 1e-4;

inline double wavelet_eval(WaveletKind kind, double x) {
    switch (kind) {
        case WaveletKind::Morlet:
            return std::cos(1.75 * x) * std::exp(-0.5 * x * x);
        case WaveletKind::Gaussian:
            return std::exp(-x * x);
        case WaveletKind::MexicanHat:
            return kMexicanHatNorm * (1.0 - x * x) * std::exp(-0.5 * x * x);
        case WaveletKind::Shannon: {
            const double t = x - 0.5;
            if (std::abs(t) < kShannonBranch) {
                return -1.0 + (7.0 * kPi * kPi / 6.0) * t * t;
            }
            return (std::sin(kPi * t) - std::sin(2.0 * kPi * t)) / (kPi * t);
        }
        case WaveletKind::GGW:
            return std::sin(3.0 * x) + std::sin(0.3 * x) + std::sin(0.03 * x);
    }
    throw DomainError("unknown wavelet kind");
}

inline double wavelet_grad(WaveletKind kind, double x) {
    switch (kind) {
        case WaveletKind::Morlet:
            return -std::exp(-0.5 * x * x) * (1.75 * std::sin(1.75 * x) + x * std::cos(1.75 * x));
        case WaveletKind::Gaussian:
            return -2.0 * x * std::exp(-x * x);
        case WaveletKind::MexicanHat:
            return kMexicanHatNorm * std::exp(-0.5 * x * x) * (x * x * x - 3.0 * x);
        case WaveletKind::Shannon: {
            const double t = x - 0.5;
            if (std::abs(t) < kShannonBranch) {
                return (7.0 * kPi * kPi / 3.0) * t;
            }
            const double g = std::sin(kPi * t) - std::sin(2.0 * kPi * t);
            const double dg = kPi * std::cos(kPi * t) - 2.0 * kPi * std::cos(2.0 * kPi * t);
            return dg / (kPi * t) - g / (kPi * t * t);
        }
        case WaveletKind::GGW:
            return 3.0 * std::cos(3.0 * x) + 0.3 * std::cos(0.3 * x) + 0.03 * std::cos(0.03 * x);
    }
    throw DomainError("unknown wavelet kind");
}

// ---------------------------------------------------------------------------
// Standard activations
// ---------------------------------------------------------------------------

enum class Activation { ReLU, Tanh, Sigmoid, Identity };

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double activation_eval(Activation act, double x) {
    switch (act) {
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::Tanh: return std::tanh(x);
        case Activation::Sigmoid: return sigmoid(x);
        case Activation::Identity: return x;
    }
    throw DomainError("unknown activation");
}

/// Derivative in terms of pre-activation x and cached output y.
inline double activation_grad(Activation act, double x, double y) {
    switch (act) {
        case Activation::ReLU: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - y * y;
        case Activation::Sigmoid: return y * (1.0 - y);
        case Activation::Identity: return 1.0;
    }
    throw DomainError("unknown activation");
}

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

struct DenseLayer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::Identity;

    std::size_t in_width() const { return weights.cols(); }
    std::size_t out_width() const { return weights.rows(); }
};

struct WaveletLayer {
    Matrix weights;                     // out x in
    std::vector<double> translation;    // b, per wavelon
    std::vector<double> dilation;       // a, per wavelon, |a| >= kDilationFloor
    WaveletKind kind = WaveletKind::Morlet;

    std::size_t in_width() const { return weights.cols(); }
    std::size_t out_width() const { return weights.rows(); }
};

using Layer = std::variant<DenseLayer, WaveletLayer>;

inline std::size_t layer_in_width(const Layer& l) {
    return std::visit([](const auto& x) { return x.in_width(); }, l);
}
inline std::size_t layer_out_width(const Layer& l) {
    return std::visit([](const auto& x) { return x.out_width(); }, l);
}

/// Weights and biases/translations ~ N(0,1); dilations |N(0,1)| + 0.5 so no
/// wavelon starts near the divide-by-zero region.
inline DenseLayer init_dense(std::size_t out, std::size_t in, Activation act, RngState& rng) {
    DenseLayer l;
    l.weights = Matrix(out, in);
    for (double& w : l.weights.values()) w = rng.next_normal();
    l.bias.resize(out);
    for (double& b : l.bias) b = rng.next_normal();
    l.activation = act;
    return l;
}

inline WaveletLayer init_wavelet(std::size_t out, std::size_t in, WaveletKind kind, RngState& rng) {
    WaveletLayer l;
    l.weights = Matrix(out, in);
    for (double& w : l.weights.values()) w = rng.next_normal();
    l.translation.resize(out);
    for (double& b : l.translation) b = rng.next_normal();
    l.dilation.resize(out);
    for (double& a : l.dilation) {
        a = std::abs(rng.next_normal()) + 0.5;
        if (a < kDilationFloor) a = kDilationFloor;
    }
    l.kind = kind;
    return l;
}

// ---------------------------------------------------------------------------
// Per-layer forward/backward with explicit caches
// ---------------------------------------------------------------------------

struct LayerCache {
    Matrix input;   // batch fed to the layer
    Matrix pre;     // dense: affine output; wavelet: u
    Matrix post;    // layer output
};

inline Matrix dense_forward(const DenseLayer& l, const Matrix& x, LayerCache* cache) {
    if (x.cols() != l.in_width()) {
        throw ShapeError("dense forward: input " + x.shape_string() + " vs weights " +
                         l.weights.shape_string());
    }
    const std::size_t batch = x.rows(), out = l.out_width(), in = l.in_width();
    Matrix pre(batch, out), post(batch, out);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < out; ++j) {
            double acc = l.bias[j];
            for (std::size_t i = 0; i < in; ++i) acc += l.weights(j, i) * x(b, i);
            pre(b, j) = acc;
            post(b, j) = activation_eval(l.activation, acc);
        }
    }
    if (cache) {
        cache->input = x;
        cache->pre = pre;
        cache->post = post;
    }
    return post;
}

inline Matrix wavelet_forward(const WaveletLayer& l, const Matrix& x, LayerCache* cache) {
    if (x.cols() != l.in_width()) {
        throw ShapeError("wavelet forward: input " + x.shape_string() + " vs weights " +
                         l.weights.shape_string());
    }
    const std::size_t batch = x.rows(), out = l.out_width(), in = l.in_width();
    Matrix u(batch, out), post(batch, out);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < out; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < in; ++i) acc += l.weights(j, i) * x(b, i);
            const double uj = (acc - l.translation[j]) / l.dilation[j];
            u(b, j) = uj;
            post(b, j) = wavelet_eval(l.kind, uj);
        }
    }
    if (cache) {
        cache->input = x;
        cache->pre = u;
        cache->post = post;
    }
    return post;
}

struct DenseGrads {
    Matrix weights;
    std::vector<double> bias;
};

struct WaveletGrads {
    Matrix weights;
    std::vector<double> translation;
    std::vector<double> dilation;
};

using LayerGrads = std::variant<DenseGrads, WaveletGrads>;

inline DenseGrads dense_backward(const DenseLayer& l, const LayerCache& cache,
                                 const Matrix& upstream, Matrix* input_grad) {
    const std::size_t batch = cache.input.rows(), out = l.out_width(), in = l.in_width();
    if (upstream.rows() != batch || upstream.cols() != out) {
        throw ShapeError("dense backward: upstream " + upstream.shape_string() + " vs cache " +
                         cache.post.shape_string());
    }
    DenseGrads g{Matrix(out, in), std::vector<double>(out, 0.0)};
    if (input_grad) *input_grad = Matrix(batch, in);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < out; ++j) {
            const double d = upstream(b, j) *
                             activation_grad(l.activation, cache.pre(b, j), cache.post(b, j));
            g.bias[j] += d;
            for (std::size_t i = 0; i < in; ++i) {
                g.weights(j, i) += d * cache.input(b, i);
                if (input_grad) (*input_grad)(b, i) += d * l.weights(j, i);
            }
        }
    }
    return g;
}

inline WaveletGrads wavelet_backward(const WaveletLayer& l, const LayerCache& cache,
                                     const Matrix& upstream, Matrix* input_grad) {
    const std::size_t batch = cache.input.rows(), out = l.out_width(), in = l.in_width();
    if (upstream.rows() != batch || upstream.cols() != out) {
        throw ShapeError("wavelet backward: upstream " + upstream.shape_string() + " vs cache " +
                         cache.post.shape_string());
    }
    WaveletGrads g{Matrix(out, in), std::vector<double>(out, 0.0), std::vector<double>(out, 0.0)};
    if (input_grad) *input_grad = Matrix(batch, in);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < out; ++j) {
            const double a = l.dilation[j];
            const double u = cache.pre(b, j);
            const double d = upstream(b, j) * wavelet_grad(l.kind, u);
            g.translation[j] -= d / a;
            g.dilation[j] -= d * u / a;
            for (std::size_t i = 0; i < in; ++i) {
                g.weights(j, i) += d * cache.input(b, i) / a;
                if (input_grad) (*input_grad)(b, i) += d * l.weights(j, i) / a;
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

struct NetworkGrads {
    std::vector<LayerGrads> layers;
    Matrix input;  // gradient wrt the network input, for chaining
};

class Network {
public:
    Network() = default;
    explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
        for (std::size_t i = 1; i < layers_.size(); ++i) {
            if (layer_in_width(layers_[i]) != layer_out_width(layers_[i - 1])) {
                throw ShapeError("layer " + std::to_string(i) + " input width does not chain");
            }
        }
    }

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::size_t input_width() const { return layer_in_width(layers_.front()); }
    std::size_t output_width() const { return layer_out_width(layers_.back()); }

    /// Forward pass retaining per-layer caches for backward.
    Matrix forward(const Matrix& batch) {
        caches_.resize(layers_.size());
        Matrix x = batch;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (const auto* d = std::get_if<DenseLayer>(&layers_[i]))
                x = dense_forward(*d, x, &caches_[i]);
            else
                x = wavelet_forward(std::get<WaveletLayer>(layers_[i]), x, &caches_[i]);
        }
        cache_valid_ = true;
        return x;
    }

    /// Cache-free evaluation; safe on shared read-only networks.
    Matrix forward_pure(const Matrix& batch) const {
        Matrix x = batch;
        for (const Layer& layer : layers_) {
            if (const auto* d = std::get_if<DenseLayer>(&layer))
                x = dense_forward(*d, x, nullptr);
            else
                x = wavelet_forward(std::get<WaveletLayer>(layer), x, nullptr);
        }
        return x;
    }

    /// Backward through the cached forward pass. Gradients are summed over the
    /// batch; scaling conventions live in the loss that produced `upstream`.
    NetworkGrads backward(const Matrix& upstream) const {
        if (!cache_valid_) throw StateError("backward called without a cached forward pass");
        NetworkGrads grads;
        grads.layers.resize(layers_.size());
        Matrix up = upstream;
        for (std::size_t i = layers_.size(); i-- > 0;) {
            Matrix down;
            if (const auto* d = std::get_if<DenseLayer>(&layers_[i])) {
                grads.layers[i] = dense_backward(*d, caches_[i], up, &down);
            } else {
                grads.layers[i] =
                    wavelet_backward(std::get<WaveletLayer>(layers_[i]), caches_[i], up, &down);
            }
            up = std::move(down);
        }
        grads.input = std::move(up);
        return grads;
    }

    bool has_cache() const { return cache_valid_; }
    void drop_cache() {
        caches_.clear();
        cache_valid_ = false;
    }

private:
    std::vector<Layer> layers_;
    std::vector<LayerCache> caches_;
    bool cache_valid_ = false;
};

// ---------------------------------------------------------------------------
// Flat parameter access (tests, optimizers, re-init checks)
// ---------------------------------------------------------------------------

struct ParamView {
    std::span<double> values;
    bool is_dilation = false;
};

inline void collect_param_views(DenseLayer& l, std::vector<ParamView>& out) {
    out.push_back({l.weights.values(), false});
    out.push_back({std::span<double>(l.bias), false});
}

inline void collect_param_views(WaveletLayer& l, std::vector<ParamView>& out) {
    out.push_back({l.weights.values(), false});
    out.push_back({std::span<double>(l.translation), false});
    out.push_back({std::span<double>(l.dilation), true});
}

inline std::vector<ParamView> param_views(Network& net) {
    std::vector<ParamView> out;
    for (Layer& layer : net.layers()) {
        std::visit([&](auto& l) { collect_param_views(l, out); }, layer);
    }
    return out;
}

inline std::vector<ParamView> param_views(DenseLayer& l) {
    std::vector<ParamView> out;
    collect_param_views(l, out);
    return out;
}

inline void collect_grad_views(const DenseGrads& g, std::vector<std::span<const double>>& out) {
    out.push_back(g.weights.values());
    out.push_back(std::span<const double>(g.bias));
}

inline void collect_grad_views(const WaveletGrads& g, std::vector<std::span<const double>>& out) {
    out.push_back(g.weights.values());
    out.push_back(std::span<const double>(g.translation));
    out.push_back(std::span<const double>(g.dilation));
}

inline std::vector<std::span<const double>> grad_views(const NetworkGrads& grads) {
    std::vector<std::span<const double>> out;
    for (const LayerGrads& lg : grads.layers) {
        std::visit([&](const auto& g) { collect_grad_views(g, out); }, lg);
    }
    return out;
}

inline std::vector<double> parameters(const Network& net) {
    std::vector<double> flat;
    for (const Layer& layer : net.layers()) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            flat.insert(flat.end(), d->weights.values().begin(), d->weights.values().end());
            flat.insert(flat.end(), d->bias.begin(), d->bias.end());
        } else {
            const auto& w = std::get<WaveletLayer>(layer);
            flat.insert(flat.end(), w.weights.values().begin(), w.weights.values().end());
            flat.insert(flat.end(), w.translation.begin(), w.translation.end());
            flat.insert(flat.end(), w.dilation.begin(), w.dilation.end());
        }
    }
    return flat;
}

inline void set_parameters(Network& net, std::span<const double> flat) {
    std::size_t pos = 0;
    for (ParamView view : param_views(net)) {
        if (pos + view.values.size() > flat.size()) {
            throw ShapeError("set_parameters: flat vector too short");
        }
        for (double& v : view.values) v = flat[pos++];
    }
    if (pos != flat.size()) throw ShapeError("set_parameters: flat vector too long");
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

enum class OptimizerKind { SGD, Momentum, Adam, Adagrad };

/// Per-parameter-tensor accumulator state. Built lazily to mirror the shapes
/// of the first step's parameters; later shape drift is an error.
class OptimizerState {
public:
    OptimizerState(OptimizerKind kind, double lr, double momentum = 0.0)
        : kind_(kind), lr_(lr), momentum_(momentum) {}

    OptimizerKind kind() const { return kind_; }
    double learning_rate() const { return lr_; }
    double momentum() const { return momentum_; }
    std::uint64_t step_count() const { return step_; }

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    void step(const std::vector<ParamView>& params,
              const std::vector<std::span<const double>>& grads) {
        if (params.size() != grads.size()) {
            throw ShapeError("optimizer step: " + std::to_string(params.size()) +
                             " parameter tensors vs " + std::to_string(grads.size()) +
                             " gradient tensors");
        }
        if (slots_.empty()) {
            slots_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                slots_[i].m.assign(params[i].values.size(), 0.0);
                slots_[i].v.assign(params[i].values.size(), 0.0);
            }
        }
        if (slots_.size() != params.size()) {
            throw ShapeError("optimizer step: parameter tensor count changed");
        }
        ++step_;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto p = params[i].values;
            auto g = grads[i];
            auto& slot = slots_[i];
            if (p.size() != g.size() || p.size() != slot.m.size()) {
                throw ShapeError("optimizer step: tensor " + std::to_string(i) +
                                 " shape mismatch");
            }
            switch (kind_) {
                case OptimizerKind::SGD:
                    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr_ * g[k];
                    break;
                case OptimizerKind::Momentum:
                    for (std::size_t k = 0; k < p.size(); ++k) {
                        slot.m[k] = momentum_ * slot.m[k] - lr_ * g[k];
                        p[k] += slot.m[k];
                    }
                    break;
                case OptimizerKind::Adam: {
                    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
                    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
                    for (std::size_t k = 0; k < p.size(); ++k) {
                        slot.m[k] = kBeta1 * slot.m[k] + (1.0 - kBeta1) * g[k];
                        slot.v[k] = kBeta2 * slot.v[k] + (1.0 - kBeta2) * g[k] * g[k];
                        const double mhat = slot.m[k] / c1;
                        const double vhat = slot.v[k] / c2;
                        p[k] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
                    }
                    break;
                }
                case OptimizerKind::Adagrad:
                    for (std::size_t k = 0; k < p.size(); ++k) {
                        slot.v[k] += g[k] * g[k];
                        p[k] -= lr_ * g[k] / (std::sqrt(slot.v[k]) + kEps);
                    }
                    break;
            }
            if (params[i].is_dilation) {
                for (std::size_t k = 0; k < p.size(); ++k) {
                    if (std::abs(p[k]) < kDilationFloor) {
                        p[k] = p[k] < 0.0 ? -kDilationFloor : kDilationFloor;
                    }
                }
            }
        }
    }

private:
    struct Slot {
        std::vector<double> m, v;
    };

    OptimizerKind kind_;
    double lr_;
    double momentum_;
    std::vector<Slot> slots_;
    std::uint64_t step_ = 0;
};

}  // namespace tabadv::net
