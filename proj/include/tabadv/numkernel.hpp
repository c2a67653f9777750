#pragma once

// Dense row-major matrices, a seeded deterministic RNG and a central-difference
// gradient oracle. Everything downstream builds on these.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tabadv/errors.hpp"

namespace tabadv::num {

/// Dense 64-bit matrix, row-major. Entries are kept finite: constructors that
/// accept data validate, and operations that could overflow check their result.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) {
            throw ShapeError("matrix data length " + std::to_string(values_.size()) +
                             " does not match shape " + shape_string());
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw NumericError("non-finite entry in matrix construction");
            }
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> values_;
};

/// Standard matrix product. Accumulation is a plain ascending-k dot product per
/// output cell, so results are bit-stable across runs and build targets.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch: " + a.shape_string() + " * " + b.shape_string());
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            c(i, j) = acc;
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

/// Seeded deterministic generator (splitmix64 core). Two states built from the
/// same seed emit identical sequences; the 2^64 period dwarfs any run here.
/// Single consumer only -- never share one state across threads.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t seed_value() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw strictly inside (0,1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n) via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw DomainError("next_below requires n >= 1");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// One standard-normal draw (paired-trigonometric Box-Muller; the second
    /// value of each pair is cached).
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// n standard-normal draws; advances rng deterministically.
inline std::vector<double> sample_normal(RngState& rng, std::size_t n) {
    if (n == 0) throw DomainError("sample_normal requires n >= 1");
    std::vector<double> out(n);
    for (double& v : out) v = rng.next_normal();
    return out;
}

/// Seeded Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<std::size_t> shuffled_indices(RngState& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central-difference gradient estimate: (f(x+h e_i) - f(x-h e_i)) / (2h).
/// The independent oracle used by every gradient check in the test suites.
inline std::vector<double> finite_diff(const ScalarFn& f, std::span<const double> point,
                                       double step) {
    if (!(step > 0.0)) throw DomainError("finite_diff requires step > 0");
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + step;
        const double fp = f(x);
        x[i] = orig - step;
        const double fm = f(x);
        x[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericError("finite_diff: non-finite function value near component " +
                               std::to_string(i));
        }
        grad[i] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

/// FNV-1a over raw double bits; used to assert partitions were not mutated.
inline std::uint64_t checksum_doubles(std::span<const double> values) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (double v : values) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

}  // namespace tabadv::num
