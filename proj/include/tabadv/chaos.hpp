#pragma once

// Logistic-map stream x_{t+1} = 4 x_t (1 - x_t). Supplies the chaotic epsilon
// sequence the C-VAE variants use in place of Gaussian latent noise. Values
// are used raw in (0,1), not recentered; consumers can read the running mean
// for reporting.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tabadv/errors.hpp"

namespace tabadv::chaos {

class LogisticMapStream {
public:
    /// Chaotic regime is guaranteed only at lambda = 4; not configurable.
    static constexpr double kLambda = 4.0;
    static constexpr int kBurnIn = 100;

    /// Seed must lie strictly inside (0,1) and avoid the degenerate orbits:
    /// 0.5 maps to 1 then 0, 0.75 is a fixed point, 0.25 lands on 0.75.
    explicit LogisticMapStream(double seed) : seed_(seed), state_(seed) {
        validate_seed(seed);
        for (int i = 0; i < kBurnIn; ++i) step();
    }

    /// Resume from a known post-burn-in state; no validation or burn-in.
    static LogisticMapStream resume_at(double state) {
        LogisticMapStream s;
        s.seed_ = state;
        s.state_ = state;
        return s;
    }

    static void validate_seed(double seed) {
        if (!(seed > 0.0 && seed < 1.0) || seed == 0.25 || seed == 0.5 || seed == 0.75) {
            throw DomainError("invalid logistic-map seed " + std::to_string(seed) +
                              ": need value in (0,1) excluding {0.25, 0.5, 0.75}");
        }
    }

    /// Advance one step and return the new state.
    double next() {
        step();
        sum_drawn_ += state_;
        ++drawn_;
        return state_;
    }

    std::vector<double> fill(std::size_t n) {
        if (n == 0) throw DomainError("fill requires n >= 1");
        std::vector<double> out(n);
        for (double& v : out) v = next();
        return out;
    }

    double seed() const { return seed_; }
    double state() const { return state_; }
    std::uint64_t iterate_count() const { return iterates_; }

    /// Diagnostics over externally drawn values (burn-in excluded).
    std::uint64_t drawn_count() const { return drawn_; }
    double drawn_mean() const { return drawn_ == 0 ? 0.0 : sum_drawn_ / static_cast<double>(drawn_); }

private:
    LogisticMapStream() = default;

    void step() {
        state_ = kLambda * (state_ * (1.0 - state_));
        ++iterates_;
    }

    double seed_ = 0.0;
    double state_ = 0.0;
    std::uint64_t iterates_ = 0;
    double sum_drawn_ = 0.0;
    std::uint64_t drawn_ = 0;
};

}  // namespace tabadv::chaos
