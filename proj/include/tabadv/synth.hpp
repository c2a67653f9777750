#pragma once

// Synthetic two-class Gaussian-cluster datasets: a desk-scale stand-in for
// the real tabular corpora the bench targets. `separable_gaussians` puts the
// class means two standard deviations apart per feature; `imbalanced` keeps
// the same geometry with a 9:1 class ratio.

#include <cstdint>
#include <string>

#include "tabadv/dataprep.hpp"
#include "tabadv/errors.hpp"
#include "tabadv/numkernel.hpp"

namespace tabadv::cli {

enum class SyntheticKind { SeparableGaussians, ImbalancedGaussians };

inline SyntheticKind parse_synthetic_kind(const std::string& s) {
    if (s == "separable_gaussians") return SyntheticKind::SeparableGaussians;
    if (s == "imbalanced_gaussians") return SyntheticKind::ImbalancedGaussians;
    throw ConfigError("kind: unknown value '" + s +
                      "' (want separable_gaussians|imbalanced_gaussians)");
}

inline data::Dataset make_synthetic_dataset(SyntheticKind kind, std::size_t n, std::size_t f,
                                            std::uint64_t seed) {
    if (n < 20) throw DomainError("synthetic dataset needs n >= 20");
    if (f == 0) throw DomainError("synthetic dataset needs f >= 1");

    const std::size_t n0 =
        kind == SyntheticKind::SeparableGaussians ? n / 2 : (n * 9) / 10;
    const std::size_t n1 = n - n0;
    if (n1 == 0) throw DomainError("class 1 would be empty at this n");

    num::RngState rng(seed);
    std::vector<int> labels(n, 0);
    for (std::size_t i = n0; i < n; ++i) labels[i] = 1;
    const auto order = num::shuffled_indices(rng, n);

    data::Dataset ds;
    ds.features = num::Matrix(n, f);
    ds.labels.resize(n);
    for (std::size_t c = 0; c < f; ++c) ds.feature_names.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < n; ++r) {
        const int label = labels[order[r]];
        const double mean = label == 1 ? 2.0 : 0.0;
        for (std::size_t c = 0; c < f; ++c) ds.features(r, c) = mean + rng.next_normal();
        ds.labels[r] = label;
    }
    return ds;
}

/// Write the dataset as CSV; identical seeds give identical bytes.
inline data::Dataset make_synthetic(SyntheticKind kind, std::size_t n, std::size_t f,
                                    std::uint64_t seed, const std::string& path) {
    data::Dataset ds = make_synthetic_dataset(kind, n, f, seed);
    data::save_csv(ds, path);
    return ds;
}

}  // namespace tabadv::cli
