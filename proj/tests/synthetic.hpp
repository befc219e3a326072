#pragma once

// Synthetic dataset generators shared by the training tests and the
// acceptance suite. All generators are seed-deterministic.

#include <cmath>
#include <cstdint>
#include <vector>

#include "xdeepint/feature.hpp"
#include "xdeepint/matrix.hpp"

namespace synth {

inline double uniform(std::uint64_t& rng, double lo, double hi) {
    return lo + (static_cast<double>(xdeepint::splitmix64(rng) >> 11) * 0x1.0p-53) * (hi - lo);
}

/// Label depends on the product of two fields' scalar latent values:
/// p = sigmoid(scale * u1[t1] * u2[t2]). Pure second-order signal, no
/// first-order component in expectation.
inline xdeepint::EncodedDataset product_interaction(std::size_t n_rows, std::size_t vocab,
                                                    double scale, std::uint64_t seed) {
    std::uint64_t rng = seed;
    std::vector<double> u1(vocab), u2(vocab);
    for (double& v : u1) v = uniform(rng, -1.0, 1.0);
    for (double& v : u2) v = uniform(rng, -1.0, 1.0);

    xdeepint::EncodedDataset ds;
    ds.field_count = 2;
    ds.cardinalities = {vocab, vocab};
    ds.examples.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const std::uint32_t t1 = static_cast<std::uint32_t>(xdeepint::splitmix64(rng) % vocab);
        const std::uint32_t t2 = static_cast<std::uint32_t>(xdeepint::splitmix64(rng) % vocab);
        const double p = xdeepint::sigmoid(scale * u1[t1] * u2[t2]);
        const int y = uniform(rng, 0.0, 1.0) < p ? 1 : 0;
        ds.examples.push_back({{t1, t2}, y});
    }
    return ds;
}

/// Label depends on a dense random trilinear form over three fields'
/// latent sign vectors: signal = sum_{a,b,c} s_abc v1[a] v2[b] v3[c],
/// normalized to roughly unit variance. The token-interaction tensor has
/// high CP rank, so same-coordinate (vector-wise) crossings alone cannot
/// represent it while cross-coordinate (bit-wise) crossings can.
inline xdeepint::EncodedDataset trilinear_interaction(std::size_t n_rows, std::size_t vocab,
                                                      std::size_t dims, double scale,
                                                      std::uint64_t seed) {
    std::uint64_t rng = seed;
    std::vector<std::vector<std::vector<double>>> latent(
        3, std::vector<std::vector<double>>(vocab, std::vector<double>(dims)));
    for (auto& field : latent)
        for (auto& row : field)
            for (double& v : row) v = xdeepint::splitmix64(rng) % 2 ? 1.0 : -1.0;
    std::vector<double> coeff(dims * dims * dims);
    for (double& s : coeff) s = xdeepint::splitmix64(rng) % 2 ? 1.0 : -1.0;
    const double norm = std::pow(static_cast<double>(dims), 1.5);

    xdeepint::EncodedDataset ds;
    ds.field_count = 3;
    ds.cardinalities = {vocab, vocab, vocab};
    ds.examples.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::uint32_t t[3];
        for (auto& ti : t) ti = static_cast<std::uint32_t>(xdeepint::splitmix64(rng) % vocab);
        double signal = 0.0;
        for (std::size_t a = 0; a < dims; ++a) {
            for (std::size_t b = 0; b < dims; ++b) {
                double partial = 0.0;
                for (std::size_t c = 0; c < dims; ++c) {
                    partial += coeff[(a * dims + b) * dims + c] * latent[2][t[2]][c];
                }
                signal += latent[0][t[0]][a] * latent[1][t[1]][b] * partial;
            }
        }
        signal /= norm;
        const double p = xdeepint::sigmoid(scale * signal);
        const int y = uniform(rng, 0.0, 1.0) < p ? 1 : 0;
        ds.examples.push_back({{t[0], t[1], t[2]}, y});
    }
    return ds;
}

/// Half the fields carry a linear signal, the other half are pure noise.
/// p = sigmoid(scale * mean of informative fields' latent values).
inline xdeepint::EncodedDataset noise_fields(std::size_t n_rows, std::size_t n_informative,
                                             std::size_t n_noise, std::size_t vocab, double scale,
                                             std::uint64_t seed) {
    std::uint64_t rng = seed;
    const std::size_t F = n_informative + n_noise;
    std::vector<std::vector<double>> latent(n_informative, std::vector<double>(vocab));
    for (auto& field : latent)
        for (double& v : field) v = uniform(rng, -1.0, 1.0);

    xdeepint::EncodedDataset ds;
    ds.field_count = F;
    ds.cardinalities.assign(F, vocab);
    ds.examples.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        xdeepint::Example ex;
        double signal = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
            const std::uint32_t t = static_cast<std::uint32_t>(xdeepint::splitmix64(rng) % vocab);
            ex.indices.push_back(t);
            if (f < n_informative) signal += latent[f][t];
        }
        signal /= static_cast<double>(n_informative);
        ex.label = uniform(rng, 0.0, 1.0) < xdeepint::sigmoid(scale * signal) ? 1 : 0;
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

}  // namespace synth
