#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pcgraph/layer_spec.hpp"
#include "pcgraph/types.hpp"

namespace pcgraph {

using Rng = std::mt19937_64;

/// Unmasked entries drawn i.i.d. from N(0, (scale / sqrt(fan_in))^2), where
/// fan_in counts the unmasked entries of the row. Masked entries are zero.
Matrix gaussian_weights(const Mask& mask, double scale, Rng& rng);

/// Per-layer weights for `spec`, same scaling with fan_in = n_l.
std::vector<Matrix> gaussian_layer_weights(const LayerSpec& spec, double scale, Rng& rng);

Vector gaussian_vector(Eigen::Index size, double stddev, Rng& rng);

/// Derives an independent stream seed from a base seed and two counters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace pcgraph
