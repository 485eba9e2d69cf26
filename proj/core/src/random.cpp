#include "pcgraph/random.hpp"

#include <cmath>

namespace pcgraph {

Matrix gaussian_weights(const Mask& mask, double scale, Rng& rng) {
  Matrix w = Matrix::Zero(mask.rows(), mask.cols());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    const auto fan_in = mask.row(r).count();
    if (fan_in == 0) continue;
    const double sd = scale / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index c = 0; c < mask.cols(); ++c) {
      if (mask(r, c)) w(r, c) = sd * normal(rng);
    }
  }
  return w;
}

std::vector<Matrix> gaussian_layer_weights(const LayerSpec& spec, double scale, Rng& rng) {
  std::vector<Matrix> weights;
  weights.reserve(spec.depth());
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    const auto rows = static_cast<Eigen::Index>(spec.width(l + 1));
    const auto cols = static_cast<Eigen::Index>(spec.width(l));
    weights.push_back(gaussian_weights(Mask::Constant(rows, cols, true), scale, rng));
  }
  return weights;
}

Vector gaussian_vector(Eigen::Index size, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

}  // namespace pcgraph
