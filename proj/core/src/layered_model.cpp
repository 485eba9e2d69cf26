#include "pcgraph/layered_model.hpp"

#include <string>

#include "pcgraph/errors.hpp"

namespace pcgraph {

namespace {

void check_shapes(const LayerSpec& spec, const std::vector<Matrix>& weights) {
  if (weights.size() != spec.depth()) {
    throw DomainError("expected " + std::to_string(spec.depth()) + " weight matrices, got " +
                      std::to_string(weights.size()));
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto rows = static_cast<std::size_t>(weights[l].rows());
    const auto cols = static_cast<std::size_t>(weights[l].cols());
    if (rows != spec.width(l + 1) || cols != spec.width(l)) {
      throw DomainError("weight " + std::to_string(l) + " has shape " + std::to_string(rows) +
                        "x" + std::to_string(cols) + ", expected " +
                        std::to_string(spec.width(l + 1)) + "x" + std::to_string(spec.width(l)));
    }
  }
}

}  // namespace

LayeredModel::LayeredModel(LayerSpec spec, std::vector<Matrix> weights,
                           ActivationKind activation, PredictionConvention convention)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      activation_(activation),
      convention_(convention) {
  check_shapes(spec_, weights_);
}

void LayeredModel::set_weights(std::vector<Matrix> weights) {
  check_shapes(spec_, weights);
  weights_ = std::move(weights);
}

Vector predict(const Eigen::Ref<const Matrix>& weights, const Eigen::Ref<const Vector>& source,
               ActivationKind activation, PredictionConvention convention) {
  if (weights.cols() != source.size()) throw DomainError("prediction source width mismatch");
  if (convention == PredictionConvention::MatrixActivation) {
    const Vector drive = weights * source;
    return activate(activation, drive);
  }
  const Vector fired = activate(activation, source);
  return weights * fired;
}

}  // namespace pcgraph
