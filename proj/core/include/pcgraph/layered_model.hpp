#pragma once

#include <vector>

#include "pcgraph/activation.hpp"
#include "pcgraph/layer_spec.hpp"
#include "pcgraph/types.hpp"

namespace pcgraph {

/// Weights of a strictly layered network: weights()[l] maps layer l to layer
/// l+1 and has shape n_{l+1} x n_l. No biases.
class LayeredModel {
 public:
  /// Throws DomainError if any weight shape disagrees with `spec`.
  LayeredModel(LayerSpec spec, std::vector<Matrix> weights, ActivationKind activation,
               PredictionConvention convention);

  const LayerSpec& spec() const noexcept { return spec_; }
  const std::vector<Matrix>& weights() const noexcept { return weights_; }
  const Matrix& weight(std::size_t layer) const { return weights_.at(layer); }
  ActivationKind activation() const noexcept { return activation_; }
  PredictionConvention convention() const noexcept { return convention_; }

 protected:
  void set_weights(std::vector<Matrix> weights);

 private:
  LayerSpec spec_;
  std::vector<Matrix> weights_;
  ActivationKind activation_;
  PredictionConvention convention_;
};

/// Prediction of a target layer from its source activations under `convention`.
Vector predict(const Eigen::Ref<const Matrix>& weights, const Eigen::Ref<const Vector>& source,
               ActivationKind activation, PredictionConvention convention);

}  // namespace pcgraph
