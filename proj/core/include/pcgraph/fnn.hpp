#pragma once

#include <vector>

#include "pcgraph/layered_model.hpp"

namespace pcgraph::fnn {

/// Multilayer perceptron without biases.
class FnnModel : public LayeredModel {
 public:
  using LayeredModel::LayeredModel;
};

/// Layerwise forward pass. Returns a^0 = x followed by a^1..a^L.
/// Throws DomainError if |x| != n_0.
std::vector<Vector> forward(const FnnModel& model, const Vector& x);

}  // namespace pcgraph::fnn
