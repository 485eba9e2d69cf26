#include "pcgraph/fnn.hpp"

#include "pcgraph/errors.hpp"

namespace pcgraph::fnn {

std::vector<Vector> forward(const FnnModel& model, const Vector& x) {
  const LayerSpec& spec = model.spec();
  if (static_cast<std::size_t>(x.size()) != spec.input_width()) {
    throw DomainError("input width mismatch");
  }
  std::vector<Vector> layers;
  layers.reserve(spec.layer_count());
  layers.push_back(x);
  for (std::size_t l = 1; l <= spec.depth(); ++l) {
    layers.push_back(
        predict(model.weight(l - 1), layers[l - 1], model.activation(), model.convention()));
  }
  return layers;
}

}  // namespace pcgraph::fnn
