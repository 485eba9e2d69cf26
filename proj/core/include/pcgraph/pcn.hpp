#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcgraph/fnn.hpp"
#include "pcgraph/inference_config.hpp"
#include "pcgraph/layered_model.hpp"

namespace pcgraph::pcn {

/// Hierarchical predictive coding network. weights()[l] predicts layer l+1
/// from layer l.
class PcnModel : public LayeredModel {
 public:
  using LayeredModel::LayeredModel;

  PcnModel with_weights(std::vector<Matrix> weights) const;
  fnn::FnnModel as_fnn() const;
};

/// Node activations a^0..a^L. Layer 0 is always clamped to the input; in
/// Training mode layer L is clamped to the label as well.
struct PcnState {
  std::vector<Vector> activations;
  ClampMode clamp = ClampMode::Testing;
};

/// True if `layer` may not move under inference.
bool is_clamped(const PcnModel& model, ClampMode clamp, std::size_t layer);

/// mu^l for l = 1..L; entry 0 is empty.
std::vector<Vector> predictions(const PcnModel& model, const PcnState& state);

/// eps^l = a^l - mu^l for l = 1..L; entry 0 is empty.
std::vector<Vector> errors(const PcnModel& model, const PcnState& state);

/// E_N = 1/2 sum_{l>=1} |eps^l|^2.
double energy(const PcnModel& model, const PcnState& state);

/// dE_N/da^l for every layer (L+1 entries). Clamped layers get zero vectors,
/// so index 0 is always zero and index L is zero in Training mode.
std::vector<Vector> activation_gradients(const PcnModel& model, const PcnState& state);

/// dE_N/dw^l for l = 0..L-1.
std::vector<Matrix> weight_gradients(const PcnModel& model, const PcnState& state);

/// Sets hidden layers to their predictions from below. With `y`, the output
/// layer is clamped to it (Training); without, it is predicted too (Testing).
PcnState feedforward_init(const PcnModel& model, const Vector& x,
                          const std::optional<Vector>& y = std::nullopt);

/// Starting state for iterative inference according to `config.init`.
PcnState initial_state(const PcnModel& model, const Vector& x, const std::optional<Vector>& y,
                       const InferenceConfig& config);

/// One synchronous gradient step on the unclamped layers. Returns the
/// max-norm of the gradient that was applied.
double descent_step(const PcnModel& model, PcnState& state, double step_size);

/// Gradient descent from `state` until the gradient max-norm falls to the
/// stop tolerance or max_steps updates have been applied.
/// Throws DivergedError on the first non-finite gradient or activation.
Inference<PcnState> relax(const PcnModel& model, PcnState state, const InferenceConfig& config);

/// Clamps x (and y in Training mode), initializes, and minimizes E_N over the
/// free layers. The exact solver is only valid without a label and reproduces
/// the feedforward pass, which zeroes every error.
Inference<PcnState> infer(const PcnModel& model, const Vector& x, const std::optional<Vector>& y,
                          const InferenceConfig& config);

/// w^l <- w^l - eta * dE_N/dw^l evaluated at `state`.
PcnModel learn_step(const PcnModel& model, const PcnState& state, double learning_rate);

PcnModel apply_weight_gradients(const PcnModel& model, const std::vector<Matrix>& gradients,
                                 double learning_rate);

/// Element-wise mean of per-sample weight gradients, summed in index order.
std::vector<Matrix> average_weight_gradients(std::span<const std::vector<Matrix>> per_sample);

}  // namespace pcgraph::pcn
