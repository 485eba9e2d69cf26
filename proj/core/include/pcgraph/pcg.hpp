#pragma once

#include <optional>
#include <span>

#include "pcgraph/activation.hpp"
#include "pcgraph/inference_config.hpp"
#include "pcgraph/layer_spec.hpp"
#include "pcgraph/pcn.hpp"
#include "pcgraph/sparse.hpp"
#include "pcgraph/types.hpp"

namespace pcgraph::pcg {

/// Predictive coding graph over N nodes with a full N x N weight matrix.
///
/// weights()(a, b) carries node b's contribution to the prediction of node a.
/// The mask marks which entries exist; every entry outside the mask is exactly
/// zero for the lifetime of the model. Nodes 0..n_x-1 are inputs and the last
/// n_y nodes are outputs.
class PcgModel {
 public:
  /// Throws DomainError on shape problems or n_x + n_y > N, StructureError if
  /// a weight outside the mask is nonzero.
  PcgModel(Matrix weights, Mask mask, ActivationKind activation, PredictionConvention convention,
           std::size_t input_width, std::size_t output_width);

  std::size_t node_count() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const noexcept { return weights_; }
  const Mask& mask() const noexcept { return mask_; }
  ActivationKind activation() const noexcept { return activation_; }
  PredictionConvention convention() const noexcept { return convention_; }
  std::size_t input_width() const noexcept { return input_width_; }
  std::size_t output_width() const noexcept { return output_width_; }
  /// d, the number of structurally present weights.
  std::size_t connection_count() const noexcept { return connections_; }

  /// Copy with new weights; entries outside the mask are forced to zero.
  PcgModel with_weights(const Matrix& weights) const;

 private:
  Matrix weights_;
  Mask mask_;
  ActivationKind activation_;
  PredictionConvention convention_;
  std::size_t input_width_;
  std::size_t output_width_;
  std::size_t connections_;
};

struct PcgState {
  Vector activations;
  ClampMode clamp = ClampMode::Testing;
};

/// True if the 0-based node is fixed under `clamp`.
bool is_clamped(const PcgModel& model, ClampMode clamp, std::size_t node);

/// Resolves Auto to Sparse when d / N^2 < 0.25, Dense otherwise.
EvaluationPath resolve_path(const PcgModel& model, EvaluationPath path);

Vector predictions(const PcgModel& model, const PcgState& state,
                   EvaluationPath path = EvaluationPath::Dense, OpCounter* counter = nullptr);
Vector errors(const PcgModel& model, const PcgState& state,
              EvaluationPath path = EvaluationPath::Dense, OpCounter* counter = nullptr);

/// E_G = 1/2 sum_alpha eps_alpha^2.
double energy(const PcgModel& model, const PcgState& state,
              EvaluationPath path = EvaluationPath::Dense);

/// dE_G/da with clamped entries set to zero. One evaluation costs 2 d
/// multiply-adds on the sparse path and 2 N^2 on the dense path.
Vector activation_gradient(const PcgModel& model, const PcgState& state,
                           EvaluationPath path = EvaluationPath::Dense,
                           OpCounter* counter = nullptr);

/// dE_G/dw, exactly zero outside the mask.
Matrix weight_gradient(const PcgModel& model, const PcgState& state);

/// One synchronous gradient step on the unclamped nodes. Returns the
/// max-norm of the applied gradient.
double descent_step(const PcgModel& model, PcgState& state, double step_size,
                    EvaluationPath path = EvaluationPath::Dense, OpCounter* counter = nullptr);

/// True when every unmasked entry points from a lower layer of `partition`
/// to a strictly higher one.
bool feedforward_compatible(const Mask& mask, const LayerSpec& partition);

/// Fills nodes in layer order from all incoming weights, clamping the inputs
/// and (given y) the outputs. Throws InitNotApplicableError unless the mask
/// is feedforward with respect to `partition`.
PcgState feedforward_init(const PcgModel& model, const LayerSpec& partition, const Vector& x,
                          const std::optional<Vector>& y = std::nullopt);

/// Starting state for `config.init`. Feedforward needs a partition.
PcgState initial_state(const PcgModel& model, const Vector& x, const std::optional<Vector>& y,
                       const InferenceConfig& config,
                       const std::optional<LayerSpec>& partition = std::nullopt);

/// Gradient descent from `state`; see pcn::relax for the stopping rule.
Inference<PcgState> relax(const PcgModel& model, PcgState state, const InferenceConfig& config);

/// Initializes then relaxes. No exact solver exists for general graphs, so
/// Solver::ExactBackwardSubstitution is rejected with DomainError.
Inference<PcgState> infer(const PcgModel& model, const Vector& x, const std::optional<Vector>& y,
                          const InferenceConfig& config,
                          const std::optional<LayerSpec>& partition = std::nullopt);

/// w <- mask .* (w - eta dE_G/dw).
PcgModel learn_step(const PcgModel& model, const PcgState& state, double learning_rate);
PcgModel apply_weight_gradient(const PcgModel& model, const Matrix& gradient,
                               double learning_rate);
Matrix average_weight_gradients(std::span<const Matrix> per_sample);

/// Ones exactly on the blocks (l, l-1).
Mask hierarchical_mask(const LayerSpec& spec);

/// Places w^{l-1} on block (l, l-1) of an N x N matrix.
PcgModel hierarchical_embed(const pcn::PcnModel& pcn);

/// Inverse of hierarchical_embed. Throws StructureError unless the mask is
/// exactly the hierarchical mask of `spec`.
pcn::PcnModel extract_pcn(const PcgModel& model, const LayerSpec& spec);

}  // namespace pcgraph::pcg
