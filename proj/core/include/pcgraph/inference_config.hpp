#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pcgraph {

enum class Solver { GradientDescent, ExactBackwardSubstitution };

/// Starting point for iterative inference on the unclamped nodes.
enum class InitMode { Feedforward, Zero, Gaussian };

/// Dense N x N products or compressed rows over unmasked weights.
enum class EvaluationPath { Auto, Dense, Sparse };

struct InferenceConfig {
  std::size_t max_steps = 100;
  double step_size = 0.1;
  /// Stop once the max-norm of the activation gradient is at most this.
  double stop_tolerance = 1e-8;
  Solver solver = Solver::GradientDescent;
  InitMode init = InitMode::Feedforward;
  /// Standard deviation and seed for InitMode::Gaussian.
  double init_std = 1.0;
  std::uint64_t init_seed = 0;
  EvaluationPath evaluation = EvaluationPath::Auto;

  /// Throws DomainError on non-positive step size or step count, negative tolerance.
  void validate() const;
};

/// Outcome of an inference run. `steps` counts synchronous updates applied;
/// `madds` counts multiply-adds spent on predictions and gradients.
template <class State>
struct Inference {
  State state;
  std::size_t steps = 0;
  bool converged = false;
  std::uint64_t madds = 0;
};

std::string_view to_string(Solver solver);
std::optional<Solver> parse_solver(std::string_view name);
std::string_view to_string(InitMode mode);
std::optional<InitMode> parse_init_mode(std::string_view name);
std::string_view to_string(EvaluationPath path);
std::optional<EvaluationPath> parse_evaluation_path(std::string_view name);

}  // namespace pcgraph
