#include "pcgraph/inference_config.hpp"

#include <cmath>

#include "pcgraph/errors.hpp"

namespace pcgraph {

void InferenceConfig::validate() const {
  if (max_steps == 0) throw DomainError("inference needs at least one step");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw DomainError("inference step size must be positive");
  }
  if (!(stop_tolerance >= 0.0)) throw DomainError("stop tolerance must be nonnegative");
  if (!(init_std >= 0.0)) throw DomainError("init_std must be nonnegative");
}

std::string_view to_string(Solver solver) {
  return solver == Solver::GradientDescent ? "gradient_descent" : "exact";
}

std::optional<Solver> parse_solver(std::string_view name) {
  if (name == "gradient_descent") return Solver::GradientDescent;
  if (name == "exact") return Solver::ExactBackwardSubstitution;
  return std::nullopt;
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::Feedforward:
      return "feedforward";
    case InitMode::Zero:
      return "zero";
    case InitMode::Gaussian:
      return "gaussian";
  }
  return "feedforward";
}

std::optional<InitMode> parse_init_mode(std::string_view name) {
  if (name == "feedforward") return InitMode::Feedforward;
  if (name == "zero") return InitMode::Zero;
  if (name == "gaussian") return InitMode::Gaussian;
  return std::nullopt;
}

std::string_view to_string(EvaluationPath path) {
  switch (path) {
    case EvaluationPath::Auto:
      return "auto";
    case EvaluationPath::Dense:
      return "dense";
    case EvaluationPath::Sparse:
      return "sparse";
  }
  return "auto";
}

std::optional<EvaluationPath> parse_evaluation_path(std::string_view name) {
  if (name == "auto") return EvaluationPath::Auto;
  if (name == "dense") return EvaluationPath::Dense;
  if (name == "sparse") return EvaluationPath::Sparse;
  return std::nullopt;
}

}  // namespace pcgraph
