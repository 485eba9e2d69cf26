#include "pcgraph/activation.hpp"

#include <cmath>

namespace pcgraph {

double activate(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Identity:
      return x;
    case ActivationKind::Tanh:
      return std::tanh(x);
    case ActivationKind::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::ReLU:
      return x > 0.0 ? x : 0.0;
  }
  return x;
}

double activate_derivative(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Identity:
      return 1.0;
    case ActivationKind::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case ActivationKind::ReLU:
      return x > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

Vector activate(ActivationKind kind, const Eigen::Ref<const Vector>& x) {
  if (kind == ActivationKind::Identity) return x;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = activate(kind, x[i]);
  return out;
}

Vector activate_derivative(ActivationKind kind, const Eigen::Ref<const Vector>& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = activate_derivative(kind, x[i]);
  return out;
}

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Identity:
      return "identity";
    case ActivationKind::Tanh:
      return "tanh";
    case ActivationKind::Sigmoid:
      return "sigmoid";
    case ActivationKind::ReLU:
      return "relu";
  }
  return "identity";
}

std::optional<ActivationKind> parse_activation(std::string_view name) {
  if (name == "identity") return ActivationKind::Identity;
  if (name == "tanh") return ActivationKind::Tanh;
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "relu") return ActivationKind::ReLU;
  return std::nullopt;
}

std::string_view to_string(PredictionConvention convention) {
  return convention == PredictionConvention::MatrixActivation ? "matrix_activation"
                                                              : "activation_matrix";
}

std::optional<PredictionConvention> parse_convention(std::string_view name) {
  if (name == "matrix_activation") return PredictionConvention::MatrixActivation;
  if (name == "activation_matrix") return PredictionConvention::ActivationMatrix;
  return std::nullopt;
}

}  // namespace pcgraph
