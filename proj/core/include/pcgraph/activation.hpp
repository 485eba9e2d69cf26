#pragma once

#include <optional>
#include <string_view>

#include "pcgraph/types.hpp"

namespace pcgraph {

enum class ActivationKind { Identity, Tanh, Sigmoid, ReLU };

double activate(ActivationKind kind, double x);

/// Analytic derivative. ReLU'(0) is defined as 0.
double activate_derivative(ActivationKind kind, double x);

Vector activate(ActivationKind kind, const Eigen::Ref<const Vector>& x);
Vector activate_derivative(ActivationKind kind, const Eigen::Ref<const Vector>& x);

std::string_view to_string(ActivationKind kind);
std::optional<ActivationKind> parse_activation(std::string_view name);

std::string_view to_string(PredictionConvention convention);
std::optional<PredictionConvention> parse_convention(std::string_view name);

}  // namespace pcgraph
