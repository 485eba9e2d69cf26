#pragma once

#include <Eigen/Core>

namespace pcgraph {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Binary connectivity pattern; true marks a usable (trainable) weight.
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// How a node's prediction is formed from its sources.
///  MatrixActivation: mu_i = f(sum_j w_ij a_j)
///  ActivationMatrix: mu_i = sum_j w_ij f(a_j)
enum class PredictionConvention { MatrixActivation, ActivationMatrix };

/// Training clamps inputs and outputs; Testing clamps inputs only.
enum class ClampMode { Training, Testing };

}  // namespace pcgraph
