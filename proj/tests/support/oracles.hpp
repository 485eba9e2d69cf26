#pragma once

// Reference implementations used only by tests. Everything here is written
// with explicit per-neuron loops and never calls into the library's numeric
// routines, so agreement with the library is meaningful.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "pcgraph/activation.hpp"
#include "pcgraph/pcg.hpp"
#include "pcgraph/pcn.hpp"
#include "pcgraph/types.hpp"

namespace pcgraph::oracle {

double f(ActivationKind kind, double x);
double f_prime(ActivationKind kind, double x);

/// mu_i for one layer: explicit double loop.
Vector predict(const Matrix& w, const Vector& a, ActivationKind kind, PredictionConvention conv);

std::vector<Vector> forward(const std::vector<Matrix>& weights, const Vector& x,
                            ActivationKind kind, PredictionConvention conv);

double pcn_energy(const std::vector<Matrix>& weights, const std::vector<Vector>& a,
                  ActivationKind kind, PredictionConvention conv);

double pcg_energy(const Matrix& w, const Vector& a, ActivationKind kind, PredictionConvention conv);

/// Central differences of `fn` at `at`. Entries with free[i] == false get 0.
Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& at,
                          double h, const std::vector<bool>& free);

/// Central differences with respect to every entry of a matrix (masked
/// entries, when a mask is given, are left at 0).
Matrix central_difference(const std::function<double(const Matrix&)>& fn, const Matrix& at,
                          double h, const Mask* mask = nullptr);

/// |a - b| / max(|a|, |b|, 1e-12) in the Frobenius norm.
double relative_error(const Matrix& a, const Matrix& b);

double max_abs_diff(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Random instances --------------------------------------------------------

using Engine = std::mt19937_64;

std::vector<std::size_t> random_sizes(Engine& rng, std::size_t min_depth, std::size_t max_depth,
                                      std::size_t max_width);
Matrix random_matrix(Engine& rng, Eigen::Index rows, Eigen::Index cols, double sd);
Vector random_vector(Engine& rng, Eigen::Index size, double sd);
pcn::PcnModel random_pcn(Engine& rng, const std::vector<std::size_t>& sizes, ActivationKind kind,
                         PredictionConvention conv, double scale = 1.0);
/// Random per-layer activations for the given sizes.
std::vector<Vector> random_layers(Engine& rng, const std::vector<std::size_t>& sizes, double sd);
/// Random weights restricted to `mask`.
pcg::PcgModel random_pcg(Engine& rng, const Mask& mask, ActivationKind kind,
                         PredictionConvention conv, std::size_t n_x, std::size_t n_y,
                         double scale = 1.0);

}  // namespace pcgraph::oracle
