#include "pcgraph/pcn.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pcgraph/errors.hpp"

namespace pcgraph::pcn {

namespace {

void check_state(const PcnModel& model, const PcnState& state) {
  const LayerSpec& spec = model.spec();
  if (state.activations.size() != spec.layer_count()) {
    throw DomainError("state has " + std::to_string(state.activations.size()) +
                      " layers, model has " + std::to_string(spec.layer_count()));
  }
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    if (static_cast<std::size_t>(state.activations[l].size()) != spec.width(l)) {
      throw DomainError("state width mismatch in layer " + std::to_string(l));
    }
  }
}

void check_input(const PcnModel& model, const Vector& x, const std::optional<Vector>& y) {
  if (static_cast<std::size_t>(x.size()) != model.spec().input_width()) {
    throw DomainError("input width mismatch");
  }
  if (y && static_cast<std::size_t>(y->size()) != model.spec().output_width()) {
    throw DomainError("label width mismatch");
  }
}

bool all_finite(const std::vector<Vector>& layers) {
  for (const Vector& v : layers) {
    if (!v.allFinite()) return false;
  }
  return true;
}

double max_norm(const std::vector<Vector>& layers) {
  double out = 0.0;
  for (const Vector& v : layers) {
    if (v.size() > 0) out = std::max(out, v.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace

PcnModel PcnModel::with_weights(std::vector<Matrix> weights) const {
  PcnModel out = *this;
  out.set_weights(std::move(weights));
  return out;
}

fnn::FnnModel PcnModel::as_fnn() const {
  return fnn::FnnModel(spec(), weights(), activation(), convention());
}

bool is_clamped(const PcnModel& model, ClampMode clamp, std::size_t layer) {
  return layer == 0 || (clamp == ClampMode::Training && layer == model.spec().depth());
}

std::vector<Vector> predictions(const PcnModel& model, const PcnState& state) {
  check_state(model, state);
  const std::size_t depth = model.spec().depth();
  std::vector<Vector> mu(depth + 1);
  for (std::size_t l = 1; l <= depth; ++l) {
    mu[l] = predict(model.weight(l - 1), state.activations[l - 1], model.activation(),
                    model.convention());
  }
  return mu;
}

std::vector<Vector> errors(const PcnModel& model, const PcnState& state) {
  std::vector<Vector> eps = predictions(model, state);
  for (std::size_t l = 1; l < eps.size(); ++l) eps[l] = state.activations[l] - eps[l];
  return eps;
}

double energy(const PcnModel& model, const PcnState& state) {
  const std::vector<Vector> eps = errors(model, state);
  double total = 0.0;
  for (std::size_t l = 1; l < eps.size(); ++l) total += eps[l].squaredNorm();
  return 0.5 * total;
}

std::vector<Vector> activation_gradients(const PcnModel& model, const PcnState& state) {
  const std::vector<Vector> eps = errors(model, state);
  const LayerSpec& spec = model.spec();
  const std::size_t depth = spec.depth();
  const ActivationKind f = model.activation();

  std::vector<Vector> grads(depth + 1);
  grads[0] = Vector::Zero(static_cast<Eigen::Index>(spec.width(0)));
  for (std::size_t l = 1; l <= depth; ++l) {
    if (is_clamped(model, state.clamp, l)) {
      grads[l] = Vector::Zero(static_cast<Eigen::Index>(spec.width(l)));
      continue;
    }
    grads[l] = eps[l];
    if (l == depth) continue;
    const Matrix& w = model.weight(l);
    const Vector& a = state.activations[l];
    if (model.convention() == PredictionConvention::MatrixActivation) {
      const Vector slope = activate_derivative(f, w * a);
      grads[l].noalias() -= w.transpose() * eps[l + 1].cwiseProduct(slope);
    } else {
      const Vector back = w.transpose() * eps[l + 1];
      grads[l] -= activate_derivative(f, a).cwiseProduct(back);
    }
  }
  return grads;
}

std::vector<Matrix> weight_gradients(const PcnModel& model, const PcnState& state) {
  const std::vector<Vector> eps = errors(model, state);
  const std::size_t depth = model.spec().depth();
  const ActivationKind f = model.activation();

  std::vector<Matrix> grads(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const Vector& a = state.activations[l];
    if (model.convention() == PredictionConvention::MatrixActivation) {
      const Vector delta = eps[l + 1].cwiseProduct(activate_derivative(f, model.weight(l) * a));
      grads[l] = -delta * a.transpose();
    } else {
      grads[l] = -eps[l + 1] * activate(f, a).transpose();
    }
  }
  return grads;
}

PcnState feedforward_init(const PcnModel& model, const Vector& x, const std::optional<Vector>& y) {
  check_input(model, x, y);
  const std::size_t depth = model.spec().depth();
  PcnState state;
  state.clamp = y ? ClampMode::Training : ClampMode::Testing;
  state.activations.reserve(depth + 1);
  state.activations.push_back(x);
  for (std::size_t l = 1; l <= depth; ++l) {
    if (l == depth && y) {
      state.activations.push_back(*y);
    } else {
      state.activations.push_back(predict(model.weight(l - 1), state.activations[l - 1],
                                          model.activation(), model.convention()));
    }
  }
  return state;
}

PcnState initial_state(const PcnModel& model, const Vector& x, const std::optional<Vector>& y,
                       const InferenceConfig& config) {
  if (config.init == InitMode::Feedforward) return feedforward_init(model, x, y);
  check_input(model, x, y);

  const LayerSpec& spec = model.spec();
  PcnState state;
  state.clamp = y ? ClampMode::Training : ClampMode::Testing;
  state.activations.reserve(spec.layer_count());
  state.activations.push_back(x);
  std::mt19937_64 rng(config.init_seed);
  std::normal_distribution<double> normal(0.0, config.init_std);
  for (std::size_t l = 1; l <= spec.depth(); ++l) {
    const auto width = static_cast<Eigen::Index>(spec.width(l));
    if (l == spec.depth() && y) {
      state.activations.push_back(*y);
    } else if (config.init == InitMode::Zero) {
      state.activations.push_back(Vector::Zero(width));
    } else {
      Vector v(width);
      for (Eigen::Index i = 0; i < width; ++i) v[i] = normal(rng);
      state.activations.push_back(std::move(v));
    }
  }
  return state;
}

double descent_step(const PcnModel& model, PcnState& state, double step_size) {
  const std::vector<Vector> grads = activation_gradients(model, state);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    if (!is_clamped(model, state.clamp, l)) state.activations[l] -= step_size * grads[l];
  }
  return max_norm(grads);
}

Inference<PcnState> relax(const PcnModel& model, PcnState state, const InferenceConfig& config) {
  config.validate();
  check_state(model, state);
  Inference<PcnState> out;
  for (std::size_t t = 0; t < config.max_steps; ++t) {
    const std::vector<Vector> grads = activation_gradients(model, state);
    if (!all_finite(grads)) throw DivergedError(t, "non-finite gradient at inference step " + std::to_string(t));
    if (max_norm(grads) <= config.stop_tolerance) {
      out.converged = true;
      break;
    }
    for (std::size_t l = 0; l < grads.size(); ++l) {
      if (!is_clamped(model, state.clamp, l)) state.activations[l] -= config.step_size * grads[l];
    }
    ++out.steps;
    if (!all_finite(state.activations)) {
      throw DivergedError(t, "non-finite activation at inference step " + std::to_string(t));
    }
  }
  out.state = std::move(state);
  return out;
}

Inference<PcnState> infer(const PcnModel& model, const Vector& x, const std::optional<Vector>& y,
                          const InferenceConfig& config) {
  config.validate();
  if (config.solver == Solver::ExactBackwardSubstitution) {
    if (y) throw DomainError("the exact solver only applies in Testing mode");
    check_input(model, x, y);
    Inference<PcnState> out;
    out.state.clamp = ClampMode::Testing;
    out.state.activations = fnn::forward(model.as_fnn(), x);
    out.converged = true;
    return out;
  }
  return relax(model, initial_state(model, x, y, config), config);
}

PcnModel learn_step(const PcnModel& model, const PcnState& state, double learning_rate) {
  return apply_weight_gradients(model, weight_gradients(model, state), learning_rate);
}

PcnModel apply_weight_gradients(const PcnModel& model, const std::vector<Matrix>& gradients,
                                double learning_rate) {
  if (gradients.size() != model.weights().size()) throw DomainError("gradient count mismatch");
  std::vector<Matrix> next = model.weights();
  for (std::size_t l = 0; l < next.size(); ++l) {
    if (gradients[l].rows() != next[l].rows() || gradients[l].cols() != next[l].cols()) {
      throw DomainError("gradient shape mismatch in layer " + std::to_string(l));
    }
    next[l] -= learning_rate * gradients[l];
  }
  return model.with_weights(std::move(next));
}

std::vector<Matrix> average_weight_gradients(std::span<const std::vector<Matrix>> per_sample) {
  if (per_sample.empty()) throw DomainError("cannot average an empty batch");
  std::vector<Matrix> sum = per_sample.front();
  for (std::size_t s = 1; s < per_sample.size(); ++s) {
    if (per_sample[s].size() != sum.size()) throw DomainError("gradient count mismatch");
    for (std::size_t l = 0; l < sum.size(); ++l) sum[l] += per_sample[s][l];
  }
  const double scale = 1.0 / static_cast<double>(per_sample.size());
  for (Matrix& m : sum) m *= scale;
  return sum;
}

}  // namespace pcgraph::pcn
