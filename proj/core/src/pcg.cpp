#include "pcgraph/pcg.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pcgraph/errors.hpp"

namespace pcgraph::pcg {

namespace {

constexpr double kSparseDensityThreshold = 0.25;

/// Products with the model's weight matrix along the chosen path.
class Products {
 public:
  Products(const PcgModel& model, EvaluationPath path) : model_(model) {
    if (resolve_path(model, path) == EvaluationPath::Sparse) {
      csr_.emplace(model.weights(), model.mask());
    }
  }

  Vector forward(const Vector& x, OpCounter* counter) const {
    if (csr_) return csr_->multiply(x, counter);
    if (counter) counter->madds += dense_cost();
    return model_.weights() * x;
  }

  Vector backward(const Vector& x, OpCounter* counter) const {
    if (csr_) return csr_->multiply_transposed(x, counter);
    if (counter) counter->madds += dense_cost();
    return model_.weights().transpose() * x;
  }

 private:
  std::uint64_t dense_cost() const {
    const auto n = static_cast<std::uint64_t>(model_.node_count());
    return n * n;
  }

  const PcgModel& model_;
  std::optional<CsrWeights> csr_;
};

void check_state(const PcgModel& model, const PcgState& state) {
  if (static_cast<std::size_t>(state.activations.size()) != model.node_count()) {
    throw DomainError("state has " + std::to_string(state.activations.size()) +
                      " nodes, model has " + std::to_string(model.node_count()));
  }
}

void check_input(const PcgModel& model, const Vector& x, const std::optional<Vector>& y) {
  if (static_cast<std::size_t>(x.size()) != model.input_width()) {
    throw DomainError("input width mismatch");
  }
  if (y && static_cast<std::size_t>(y->size()) != model.output_width()) {
    throw DomainError("label width mismatch");
  }
}

Vector predictions_with(const PcgModel& model, const Products& products, const Vector& a,
                        OpCounter* counter) {
  if (model.convention() == PredictionConvention::MatrixActivation) {
    return activate(model.activation(), products.forward(a, counter));
  }
  return products.forward(activate(model.activation(), a), counter);
}

Vector gradient_with(const PcgModel& model, const Products& products, const PcgState& state,
                     OpCounter* counter) {
  const Vector& a = state.activations;
  const ActivationKind f = model.activation();
  Vector grad;
  if (model.convention() == PredictionConvention::MatrixActivation) {
    const Vector drive = products.forward(a, counter);
    const Vector eps = a - activate(f, drive);
    const Vector delta = eps.cwiseProduct(activate_derivative(f, drive));
    grad = eps - products.backward(delta, counter);
  } else {
    const Vector eps = a - products.forward(activate(f, a), counter);
    grad = eps - activate_derivative(f, a).cwiseProduct(products.backward(eps, counter));
  }
  for (std::size_t i = 0; i < model.node_count(); ++i) {
    if (is_clamped(model, state.clamp, i)) grad[static_cast<Eigen::Index>(i)] = 0.0;
  }
  return grad;
}

void apply_step(const PcgModel& model, PcgState& state, const Vector& grad, double step_size) {
  for (std::size_t i = 0; i < model.node_count(); ++i) {
    if (!is_clamped(model, state.clamp, i)) {
      const auto k = static_cast<Eigen::Index>(i);
      state.activations[k] -= step_size * grad[k];
    }
  }
}

PcgState clamped_state(const PcgModel& model, const Vector& x, const std::optional<Vector>& y) {
  PcgState state;
  state.clamp = y ? ClampMode::Training : ClampMode::Testing;
  state.activations = Vector::Zero(static_cast<Eigen::Index>(model.node_count()));
  state.activations.head(x.size()) = x;
  if (y) state.activations.tail(y->size()) = *y;
  return state;
}

}  // namespace

PcgModel::PcgModel(Matrix weights, Mask mask, ActivationKind activation,
                   PredictionConvention convention, std::size_t input_width,
                   std::size_t output_width)
    : weights_(std::move(weights)),
      mask_(std::move(mask)),
      activation_(activation),
      convention_(convention),
      input_width_(input_width),
      output_width_(output_width) {
  if (weights_.rows() != weights_.cols()) throw DomainError("graph weights must be square");
  if (mask_.rows() != weights_.rows() || mask_.cols() != weights_.cols()) {
    throw DomainError("mask shape does not match weights");
  }
  if (input_width_ == 0 || output_width_ == 0 || input_width_ + output_width_ > node_count()) {
    throw DomainError("clamp widths must be positive with n_x + n_y <= N");
  }
  for (Eigen::Index c = 0; c < weights_.cols(); ++c) {
    for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
      if (!mask_(r, c) && weights_(r, c) != 0.0) {
        throw StructureError("weight (" + std::to_string(r + 1) + ", " + std::to_string(c + 1) +
                             ") is nonzero outside the mask");
      }
    }
  }
  connections_ = static_cast<std::size_t>(mask_.count());
}

PcgModel PcgModel::with_weights(const Matrix& weights) const {
  if (weights.rows() != weights_.rows() || weights.cols() != weights_.cols()) {
    throw DomainError("weight shape mismatch");
  }
  PcgModel out = *this;
  out.weights_ = mask_.select(weights, Matrix::Zero(weights.rows(), weights.cols()));
  return out;
}

bool is_clamped(const PcgModel& model, ClampMode clamp, std::size_t node) {
  if (node < model.input_width()) return true;
  return clamp == ClampMode::Training && node >= model.node_count() - model.output_width();
}

EvaluationPath resolve_path(const PcgModel& model, EvaluationPath path) {
  if (path != EvaluationPath::Auto) return path;
  const auto n = static_cast<double>(model.node_count());
  const double density = static_cast<double>(model.connection_count()) / (n * n);
  return density < kSparseDensityThreshold ? EvaluationPath::Sparse : EvaluationPath::Dense;
}

Vector predictions(const PcgModel& model, const PcgState& state, EvaluationPath path,
                   OpCounter* counter) {
  check_state(model, state);
  return predictions_with(model, Products(model, path), state.activations, counter);
}

Vector errors(const PcgModel& model, const PcgState& state, EvaluationPath path,
              OpCounter* counter) {
  return state.activations - predictions(model, state, path, counter);
}

double energy(const PcgModel& model, const PcgState& state, EvaluationPath path) {
  return 0.5 * errors(model, state, path).squaredNorm();
}

Vector activation_gradient(const PcgModel& model, const PcgState& state, EvaluationPath path,
                           OpCounter* counter) {
  check_state(model, state);
  return gradient_with(model, Products(model, path), state, counter);
}

Matrix weight_gradient(const PcgModel& model, const PcgState& state) {
  check_state(model, state);
  const Vector& a = state.activations;
  const ActivationKind f = model.activation();
  Matrix grad;
  if (model.convention() == PredictionConvention::MatrixActivation) {
    const Vector drive = model.weights() * a;
    const Vector eps = a - activate(f, drive);
    grad = -eps.cwiseProduct(activate_derivative(f, drive)) * a.transpose();
  } else {
    const Vector eps = a - model.weights() * activate(f, a);
    grad = -eps * activate(f, a).transpose();
  }
  return model.mask().select(grad, Matrix::Zero(grad.rows(), grad.cols()));
}

double descent_step(const PcgModel& model, PcgState& state, double step_size,
                    EvaluationPath path, OpCounter* counter) {
  const Vector grad = activation_gradient(model, state, path, counter);
  apply_step(model, state, grad, step_size);
  return grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
}

bool feedforward_compatible(const Mask& mask, const LayerSpec& partition) {
  if (static_cast<std::size_t>(mask.rows()) != partition.node_count() ||
      mask.rows() != mask.cols()) {
    return false;
  }
  for (Eigen::Index c = 0; c < mask.cols(); ++c) {
    const std::size_t source = partition.layer_of(static_cast<std::size_t>(c));
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
      if (mask(r, c) && partition.layer_of(static_cast<std::size_t>(r)) <= source) return false;
    }
  }
  return true;
}

PcgState feedforward_init(const PcgModel& model, const LayerSpec& partition, const Vector& x,
                          const std::optional<Vector>& y) {
  check_input(model, x, y);
  if (partition.node_count() != model.node_count() ||
      partition.input_width() != model.input_width() ||
      partition.output_width() != model.output_width()) {
    throw DomainError("partition does not match the graph's node count and clamp widths");
  }
  if (!feedforward_compatible(model.mask(), partition)) {
    throw InitNotApplicableError("mask has connections that are not strictly feedforward");
  }

  PcgState state = clamped_state(model, x, y);
  const ActivationKind f = model.activation();
  const std::size_t depth = partition.depth();
  for (std::size_t l = 1; l <= depth; ++l) {
    if (l == depth && y) break;
    const auto row = static_cast<Eigen::Index>(partition.begin(l));
    const auto rows = static_cast<Eigen::Index>(partition.width(l));
    // One product over every earlier node, so each row is summed in the same
    // order as a full prediction and the resulting errors are exactly zero.
    const auto sources = row;
    const auto weights = model.weights().block(row, 0, rows, sources);
    const auto below = state.activations.head(sources);
    Vector drive = model.convention() == PredictionConvention::MatrixActivation
                       ? Vector(weights * below)
                       : Vector(weights * activate(f, below));
    state.activations.segment(row, rows) =
        model.convention() == PredictionConvention::MatrixActivation ? activate(f, drive) : drive;
  }
  return state;
}

PcgState initial_state(const PcgModel& model, const Vector& x, const std::optional<Vector>& y,
                       const InferenceConfig& config, const std::optional<LayerSpec>& partition) {
  if (config.init == InitMode::Feedforward) {
    if (!partition) throw InitNotApplicableError("feedforward init needs a layer partition");
    return feedforward_init(model, *partition, x, y);
  }
  check_input(model, x, y);
  PcgState state = clamped_state(model, x, y);
  if (config.init == InitMode::Gaussian) {
    std::mt19937_64 rng(config.init_seed);
    std::normal_distribution<double> normal(0.0, config.init_std);
    for (std::size_t i = 0; i < model.node_count(); ++i) {
      if (!is_clamped(model, state.clamp, i)) state.activations[static_cast<Eigen::Index>(i)] = normal(rng);
    }
  }
  return state;
}

Inference<PcgState> relax(const PcgModel& model, PcgState state, const InferenceConfig& config) {
  config.validate();
  check_state(model, state);
  const Products products(model, config.evaluation);
  OpCounter counter;
  Inference<PcgState> out;
  for (std::size_t t = 0; t < config.max_steps; ++t) {
    const Vector grad = gradient_with(model, products, state, &counter);
    if (!grad.allFinite()) {
      throw DivergedError(t, "non-finite gradient at inference step " + std::to_string(t));
    }
    if (grad.cwiseAbs().maxCoeff() <= config.stop_tolerance) {
      out.converged = true;
      break;
    }
    apply_step(model, state, grad, config.step_size);
    ++out.steps;
    if (!state.activations.allFinite()) {
      throw DivergedError(t, "non-finite activation at inference step " + std::to_string(t));
    }
  }
  out.state = std::move(state);
  out.madds = counter.madds;
  return out;
}

Inference<PcgState> infer(const PcgModel& model, const Vector& x, const std::optional<Vector>& y,
                          const InferenceConfig& config, const std::optional<LayerSpec>& partition) {
  config.validate();
  if (config.solver == Solver::ExactBackwardSubstitution) {
    throw DomainError("graphs have no exact solver; use gradient descent");
  }
  return relax(model, initial_state(model, x, y, config, partition), config);
}

PcgModel learn_step(const PcgModel& model, const PcgState& state, double learning_rate) {
  return apply_weight_gradient(model, weight_gradient(model, state), learning_rate);
}

PcgModel apply_weight_gradient(const PcgModel& model, const Matrix& gradient,
                               double learning_rate) {
  if (gradient.rows() != model.weights().rows() || gradient.cols() != model.weights().cols()) {
    throw DomainError("gradient shape mismatch");
  }
  return model.with_weights(model.weights() - learning_rate * gradient);
}

Matrix average_weight_gradients(std::span<const Matrix> per_sample) {
  if (per_sample.empty()) throw DomainError("cannot average an empty batch");
  Matrix sum = per_sample.front();
  for (std::size_t s = 1; s < per_sample.size(); ++s) sum += per_sample[s];
  return sum / static_cast<double>(per_sample.size());
}

Mask hierarchical_mask(const LayerSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.node_count());
  Mask mask = Mask::Constant(n, n, false);
  for (std::size_t l = 1; l <= spec.depth(); ++l) {
    mask.block(static_cast<Eigen::Index>(spec.begin(l)), static_cast<Eigen::Index>(spec.begin(l - 1)),
               static_cast<Eigen::Index>(spec.width(l)), static_cast<Eigen::Index>(spec.width(l - 1)))
        .setConstant(true);
  }
  return mask;
}

PcgModel hierarchical_embed(const pcn::PcnModel& pcn) {
  const LayerSpec& spec = pcn.spec();
  const auto n = static_cast<Eigen::Index>(spec.node_count());
  Matrix weights = Matrix::Zero(n, n);
  for (std::size_t l = 1; l <= spec.depth(); ++l) {
    const Matrix& w = pcn.weight(l - 1);
    weights.block(static_cast<Eigen::Index>(spec.begin(l)),
                  static_cast<Eigen::Index>(spec.begin(l - 1)), w.rows(), w.cols()) = w;
  }
  return PcgModel(std::move(weights), hierarchical_mask(spec), pcn.activation(), pcn.convention(),
                  spec.input_width(), spec.output_width());
}

pcn::PcnModel extract_pcn(const PcgModel& model, const LayerSpec& spec) {
  if (model.node_count() != spec.node_count()) {
    throw StructureError("graph has " + std::to_string(model.node_count()) +
                         " nodes, layer spec has " + std::to_string(spec.node_count()));
  }
  if (model.mask() != hierarchical_mask(spec)) {
    throw StructureError("mask is not the hierarchical mask of the layer spec");
  }
  if (model.input_width() != spec.input_width() || model.output_width() != spec.output_width()) {
    throw StructureError("clamp widths do not match the first and last layers");
  }
  std::vector<Matrix> weights;
  weights.reserve(spec.depth());
  for (std::size_t l = 1; l <= spec.depth(); ++l) {
    weights.emplace_back(model.weights().block(
        static_cast<Eigen::Index>(spec.begin(l)), static_cast<Eigen::Index>(spec.begin(l - 1)),
        static_cast<Eigen::Index>(spec.width(l)), static_cast<Eigen::Index>(spec.width(l - 1))));
  }
  return pcn::PcnModel(spec, std::move(weights), model.activation(), model.convention());
}

}  // namespace pcgraph::pcg
