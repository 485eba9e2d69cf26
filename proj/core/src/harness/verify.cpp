#include "pcgraph/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pcgraph/errors.hpp"
#include "pcgraph/fnn.hpp"
#include "pcgraph/harness/dataset.hpp"
#include "pcgraph/pcg.hpp"
#include "pcgraph/pcn.hpp"
#include "pcgraph/random.hpp"
#include "pcgraph/topology.hpp"

namespace pcgraph::harness {

namespace {

constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kGradientTolerance = 1e-6;
constexpr double kTheorem2Tolerance = 1e-12;

// Weight scale for random instances; keeps every layer map contractive enough
// that plain gradient descent settles within the tested step budget.
constexpr double kInstanceWeightScale = 0.5;

struct Instance {
  pcn::PcnModel model;
  Vector x;
  Vector y;
};

ActivationKind pick_activation(Rng& rng) {
  return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? ActivationKind::Tanh
                                                            : ActivationKind::Sigmoid;
}

PredictionConvention convention_for(std::size_t i) {
  return i % 2 == 0 ? PredictionConvention::MatrixActivation
                    : PredictionConvention::ActivationMatrix;
}

LayerSpec random_spec(Rng& rng, std::size_t min_depth, std::size_t max_depth,
                      std::size_t max_width) {
  std::uniform_int_distribution<std::size_t> depth(min_depth, max_depth);
  std::uniform_int_distribution<std::size_t> width(1, max_width);
  std::vector<std::size_t> sizes(depth(rng) + 1);
  for (auto& n : sizes) n = width(rng);
  return LayerSpec(std::move(sizes));
}

Instance random_instance(Rng& rng, PredictionConvention convention, std::size_t max_width) {
  LayerSpec spec = random_spec(rng, 2, 4, max_width);
  auto weights = gaussian_layer_weights(spec, kInstanceWeightScale, rng);
  pcn::PcnModel model(spec, std::move(weights), pick_activation(rng), convention);
  Vector x = gaussian_vector(static_cast<Eigen::Index>(spec.input_width()), 1.0, rng);
  Vector y = gaussian_vector(static_cast<Eigen::Index>(spec.output_width()), 1.0, rng);
  return {std::move(model), std::move(x), std::move(y)};
}

pcn::PcnState random_state(const pcn::PcnModel& model, const Vector& x, ClampMode clamp,
                           Rng& rng) {
  pcn::PcnState state;
  state.clamp = clamp;
  state.activations.push_back(x);
  for (std::size_t l = 1; l <= model.spec().depth(); ++l) {
    state.activations.push_back(
        gaussian_vector(static_cast<Eigen::Index>(model.spec().width(l)), 1.0, rng));
  }
  return state;
}

double relative_error(const Vector& analytic, const Vector& numeric) {
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / scale;
}

Vector flatten_matrices(const std::vector<Matrix>& ms) {
  Eigen::Index total = 0;
  for (const Matrix& m : ms) total += m.size();
  Vector out(total);
  Eigen::Index at = 0;
  for (const Matrix& m : ms) {
    out.segment(at, m.size()) = m.reshaped();
    at += m.size();
  }
  return out;
}

template <class Energy>
double central_difference(double& slot, Energy&& energy) {
  const double saved = slot;
  slot = saved + kFiniteDifferenceStep;
  const double up = energy();
  slot = saved - kFiniteDifferenceStep;
  const double down = energy();
  slot = saved;
  return (up - down) / (2.0 * kFiniteDifferenceStep);
}

CheckResult make_check(std::string name, double measured, double threshold, std::size_t n,
                       bool inclusive = false) {
  const bool ok = std::isfinite(measured) && (inclusive ? measured <= threshold : measured < threshold);
  return CheckResult{std::move(name), ok, measured, threshold, n};
}

std::vector<CheckResult> theorem1(Rng& rng) {
  constexpr std::size_t kInstances = 50;
  double exact_diff = 0.0;
  double worst_distance = 0.0;
  double worst_energy = 0.0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    const Instance inst = random_instance(rng, convention_for(i), 16);
    const auto reference = fnn::forward(inst.model.as_fnn(), inst.x);

    InferenceConfig exact;
    exact.solver = Solver::ExactBackwardSubstitution;
    const auto solved = pcn::infer(inst.model, inst.x, std::nullopt, exact).state;
    for (std::size_t l = 0; l < reference.size(); ++l) {
      for (Eigen::Index k = 0; k < reference[l].size(); ++k) {
        if (solved.activations[l][k] != reference[l][k]) exact_diff = 1.0;
      }
    }

    InferenceConfig descent;
    descent.init = InitMode::Zero;
    descent.step_size = 0.05;
    descent.max_steps = 2000;
    descent.stop_tolerance = 0.0;
    const auto relaxed = pcn::infer(inst.model, inst.x, std::nullopt, descent).state;
    for (std::size_t l = 0; l < reference.size(); ++l) {
      worst_distance = std::max(worst_distance,
                                (relaxed.activations[l] - reference[l]).cwiseAbs().maxCoeff());
    }
    worst_energy = std::max(worst_energy, pcn::energy(inst.model, relaxed));
  }
  return {
      make_check("exact solver equals feedforward pass bit-for-bit", exact_diff, 0.0, kInstances, true),
      make_check("gradient descent max |a - a_fnn|", worst_distance, 1e-4, kInstances),
      make_check("gradient descent final E_N", worst_energy, 1e-8, kInstances),
  };
}

std::vector<CheckResult> theorem2(Rng& rng) {
  constexpr std::size_t kEnergyStates = 100;
  constexpr std::size_t kDynamicsInstances = 20;
  constexpr std::size_t kSteps = 20;
  constexpr double kStepSize = 0.05;
  constexpr double kLearningRate = 0.05;

  double energy_gap = 0.0;
  for (std::size_t i = 0; i < kEnergyStates; ++i) {
    const Instance inst = random_instance(rng, convention_for(i), 8);
    const pcg::PcgModel graph = pcg::hierarchical_embed(inst.model);
    const ClampMode clamp = i % 3 == 0 ? ClampMode::Testing : ClampMode::Training;
    const pcn::PcnState layered = random_state(inst.model, inst.x, clamp, rng);
    const pcg::PcgState flat{flatten(layered.activations, inst.model.spec()), clamp};
    const double f0 = inst.model.convention() == PredictionConvention::MatrixActivation
                          ? activate(inst.model.activation(), 0.0)
                          : 0.0;
    const double constant = 0.5 * (inst.x.array() - f0).square().sum();
    energy_gap = std::max(energy_gap, std::abs(pcg::energy(graph, flat) -
                                               pcn::energy(inst.model, layered) - constant));
  }

  double activity_gap = 0.0;
  double weight_gap = 0.0;
  for (std::size_t i = 0; i < kDynamicsInstances; ++i) {
    const Instance inst = random_instance(rng, convention_for(i), 8);
    const LayerSpec& spec = inst.model.spec();
    pcn::PcnModel layered_model = inst.model;
    pcg::PcgModel graph = pcg::hierarchical_embed(inst.model);
    const ClampMode clamp = i % 2 == 0 ? ClampMode::Training : ClampMode::Testing;
    pcn::PcnState layered = random_state(inst.model, inst.x, clamp, rng);
    if (clamp == ClampMode::Training) layered.activations.back() = inst.y;
    pcg::PcgState flat{flatten(layered.activations, spec), clamp};

    for (std::size_t t = 0; t < kSteps; ++t) {
      const Vector before = flat.activations;
      const Vector layered_before = flatten(layered.activations, spec);
      pcn::descent_step(layered_model, layered, kStepSize);
      pcg::descent_step(graph, flat, kStepSize);
      const Vector layered_delta = flatten(layered.activations, spec) - layered_before;
      const Vector flat_delta = flat.activations - before;
      activity_gap = std::max(activity_gap, (layered_delta - flat_delta).cwiseAbs().maxCoeff());

      if (clamp == ClampMode::Training) {
        const auto layered_grads = pcn::weight_gradients(layered_model, layered);
        const Matrix flat_grad = pcg::weight_gradient(graph, flat);
        for (std::size_t l = 1; l <= spec.depth(); ++l) {
          const Matrix block = flat_grad.block(
              static_cast<Eigen::Index>(spec.begin(l)), static_cast<Eigen::Index>(spec.begin(l - 1)),
              static_cast<Eigen::Index>(spec.width(l)), static_cast<Eigen::Index>(spec.width(l - 1)));
          weight_gap = std::max(weight_gap,
                                kLearningRate * (block - layered_grads[l - 1]).cwiseAbs().maxCoeff());
        }
        layered_model = pcn::apply_weight_gradients(layered_model, layered_grads, kLearningRate);
        graph = pcg::apply_weight_gradient(graph, flat_grad, kLearningRate);
      }
    }
  }
  return {
      make_check("|E_G - E_N - C|", energy_gap, kTheorem2Tolerance, kEnergyStates),
      make_check("activity update difference", activity_gap, kTheorem2Tolerance, kDynamicsInstances),
      make_check("weight update difference", weight_gap, kTheorem2Tolerance, kDynamicsInstances),
  };
}

double pcn_activation_fd(const pcn::PcnModel& model, pcn::PcnState state) {
  const auto analytic = pcn::activation_gradients(model, state);
  std::vector<Vector> numeric = analytic;
  for (std::size_t l = 0; l < state.activations.size(); ++l) {
    numeric[l].setZero();
    if (pcn::is_clamped(model, state.clamp, l)) continue;
    for (Eigen::Index k = 0; k < numeric[l].size(); ++k) {
      numeric[l][k] = central_difference(state.activations[l][k],
                                         [&] { return pcn::energy(model, state); });
    }
  }
  return relative_error(flatten(analytic, model.spec()), flatten(numeric, model.spec()));
}

double pcn_weight_fd(const pcn::PcnModel& model, const pcn::PcnState& state) {
  const auto analytic = pcn::weight_gradients(model, state);
  std::vector<Matrix> weights = model.weights();
  std::vector<Matrix> numeric = analytic;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index k = 0; k < weights[l].size(); ++k) {
      numeric[l].data()[k] = central_difference(weights[l].data()[k], [&] {
        return pcn::energy(model.with_weights(weights), state);
      });
    }
  }
  return relative_error(flatten_matrices(analytic), flatten_matrices(numeric));
}

pcg::PcgModel random_graph(Rng& rng, PredictionConvention convention, LayerSpec& spec_out) {
  using topology::ConnectionKind;
  static const std::vector<topology::ConnectionSet> kMasks = {
      {ConnectionKind::Forward},
      {ConnectionKind::Forward, ConnectionKind::ForwardSkip},
      {ConnectionKind::Forward, ConnectionKind::Lateral},
      {ConnectionKind::Forward, ConnectionKind::Backward, ConnectionKind::BackwardSkip},
      {ConnectionKind::AllToAll},
      {ConnectionKind::AllToAll, ConnectionKind::SelfLoop},
  };
  spec_out = random_spec(rng, 1, 3, 4);
  const auto& kinds = kMasks[std::uniform_int_distribution<std::size_t>(0, kMasks.size() - 1)(rng)];
  Mask mask = topology::build_mask(spec_out, kinds);
  Matrix weights = gaussian_weights(mask, 1.0, rng);
  return pcg::PcgModel(std::move(weights), std::move(mask), pick_activation(rng), convention,
                       spec_out.input_width(), spec_out.output_width());
}

double pcg_activation_fd(const pcg::PcgModel& model, pcg::PcgState state) {
  const Vector analytic = pcg::activation_gradient(model, state);
  Vector numeric = Vector::Zero(analytic.size());
  for (std::size_t i = 0; i < model.node_count(); ++i) {
    if (pcg::is_clamped(model, state.clamp, i)) continue;
    const auto k = static_cast<Eigen::Index>(i);
    numeric[k] = central_difference(state.activations[k], [&] { return pcg::energy(model, state); });
  }
  return relative_error(analytic, numeric);
}

double pcg_weight_fd(const pcg::PcgModel& model, const pcg::PcgState& state) {
  const Matrix analytic = pcg::weight_gradient(model, state);
  Matrix weights = model.weights();
  Matrix numeric = Matrix::Zero(analytic.rows(), analytic.cols());
  for (Eigen::Index c = 0; c < weights.cols(); ++c) {
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
      if (!model.mask()(r, c)) continue;
      numeric(r, c) = central_difference(weights(r, c), [&] {
        return pcg::energy(model.with_weights(weights), state);
      });
    }
  }
  return relative_error(analytic.reshaped(), numeric.reshaped());
}

std::vector<CheckResult> gradients(Rng& rng) {
  constexpr std::size_t kInstances = 20;
  std::vector<CheckResult> checks;
  for (const auto convention :
       {PredictionConvention::MatrixActivation, PredictionConvention::ActivationMatrix}) {
    const std::string suffix = std::string(" (") + std::string(to_string(convention)) + ")";
    double pcn_act = 0.0, pcn_w = 0.0, pcg_act = 0.0, pcg_w = 0.0;
    for (std::size_t i = 0; i < kInstances; ++i) {
      const Instance inst = random_instance(rng, convention, 7);
      const ClampMode clamp = i % 2 == 0 ? ClampMode::Training : ClampMode::Testing;
      pcn::PcnState state = random_state(inst.model, inst.x, clamp, rng);
      if (clamp == ClampMode::Training) state.activations.back() = inst.y;
      pcn_act = std::max(pcn_act, pcn_activation_fd(inst.model, state));
      pcn_w = std::max(pcn_w, pcn_weight_fd(inst.model, state));

      LayerSpec spec({1, 1});
      const pcg::PcgModel graph = random_graph(rng, convention, spec);
      pcg::PcgState flat{gaussian_vector(static_cast<Eigen::Index>(graph.node_count()), 1.0, rng), clamp};
      pcg_act = std::max(pcg_act, pcg_activation_fd(graph, flat));
      pcg_w = std::max(pcg_w, pcg_weight_fd(graph, flat));
    }
    checks.push_back(make_check("pcn activation gradient" + suffix, pcn_act, kGradientTolerance, kInstances));
    checks.push_back(make_check("pcn weight gradient" + suffix, pcn_w, kGradientTolerance, kInstances));
    checks.push_back(make_check("pcg activation gradient" + suffix, pcg_act, kGradientTolerance, kInstances));
    checks.push_back(make_check("pcg weight gradient" + suffix, pcg_w, kGradientTolerance, kInstances));
  }
  return checks;
}

std::vector<CheckResult> cost(Rng& rng) {
  using topology::ConnectionKind;
  constexpr std::uint64_t kSteps = 5;
  constexpr std::size_t kBatch = 4;
  const std::vector<std::pair<std::vector<std::size_t>, topology::ConnectionSet>> cases = {
      {{2, 3, 3, 2}, {ConnectionKind::Forward}},
      {{2, 3, 3, 2}, {ConnectionKind::Forward, ConnectionKind::Lateral}},
      {{2, 3, 3, 2}, {ConnectionKind::AllToAll}},
  };
  std::vector<CheckResult> checks;
  for (const auto& [sizes, kinds] : cases) {
    const LayerSpec spec(sizes);
    Mask mask = topology::build_mask(spec, kinds);
    Matrix weights = gaussian_weights(mask, 0.5, rng);
    const pcg::PcgModel model(std::move(weights), mask, ActivationKind::Tanh,
                              PredictionConvention::MatrixActivation, spec.input_width(),
                              spec.output_width());
    InferenceConfig config;
    config.evaluation = EvaluationPath::Sparse;
    config.init = InitMode::Gaussian;
    config.max_steps = kSteps;
    config.stop_tolerance = 0.0;
    config.step_size = 0.05;

    std::uint64_t counted = 0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < kBatch; ++b) {
      config.init_seed = rng();
      const Vector x = gaussian_vector(static_cast<Eigen::Index>(spec.input_width()), 1.0, rng);
      const Vector y = gaussian_vector(static_cast<Eigen::Index>(spec.output_width()), 1.0, rng);
      const auto result = pcg::infer(model, x, y, config, spec);
      counted += result.madds;
      steps += result.steps;
    }
    const auto report = topology::cost_report(spec, mask, kSteps);
    const std::uint64_t expected = report.sparse_ops * kBatch;
    const double mismatch =
        (counted == expected && steps == kSteps * kBatch) ? 0.0
                                                           : std::abs(static_cast<double>(counted) -
                                                                      static_cast<double>(expected)) + 1.0;
    checks.push_back(make_check("madds == c d T for " + topology::format_connection_set(kinds) +
                                    " (d=" + std::to_string(report.connections) + ")",
                                mismatch, 0.0, kBatch, true));
  }
  return checks;
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::Theorem1:
      return "theorem1";
    case Suite::Theorem2:
      return "theorem2";
    case Suite::Gradients:
      return "gradients";
    case Suite::Cost:
      return "cost";
  }
  return "theorem1";
}

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : {Suite::Theorem1, Suite::Theorem2, Suite::Gradients, Suite::Cost}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport verify(Suite suite, std::uint64_t seed) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(suite)));
  VerifyReport report;
  report.suite = suite;
  report.seed = seed;
  switch (suite) {
    case Suite::Theorem1:
      report.checks = theorem1(rng);
      break;
    case Suite::Theorem2:
      report.checks = theorem2(rng);
      break;
    case Suite::Gradients:
      report.checks = gradients(rng);
      break;
    case Suite::Cost:
      report.checks = cost(rng);
      break;
  }
  return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
  out << "suite " << to_string(report.suite) << " (seed " << report.seed << ")\n";
  for (const CheckResult& c : report.checks) {
    out << (c.passed ? "  PASS  " : "  FAIL  ") << c.name << ": measured "
        << format_double(c.measured) << ", bound " << format_double(c.threshold) << ", "
        << c.instances << " instances\n";
  }
  out << (report.passed() ? "all checks passed\n" : "verification FAILED\n");
}

}  // namespace pcgraph::harness
