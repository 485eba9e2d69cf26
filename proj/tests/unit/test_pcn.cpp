#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pcgraph/errors.hpp"
#include "pcgraph/fnn.hpp"
#include "pcgraph/pcn.hpp"

namespace pcgraph {
namespace {

using pcn::PcnModel;
using pcn::PcnState;
using Sizes = std::vector<std::size_t>;

constexpr auto kMA = PredictionConvention::MatrixActivation;
constexpr auto kAM = PredictionConvention::ActivationMatrix;

PcnState make_state(std::vector<Vector> layers, ClampMode clamp) {
  return PcnState{std::move(layers), clamp};
}

TEST(PcnEnergy, ZeroWeightsIdentity) {
  const LayerSpec spec({2, 3, 2});
  PcnModel model(spec, {Matrix::Zero(3, 2), Matrix::Zero(2, 3)}, ActivationKind::Identity, kMA);
  Vector y(2);
  y << 0.5, -2.0;
  const auto state = make_state({Vector::Constant(2, 1.0), Vector::Zero(3), y}, ClampMode::Training);
  EXPECT_DOUBLE_EQ(pcn::energy(model, state), 0.5 * y.squaredNorm());
}

TEST(PcnEnergy, FeedforwardStateHasZeroEnergy) {
  oracle::Engine rng(2);
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {3, 5, 4, 2}, ActivationKind::Tanh, conv);
    const auto state = pcn::feedforward_init(model, oracle::random_vector(rng, 3, 1.0));
    EXPECT_EQ(pcn::energy(model, state), 0.0);
  }
}

TEST(PcnEnergy, MatchesHandLoop) {
  oracle::Engine rng(42);
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {2, 2, 2}, ActivationKind::Tanh, conv);
    const auto layers = oracle::random_layers(rng, {2, 2, 2}, 1.0);
    const double want = oracle::pcn_energy(model.weights(), layers, ActivationKind::Tanh, conv);
    EXPECT_NEAR(pcn::energy(model, make_state(layers, ClampMode::Testing)), want, 1e-15);
  }
}

TEST(PcnEnergy, DimensionMismatch) {
  oracle::Engine rng(1);
  const auto model = oracle::random_pcn(rng, {2, 3, 1}, ActivationKind::Tanh, kMA);
  EXPECT_THROW(pcn::energy(model, make_state(oracle::random_layers(rng, {2, 3}, 1.0),
                                             ClampMode::Testing)),
               DomainError);
  EXPECT_THROW(pcn::energy(model, make_state(oracle::random_layers(rng, {2, 4, 1}, 1.0),
                                             ClampMode::Testing)),
               DomainError);
}

TEST(PcnGradients, ZeroAtZeroError) {
  oracle::Engine rng(6);
  const auto model = oracle::random_pcn(rng, {3, 4, 4, 2}, ActivationKind::Sigmoid, kAM);
  const auto state = pcn::feedforward_init(model, oracle::random_vector(rng, 3, 1.0));
  for (const Vector& g : pcn::activation_gradients(model, state)) EXPECT_TRUE(g.isZero(0.0));
  for (const Matrix& g : pcn::weight_gradients(model, state)) EXPECT_TRUE(g.isZero(0.0));
}

TEST(PcnGradients, ScalarHandExample) {
  PcnModel model(LayerSpec({1, 1, 1}), {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                 ActivationKind::Identity, kMA);
  const auto state = make_state({Vector::Constant(1, 1.0), Vector::Constant(1, 2.0),
                                 Vector::Constant(1, 0.0)},
                                ClampMode::Training);
  const auto g = pcn::activation_gradients(model, state);
  EXPECT_DOUBLE_EQ(g[1][0], 3.0);
  EXPECT_EQ(g[0][0], 0.0);
  EXPECT_EQ(g[2][0], 0.0);
}

TEST(PcnGradients, WeightHandExample) {
  // eps^1 = a^1 - w f(a^0) = 1 - 0, f = identity, a^0 = 2.
  PcnModel model(LayerSpec({1, 1}), {Matrix::Zero(1, 1)}, ActivationKind::Identity, kAM);
  const auto state = make_state({Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)},
                                ClampMode::Training);
  EXPECT_DOUBLE_EQ(pcn::weight_gradients(model, state)[0](0, 0), -2.0);
}

TEST(PcnGradients, TestingModeOutputGradientIsError) {
  oracle::Engine rng(13);
  const auto model = oracle::random_pcn(rng, {2, 3, 2}, ActivationKind::Tanh, kMA);
  const auto layers = oracle::random_layers(rng, {2, 3, 2}, 1.0);
  const auto state = make_state(layers, ClampMode::Testing);
  const auto g = pcn::activation_gradients(model, state);
  const auto eps = pcn::errors(model, state);
  EXPECT_EQ(g[2], eps[2]);
}

struct GradientCase {
  ActivationKind kind;
  PredictionConvention conv;
  ClampMode clamp;
};

class PcnFiniteDifference : public ::testing::TestWithParam<GradientCase> {};

TEST_P(PcnFiniteDifference, ActivationGradients) {
  const auto [kind, conv, clamp] = GetParam();
  oracle::Engine rng(100 + static_cast<int>(kind) * 7 + static_cast<int>(conv));
  for (int trial = 0; trial < 20; ++trial) {
    const Sizes sizes = oracle::random_sizes(rng, 1, 3, 7);
    const LayerSpec spec(sizes);
    const auto model = oracle::random_pcn(rng, sizes, kind, conv);
    const auto layers = oracle::random_layers(rng, sizes, 1.0);

    std::vector<bool> free(spec.node_count(), false);
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
      if (pcn::is_clamped(model, clamp, l)) continue;
      for (std::size_t i = spec.begin(l); i < spec.end(l); ++i) free[i] = true;
    }
    auto energy_at = [&](const Vector& flat) {
      return oracle::pcn_energy(model.weights(), split(flat, spec), kind, conv);
    };
    const Vector fd = oracle::central_difference(energy_at, flatten(layers, spec), 1e-5, free);
    const Vector got = flatten(pcn::activation_gradients(model, make_state(layers, clamp)), spec);
    EXPECT_LT(oracle::relative_error(got, fd), 1e-6) << "trial " << trial;
  }
}

TEST_P(PcnFiniteDifference, WeightGradients) {
  const auto [kind, conv, clamp] = GetParam();
  oracle::Engine rng(200 + static_cast<int>(kind) * 7 + static_cast<int>(conv));
  for (int trial = 0; trial < 20; ++trial) {
    const Sizes sizes = oracle::random_sizes(rng, 1, 3, 7);
    const auto model = oracle::random_pcn(rng, sizes, kind, conv);
    const auto layers = oracle::random_layers(rng, sizes, 1.0);
    const auto grads = pcn::weight_gradients(model, make_state(layers, clamp));
    for (std::size_t l = 0; l < grads.size(); ++l) {
      auto energy_at = [&](const Matrix& w) {
        auto weights = model.weights();
        weights[l] = w;
        return oracle::pcn_energy(weights, layers, kind, conv);
      };
      const Matrix fd = oracle::central_difference(energy_at, model.weight(l), 1e-5);
      EXPECT_LT(oracle::relative_error(grads[l], fd), 1e-6) << "trial " << trial << " layer " << l;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Cases, PcnFiniteDifference,
    ::testing::Values(GradientCase{ActivationKind::Tanh, kMA, ClampMode::Training},
                      GradientCase{ActivationKind::Tanh, kAM, ClampMode::Training},
                      GradientCase{ActivationKind::Sigmoid, kMA, ClampMode::Testing},
                      GradientCase{ActivationKind::Sigmoid, kAM, ClampMode::Testing}));

TEST(PcnInfer, ExactSolverEqualsForwardPass) {
  oracle::Engine rng(31);
  InferenceConfig exact;
  exact.solver = Solver::ExactBackwardSubstitution;
  for (int trial = 0; trial < 20; ++trial) {
    const auto conv = trial % 2 ? kAM : kMA;
    const auto model = oracle::random_pcn(rng, oracle::random_sizes(rng, 2, 4, 16),
                                          ActivationKind::Tanh, conv);
    const Vector x = oracle::random_vector(rng, static_cast<Eigen::Index>(model.spec().input_width()), 1.0);
    const auto result = pcn::infer(model, x, std::nullopt, exact);
    const auto want = fnn::forward(model.as_fnn(), x);
    ASSERT_EQ(result.state.activations.size(), want.size());
    for (std::size_t l = 0; l < want.size(); ++l) EXPECT_EQ(result.state.activations[l], want[l]);
  }
}

TEST(PcnInfer, ExactSolverRejectsLabels) {
  oracle::Engine rng(1);
  const auto model = oracle::random_pcn(rng, {2, 2, 1}, ActivationKind::Tanh, kMA);
  InferenceConfig exact;
  exact.solver = Solver::ExactBackwardSubstitution;
  EXPECT_THROW(pcn::infer(model, Vector::Zero(2), Vector::Zero(1), exact), DomainError);
}

TEST(PcnInfer, FeedforwardInitConvergesImmediately) {
  oracle::Engine rng(17);
  const auto model = oracle::random_pcn(rng, {3, 6, 2}, ActivationKind::Tanh, kMA);
  const auto result = pcn::infer(model, oracle::random_vector(rng, 3, 1.0), std::nullopt, {});
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.steps, 0u);
}

TEST(PcnInfer, TrainingDescentLowersEnergy) {
  oracle::Engine rng(42);
  const auto model = oracle::random_pcn(rng, {2, 3, 2}, ActivationKind::Tanh, kMA);
  const Vector x = oracle::random_vector(rng, 2, 1.0);
  const Vector y = oracle::random_vector(rng, 2, 1.0);
  InferenceConfig config;
  config.max_steps = 500;
  config.step_size = 0.1;
  const double start = pcn::energy(model, pcn::feedforward_init(model, x, y));
  const auto result = pcn::infer(model, x, y, config);
  EXPECT_LT(pcn::energy(model, result.state), start);
}

TEST(PcnInfer, EnergyNonIncreasingAtSmallStep) {
  oracle::Engine rng(43);
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {3, 5, 4, 2}, ActivationKind::Tanh, conv);
    auto state = make_state(oracle::random_layers(rng, {3, 5, 4, 2}, 1.0), ClampMode::Training);
    double previous = pcn::energy(model, state);
    for (int t = 0; t < 300; ++t) {
      pcn::descent_step(model, state, 1e-3);
      const double now = pcn::energy(model, state);
      ASSERT_LE(now, previous) << "step " << t;
      previous = now;
    }
  }
}

TEST(PcnInfer, ClampedLayersUnchanged) {
  oracle::Engine rng(44);
  const auto model = oracle::random_pcn(rng, {3, 5, 2}, ActivationKind::Sigmoid, kAM);
  const Vector x = oracle::random_vector(rng, 3, 1.0);
  const Vector y = oracle::random_vector(rng, 2, 1.0);
  InferenceConfig config;
  config.init = InitMode::Gaussian;
  config.init_seed = 5;
  config.stop_tolerance = 0.0;
  const auto trained = pcn::infer(model, x, y, config);
  EXPECT_EQ(trained.state.activations[0], x);
  EXPECT_EQ(trained.state.activations[2], y);
  EXPECT_EQ(trained.steps, config.max_steps);
  const auto tested = pcn::infer(model, x, std::nullopt, config);
  EXPECT_EQ(tested.state.activations[0], x);
}

TEST(PcnInfer, ZeroInitDescentReachesForwardPass) {
  oracle::Engine rng(45);
  InferenceConfig config;
  config.init = InitMode::Zero;
  config.step_size = 0.05;
  config.max_steps = 2000;
  config.stop_tolerance = 0.0;
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {4, 6, 5, 3}, ActivationKind::Tanh, conv, 0.5);
    const Vector x = oracle::random_vector(rng, 4, 1.0);
    const auto result = pcn::infer(model, x, std::nullopt, config);
    EXPECT_LT(oracle::max_abs_diff(result.state.activations, fnn::forward(model.as_fnn(), x)), 1e-4);
    EXPECT_LT(pcn::energy(model, result.state), 1e-8);
  }
}

TEST(PcnInfer, DivergenceReportsStep) {
  PcnModel model(LayerSpec({1, 2, 1}), {Matrix::Constant(2, 1, 3.0), Matrix::Constant(1, 2, 3.0)},
                 ActivationKind::Identity, kMA);
  InferenceConfig config;
  config.step_size = 50.0;
  config.max_steps = 100000;
  config.init = InitMode::Zero;
  try {
    pcn::infer(model, Vector::Ones(1), Vector::Ones(1), config);
    FAIL() << "expected divergence";
  } catch (const DivergedError& e) {
    EXPECT_GT(e.step(), 0u);
  }
}

TEST(PcnInfer, RejectsBadConfig) {
  oracle::Engine rng(1);
  const auto model = oracle::random_pcn(rng, {2, 2, 1}, ActivationKind::Tanh, kMA);
  InferenceConfig config;
  config.step_size = 0.0;
  EXPECT_THROW(pcn::infer(model, Vector::Zero(2), std::nullopt, config), DomainError);
  EXPECT_THROW(pcn::infer(model, Vector::Zero(3), std::nullopt, {}), DomainError);
}

TEST(PcnLearn, ZeroRateOrZeroErrorKeepsWeights) {
  oracle::Engine rng(50);
  const auto model = oracle::random_pcn(rng, {3, 4, 2}, ActivationKind::Tanh, kMA);
  const Vector x = oracle::random_vector(rng, 3, 1.0);
  const auto at_rest = pcn::feedforward_init(model, x);
  const auto moved = pcn::learn_step(model, at_rest, 0.5);
  for (std::size_t l = 0; l < model.weights().size(); ++l) EXPECT_EQ(moved.weight(l), model.weight(l));

  const auto trained = pcn::feedforward_init(model, x, oracle::random_vector(rng, 2, 1.0));
  const auto frozen = pcn::learn_step(model, trained, 0.0);
  for (std::size_t l = 0; l < model.weights().size(); ++l) EXPECT_EQ(frozen.weight(l), model.weight(l));
}

TEST(PcnLearn, SmallStepLowersEnergy) {
  oracle::Engine rng(51);
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {3, 4, 2}, ActivationKind::Tanh, conv);
    const auto state = make_state(oracle::random_layers(rng, {3, 4, 2}, 1.0), ClampMode::Training);
    const auto next = pcn::learn_step(model, state, 1e-4);
    EXPECT_LT(pcn::energy(next, state), pcn::energy(model, state));
  }
}

TEST(PcnLearn, BatchAverage) {
  std::vector<std::vector<Matrix>> per_sample{{Matrix::Constant(2, 2, 1.0)},
                                              {Matrix::Constant(2, 2, 3.0)}};
  const auto mean = pcn::average_weight_gradients(per_sample);
  EXPECT_TRUE(mean[0].isApprox(Matrix::Constant(2, 2, 2.0)));
  EXPECT_THROW(pcn::average_weight_gradients({}), DomainError);
}

TEST(PcnFeedforwardInit, TrainingEnergyIsOutputMismatch) {
  oracle::Engine rng(60);
  for (auto conv : {kMA, kAM}) {
    const auto model = oracle::random_pcn(rng, {3, 5, 4, 2}, ActivationKind::Tanh, conv);
    const Vector x = oracle::random_vector(rng, 3, 1.0);
    const Vector y = oracle::random_vector(rng, 2, 1.0);
    const auto state = pcn::feedforward_init(model, x, y);
    EXPECT_EQ(state.clamp, ClampMode::Training);
    const auto mu = oracle::forward(model.weights(), x, ActivationKind::Tanh, conv);
    EXPECT_NEAR(pcn::energy(model, state), 0.5 * (y - mu.back()).squaredNorm(), 1e-12);
    const auto eps = pcn::errors(model, state);
    for (std::size_t l = 1; l < model.spec().depth(); ++l) EXPECT_TRUE(eps[l].isZero(0.0));
  }
}

TEST(PcnFeedforwardInit, TestingAndMatchedLabel) {
  oracle::Engine rng(61);
  const auto model = oracle::random_pcn(rng, {2, 4, 3}, ActivationKind::Sigmoid, kMA);
  const Vector x = oracle::random_vector(rng, 2, 1.0);
  const auto free = pcn::feedforward_init(model, x);
  EXPECT_EQ(free.clamp, ClampMode::Testing);
  EXPECT_EQ(pcn::energy(model, free), 0.0);
  const auto matched = pcn::feedforward_init(model, x, free.activations.back());
  EXPECT_EQ(pcn::energy(model, matched), 0.0);
}

}  // namespace
}  // namespace pcgraph
