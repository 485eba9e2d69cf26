#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcgraph/errors.hpp"
#include "pcgraph/fnn.hpp"

namespace pcgraph {
namespace {

using fnn::FnnModel;

TEST(Forward, ZeroWeightsGiveZeroLayers) {
  const LayerSpec spec({3, 4, 2});
  FnnModel model(spec, {Matrix::Zero(4, 3), Matrix::Zero(2, 4)}, ActivationKind::Identity,
                 PredictionConvention::MatrixActivation);
  const auto a = fnn::forward(model, Vector::Constant(3, 1.7));
  ASSERT_EQ(a.size(), 3u);
  EXPECT_TRUE(a[1].isZero(0.0));
  EXPECT_TRUE(a[2].isZero(0.0));
}

TEST(Forward, ScalarLinearMap) {
  FnnModel model(LayerSpec({1, 1}), {Matrix::Constant(1, 1, 2.0)}, ActivationKind::Identity,
                 PredictionConvention::MatrixActivation);
  const auto a = fnn::forward(model, Vector::Constant(1, 3.0));
  EXPECT_EQ(a[0][0], 3.0);
  EXPECT_EQ(a[1][0], 6.0);
}

TEST(Forward, MatchesPerNeuronLoop) {
  oracle::Engine rng(21);
  for (auto conv : {PredictionConvention::MatrixActivation, PredictionConvention::ActivationMatrix}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto pcn = oracle::random_pcn(rng, {2, 2, 1}, ActivationKind::Tanh, conv);
      const Vector x = oracle::random_vector(rng, 2, 1.0);
      const auto got = fnn::forward(pcn.as_fnn(), x);
      const auto want = oracle::forward(pcn.weights(), x, ActivationKind::Tanh, conv);
      EXPECT_LE(oracle::max_abs_diff(got, want), 1e-15);
    }
  }
}

TEST(Forward, ComposesOverLayerSlices) {
  oracle::Engine rng(4);
  const std::vector<std::size_t> sizes{3, 5, 4, 2};
  const auto full = oracle::random_pcn(rng, sizes, ActivationKind::Tanh,
                                       PredictionConvention::MatrixActivation);
  const Vector x = oracle::random_vector(rng, 3, 1.0);
  const auto whole = fnn::forward(full.as_fnn(), x);

  const std::size_t k = 2;
  FnnModel lower(LayerSpec({3, 5, 4}), {full.weight(0), full.weight(1)}, ActivationKind::Tanh,
                 PredictionConvention::MatrixActivation);
  FnnModel upper(LayerSpec({4, 2}), {full.weight(2)}, ActivationKind::Tanh,
                 PredictionConvention::MatrixActivation);
  const auto first = fnn::forward(lower, x);
  const auto second = fnn::forward(upper, first[k]);
  EXPECT_LE((second.back() - whole.back()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Forward, Deterministic) {
  oracle::Engine rng(8);
  const auto pcn = oracle::random_pcn(rng, {4, 6, 3}, ActivationKind::Sigmoid,
                                      PredictionConvention::ActivationMatrix);
  const Vector x = oracle::random_vector(rng, 4, 1.0);
  const auto a = fnn::forward(pcn.as_fnn(), x);
  const auto b = fnn::forward(pcn.as_fnn(), x);
  for (std::size_t l = 0; l < a.size(); ++l) EXPECT_EQ(a[l], b[l]);
}

TEST(Forward, DimensionMismatch) {
  FnnModel model(LayerSpec({2, 1}), {Matrix::Ones(1, 2)}, ActivationKind::Tanh,
                 PredictionConvention::MatrixActivation);
  EXPECT_THROW(fnn::forward(model, Vector::Zero(3)), DomainError);
}

TEST(FnnModel, RejectsWrongWeightShapes) {
  EXPECT_THROW(FnnModel(LayerSpec({2, 3}), {Matrix::Zero(2, 3)}, ActivationKind::Tanh,
                        PredictionConvention::MatrixActivation),
               DomainError);
  EXPECT_THROW(FnnModel(LayerSpec({2, 3, 1}), {Matrix::Zero(3, 2)}, ActivationKind::Tanh,
                        PredictionConvention::MatrixActivation),
               DomainError);
}

}  // namespace
}  // namespace pcgraph
