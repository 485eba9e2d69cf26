#include <benchmark/benchmark.h>

#include <random>

#include "pcgraph/fnn.hpp"
#include "pcgraph/pcg.hpp"
#include "pcgraph/pcn.hpp"
#include "pcgraph/random.hpp"
#include "pcgraph/topology.hpp"

namespace {

using namespace pcgraph;
using topology::ConnectionKind;

// Layered graph of `depth` hidden layers of width `width`.
LayerSpec make_spec(std::size_t width, std::size_t depth) {
  std::vector<std::size_t> sizes{width};
  for (std::size_t i = 0; i < depth; ++i) sizes.push_back(width);
  sizes.push_back(width);
  return LayerSpec(sizes);
}

pcg::PcgModel make_graph(const LayerSpec& spec, const topology::ConnectionSet& kinds) {
  Rng rng(7);
  Mask mask = topology::build_mask(spec, kinds);
  Matrix w = gaussian_weights(mask, 0.5, rng);
  return pcg::PcgModel(std::move(w), std::move(mask), ActivationKind::Tanh,
                       PredictionConvention::MatrixActivation, spec.input_width(),
                       spec.output_width());
}

// Ten synchronous inference steps per iteration; the compressed rows are
// built once per relax call, as in training.
void inference_step(benchmark::State& state, const topology::ConnectionSet& kinds,
                    EvaluationPath path) {
  constexpr std::size_t kSteps = 10;
  const LayerSpec spec = make_spec(static_cast<std::size_t>(state.range(0)), 4);
  const auto graph = make_graph(spec, kinds);
  Rng rng(3);
  const pcg::PcgState start{
      gaussian_vector(static_cast<Eigen::Index>(spec.node_count()), 1.0, rng), ClampMode::Training};
  InferenceConfig config;
  config.max_steps = kSteps;
  config.step_size = 1e-3;
  config.stop_tolerance = 0.0;
  config.evaluation = path;
  std::uint64_t madds = 0;
  for (auto _ : state) {
    auto result = pcg::relax(graph, start, config);
    madds = result.madds;
    benchmark::DoNotOptimize(result);
  }
  state.counters["N"] = static_cast<double>(spec.node_count());
  state.counters["d"] = static_cast<double>(graph.connection_count());
  state.counters["madds/step"] = static_cast<double>(madds) / kSteps;
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kSteps));
}

void BM_ForwardMaskDense(benchmark::State& state) {
  inference_step(state, {ConnectionKind::Forward}, EvaluationPath::Dense);
}
void BM_ForwardMaskSparse(benchmark::State& state) {
  inference_step(state, {ConnectionKind::Forward}, EvaluationPath::Sparse);
}
void BM_AllToAllDense(benchmark::State& state) {
  inference_step(state, {ConnectionKind::AllToAll}, EvaluationPath::Dense);
}
void BM_AllToAllSparse(benchmark::State& state) {
  inference_step(state, {ConnectionKind::AllToAll}, EvaluationPath::Sparse);
}

BENCHMARK(BM_ForwardMaskDense)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_ForwardMaskSparse)->RangeMultiplier(2)->Range(8, 128);
BENCHMARK(BM_AllToAllDense)->RangeMultiplier(2)->Range(8, 64);
BENCHMARK(BM_AllToAllSparse)->RangeMultiplier(2)->Range(8, 64);

// Testing-mode evaluation of a layered network: exact solve vs feedforward
// pass vs converged gradient descent.
void BM_ExactSolve(benchmark::State& state) {
  const LayerSpec spec = make_spec(static_cast<std::size_t>(state.range(0)), 4);
  Rng rng(5);
  const pcn::PcnModel model(spec, gaussian_layer_weights(spec, 0.5, rng), ActivationKind::Tanh,
                            PredictionConvention::MatrixActivation);
  const Vector x = gaussian_vector(static_cast<Eigen::Index>(spec.input_width()), 1.0, rng);
  InferenceConfig config;
  config.solver = Solver::ExactBackwardSubstitution;
  for (auto _ : state) benchmark::DoNotOptimize(pcn::infer(model, x, std::nullopt, config));
}

void BM_FeedforwardPass(benchmark::State& state) {
  const LayerSpec spec = make_spec(static_cast<std::size_t>(state.range(0)), 4);
  Rng rng(5);
  const fnn::FnnModel model(spec, gaussian_layer_weights(spec, 0.5, rng), ActivationKind::Tanh,
                            PredictionConvention::MatrixActivation);
  const Vector x = gaussian_vector(static_cast<Eigen::Index>(spec.input_width()), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fnn::forward(model, x));
}

void BM_DescentSolve(benchmark::State& state) {
  const LayerSpec spec = make_spec(static_cast<std::size_t>(state.range(0)), 4);
  Rng rng(5);
  const pcn::PcnModel model(spec, gaussian_layer_weights(spec, 0.5, rng), ActivationKind::Tanh,
                            PredictionConvention::MatrixActivation);
  const Vector x = gaussian_vector(static_cast<Eigen::Index>(spec.input_width()), 1.0, rng);
  InferenceConfig config;
  config.init = InitMode::Zero;
  config.step_size = 0.1;
  config.max_steps = 1000;
  config.stop_tolerance = 1e-8;
  std::size_t steps = 0;
  for (auto _ : state) {
    auto result = pcn::infer(model, x, std::nullopt, config);
    steps = result.steps;
    benchmark::DoNotOptimize(result);
  }
  state.counters["T"] = static_cast<double>(steps);
}

BENCHMARK(BM_ExactSolve)->RangeMultiplier(4)->Range(8, 128);
BENCHMARK(BM_FeedforwardPass)->RangeMultiplier(4)->Range(8, 128);
BENCHMARK(BM_DescentSolve)->RangeMultiplier(4)->Range(8, 128);

}  // namespace

BENCHMARK_MAIN();
