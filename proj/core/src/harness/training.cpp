#include "pcgraph/harness/training.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

#include "pcgraph/errors.hpp"
#include "pcgraph/random.hpp"

namespace pcgraph::harness {

namespace {

// Independent random streams derived from the run seed.
enum Stream : std::uint64_t { kWeights = 1, kSplit = 2, kEpochOrder = 3, kNodeInit = 4 };

template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&fn, w, workers, count] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

void check_widths(const Checkpoint& ck, const Dataset& data) {
  if (data.input_width != ck.spec.input_width() || data.output_width != ck.spec.output_width()) {
    throw SchemaError("dataset has " + std::to_string(data.input_width) + " inputs and " +
                      std::to_string(data.output_width) + " outputs, model expects " +
                      std::to_string(ck.spec.input_width()) + " and " +
                      std::to_string(ck.spec.output_width()));
  }
}

/// Testing-mode evaluation strategy fixed once per checkpoint.
class Predictor {
 public:
  Predictor(const Checkpoint& ck, const InferenceConfig& inference, EvalMode mode)
      : ck_(ck), inference_(inference) {
    feedforward_ = pcg::feedforward_compatible(ck.model.mask(), ck.spec);
    if (mode == EvalMode::Auto) {
      if (ck.connections == topology::ConnectionSet{topology::ConnectionKind::Forward}) {
        layered_.emplace(pcg::extract_pcn(ck.model, ck.spec));
      }
      closed_form_ = feedforward_;
    }
    inference_.solver = Solver::GradientDescent;
    if (inference_.init == InitMode::Feedforward && !feedforward_) inference_.init = InitMode::Zero;
  }

  Vector operator()(const Vector& x) const {
    const auto ny = static_cast<Eigen::Index>(ck_.spec.output_width());
    if (layered_) {
      InferenceConfig exact = inference_;
      exact.solver = Solver::ExactBackwardSubstitution;
      return pcn::infer(*layered_, x, std::nullopt, exact).state.activations.back();
    }
    if (closed_form_) return pcg::feedforward_init(ck_.model, ck_.spec, x).activations.tail(ny);
    return pcg::infer(ck_.model, x, std::nullopt, inference_, ck_.spec).state.activations.tail(ny);
  }

 private:
  const Checkpoint& ck_;
  InferenceConfig inference_;
  std::optional<pcn::PcnModel> layered_;
  bool feedforward_ = false;
  bool closed_form_ = false;
};

struct SampleOutcome {
  Matrix gradient;
  double energy = 0.0;
  std::uint64_t madds = 0;
  std::exception_ptr error;
};

}  // namespace

Checkpoint initial_checkpoint(const RunConfig& config) {
  config.validate();
  const std::uint64_t seed = config.seed();
  LayerSpec spec = config.layer_spec();
  Mask mask = topology::build_mask(spec, config.model.connections);
  Rng rng(derive_seed(seed, kWeights));
  Matrix weights = gaussian_weights(mask, config.model.weight_scale, rng);
  pcg::PcgModel model(std::move(weights), std::move(mask), config.model.activation,
                      config.model.convention, spec.input_width(), spec.output_width());
  return make_checkpoint(std::move(spec), config.model.connections, std::move(model), 0, seed);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto train_count = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(order.size())));
  train_count = std::clamp<std::size_t>(train_count, std::min<std::size_t>(1, order.size()),
                                        order.size());
  Dataset train{data.input_width, data.output_width, {}};
  Dataset test{data.input_width, data.output_width, {}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_count ? train : test).samples.push_back(data.samples[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

TrainingResult train(const RunConfig& config, const Dataset& data) {
  using Clock = std::chrono::steady_clock;
  Checkpoint ck = initial_checkpoint(config);
  check_widths(ck, data);
  const std::uint64_t seed = config.seed();
  const auto [train_set, test_set] =
      split_dataset(data, config.training.train_fraction, derive_seed(seed, kSplit));

  InferenceConfig relax_config = config.inference;
  relax_config.solver = Solver::GradientDescent;
  const bool feedforward = pcg::feedforward_compatible(ck.model.mask(), ck.spec);
  if (relax_config.init == InitMode::Feedforward && !feedforward) relax_config.init = InitMode::Zero;

  const std::size_t batch_size = config.training.batch_size;
  std::vector<MetricsRow> metrics;
  metrics.reserve(config.training.epochs);

  for (std::size_t epoch = 1; epoch <= config.training.epochs; ++epoch) {
    const auto started = Clock::now();
    std::vector<std::size_t> order(train_set.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng order_rng(derive_seed(seed, kEpochOrder, epoch));
    std::shuffle(order.begin(), order.end(), order_rng);
    const std::uint64_t init_stream = derive_seed(seed, kNodeInit, epoch);

    double energy_sum = 0.0;
    std::uint64_t madds = 0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size, ++batch_index) {
      const std::size_t count = std::min(batch_size, order.size() - begin);
      std::vector<SampleOutcome> outcomes(count);
      parallel_for(count, config.training.workers, [&](std::size_t i) {
        SampleOutcome& out = outcomes[i];
        try {
          const Sample& sample = train_set.samples[order[begin + i]];
          InferenceConfig sample_config = relax_config;
          sample_config.init_seed = derive_seed(init_stream, begin + i);
          auto result = pcg::infer(ck.model, sample.x, sample.y, sample_config, ck.spec);
          out.energy = pcg::energy(ck.model, result.state);
          out.madds = result.madds;
          out.gradient = pcg::weight_gradient(ck.model, result.state);
        } catch (...) {
          out.error = std::current_exception();
        }
      });

      Matrix sum = Matrix::Zero(ck.model.weights().rows(), ck.model.weights().cols());
      for (SampleOutcome& out : outcomes) {
        if (out.error) {
          try {
            std::rethrow_exception(out.error);
          } catch (const DivergedError& e) {
            throw DivergedError(e.step(), "training diverged at epoch " + std::to_string(epoch) +
                                              ", batch " + std::to_string(batch_index) +
                                              ", inference step " + std::to_string(e.step()) +
                                              ": " + e.what());
          }
        }
        sum += out.gradient;
        energy_sum += out.energy;
        madds += out.madds;
      }
      ck.model = pcg::apply_weight_gradient(ck.model, sum / static_cast<double>(count),
                                            config.training.learning_rate);
    }

    MetricsRow row;
    row.epoch = epoch;
    row.energy = energy_sum / static_cast<double>(order.size());
    row.madds = madds;
    row.train_accuracy = evaluate(ck, train_set, config.inference).accuracy;
    if (!test_set.samples.empty()) row.test_accuracy = evaluate(ck, test_set, config.inference).accuracy;
    if (config.output.record_wall_clock) {
      row.seconds = std::chrono::duration<double>(Clock::now() - started).count();
    }
    metrics.push_back(row);
  }
  ck.epoch = config.training.epochs;
  return TrainingResult{std::move(ck), std::move(metrics)};
}

TrainingResult train(const RunConfig& config) {
  if (config.training.dataset.empty()) throw ConfigError("training.dataset is required");
  const Dataset data = load_dataset(config.training.dataset);
  TrainingResult result = train(config, data);
  if (!config.output.checkpoint.empty()) save_checkpoint(config.output.checkpoint, result.checkpoint);
  if (!config.output.metrics.empty()) save_metrics(config.output.metrics, result.metrics);
  return result;
}

Vector predict_output(const Checkpoint& checkpoint, const Vector& x,
                      const InferenceConfig& inference, EvalMode mode) {
  return Predictor(checkpoint, inference, mode)(x);
}

std::size_t predicted_class(const Vector& output) {
  if (output.size() == 1) return output[0] >= 0.5 ? 1 : 0;
  Eigen::Index best = 0;
  output.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

EvalResult evaluate(const Checkpoint& checkpoint, const Dataset& data,
                    const InferenceConfig& inference, EvalMode mode) {
  check_widths(checkpoint, data);
  EvalResult result;
  result.samples = data.samples.size();
  if (data.samples.empty()) return result;
  const Predictor predictor(checkpoint, inference, mode);
  std::size_t correct = 0;
  double error = 0.0;
  for (const Sample& s : data.samples) {
    const Vector out = predictor(s.x);
    if (predicted_class(out) == predicted_class(s.y)) ++correct;
    error += 0.5 * (s.y - out).squaredNorm();
  }
  const auto n = static_cast<double>(data.samples.size());
  result.accuracy = static_cast<double>(correct) / n;
  result.mean_output_error = error / n;
  return result;
}

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.epoch << ',' << format_double(r.energy) << ',' << format_double(r.train_accuracy)
        << ',' << (r.test_accuracy ? format_double(*r.test_accuracy) : std::string()) << ','
        << format_double(r.seconds) << ',' << r.madds << '\n';
  }
}

void save_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write metrics " + path.string());
  write_metrics(out, rows);
  if (!out) throw IoError("failed writing metrics " + path.string());
}

}  // namespace pcgraph::harness
