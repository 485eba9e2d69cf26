#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pcgraph/harness/checkpoint.hpp"
#include "pcgraph/harness/config.hpp"
#include "pcgraph/harness/dataset.hpp"

namespace pcgraph::harness {

struct MetricsRow {
  std::size_t epoch = 0;
  /// Mean post-inference energy over the epoch's training samples.
  double energy = 0.0;
  double train_accuracy = 0.0;
  /// Empty when the split leaves no test samples.
  std::optional<double> test_accuracy;
  double seconds = 0.0;
  /// Multiply-adds spent in training-mode inference during the epoch.
  std::uint64_t madds = 0;
};

struct TrainingResult {
  Checkpoint checkpoint;
  std::vector<MetricsRow> metrics;
};

struct EvalResult {
  double accuracy = 0.0;
  /// Mean of 1/2 |y - output|^2.
  double mean_output_error = 0.0;
  std::size_t samples = 0;
};

enum class EvalMode {
  /// Closed-form evaluation whenever the mask is feedforward.
  Auto,
  /// Always gradient-descent inference.
  Iterative,
};

/// Freshly initialized, untrained model for `config` (seeded).
Checkpoint initial_checkpoint(const RunConfig& config);

/// Splits `data` into (train, test) with a seeded shuffle.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

/// Inference-learning loop: per batch, every sample is relaxed with inputs and
/// labels clamped, the weight gradients are averaged in sample order, and one
/// masked weight step is taken. Throws SchemaError on width mismatch and
/// DivergedError (with epoch/batch/step in the message) on divergence.
TrainingResult train(const RunConfig& config, const Dataset& data);

/// Loads config.training.dataset, trains and writes the checkpoint and
/// metrics files named in config.output (when non-empty).
TrainingResult train(const RunConfig& config);

/// Output-layer activations after testing-mode inference.
Vector predict_output(const Checkpoint& checkpoint, const Vector& x,
                      const InferenceConfig& inference, EvalMode mode = EvalMode::Auto);

/// Class index: threshold at 0.5 for a single output, argmax otherwise.
std::size_t predicted_class(const Vector& output);

/// Throws SchemaError when dataset widths do not match the model.
EvalResult evaluate(const Checkpoint& checkpoint, const Dataset& data,
                    const InferenceConfig& inference, EvalMode mode = EvalMode::Auto);

inline constexpr std::string_view kMetricsHeader = "epoch,energy,train_acc,test_acc,seconds,madds";

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows);
void save_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

}  // namespace pcgraph::harness
