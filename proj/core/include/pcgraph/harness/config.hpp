#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcgraph/activation.hpp"
#include "pcgraph/inference_config.hpp"
#include "pcgraph/layer_spec.hpp"
#include "pcgraph/topology.hpp"

namespace pcgraph::harness {

struct ModelSection {
  std::vector<std::size_t> sizes;
  topology::ConnectionSet connections{topology::ConnectionKind::Forward};
  ActivationKind activation = ActivationKind::Tanh;
  PredictionConvention convention = PredictionConvention::MatrixActivation;
  /// Weights start as N(0, (weight_scale / sqrt(fan_in))^2).
  double weight_scale = 1.0;
  std::optional<std::uint64_t> seed;
};

struct TrainingSection {
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  double learning_rate = 0.1;
  std::string dataset;
  /// Fraction of the (shuffled) dataset used for training; the rest is test.
  double train_fraction = 1.0;
  std::size_t workers = 1;
};

struct OutputSection {
  std::string checkpoint;
  std::string metrics;
  /// When false the metrics `seconds` column is written as 0 so runs stay
  /// byte-reproducible.
  bool record_wall_clock = false;
};

struct RunConfig {
  ModelSection model;
  InferenceConfig inference;
  TrainingSection training;
  OutputSection output;

  LayerSpec layer_spec() const { return LayerSpec(model.sizes); }
  /// Throws ConfigError when the seed was never set.
  std::uint64_t seed() const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses INI-style text:
///
///   [model]
///   sizes = 2,4,1
///   connections = forward
///
/// then applies `overrides`, each of the form "section.key=value".
/// Unknown sections or keys and malformed values raise ConfigError.
RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides = {});

/// Writes `config` back out in the format parse_run_config reads.
std::string format_run_config(const RunConfig& config);

}  // namespace pcgraph::harness
