// pcgraph: train, evaluate and verify predictive coding graphs.
//
// Exit codes: 0 success, 1 verification failure, 2 config/schema/IO error,
// 3 numerical divergence.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "pcgraph/errors.hpp"
#include "pcgraph/harness/checkpoint.hpp"
#include "pcgraph/harness/config.hpp"
#include "pcgraph/harness/dataset.hpp"
#include "pcgraph/harness/training.hpp"
#include "pcgraph/harness/verify.hpp"
#include "pcgraph/topology.hpp"

namespace {

using namespace pcgraph;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct TrainArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  std::size_t workers = 0;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string config;
  std::vector<std::string> overrides;
  bool iterative = false;
};

struct VerifyArgs {
  std::vector<std::string> suites{"theorem1", "theorem2", "gradients", "cost"};
  std::uint64_t seed = 0;
};

struct CostArgs {
  std::string sizes;
  std::string connections = "forward";
  std::string checkpoint;
  std::uint64_t steps = 1;
};

struct GenArgs {
  std::string kind = "moons";
  std::size_t samples = 200;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_train(const TrainArgs& args) {
  std::vector<std::string> overrides = args.overrides;
  overrides.push_back("model.seed=" + std::to_string(args.seed));
  if (args.workers > 0) overrides.push_back("training.workers=" + std::to_string(args.workers));
  const harness::RunConfig config = harness::load_run_config(args.config, overrides);
  const harness::TrainingResult result = harness::train(config);
  const harness::MetricsRow& last = result.metrics.back();
  std::cout << "epochs " << last.epoch << "  energy " << harness::format_double(last.energy)
            << "  train_acc " << harness::format_double(last.train_accuracy);
  if (last.test_accuracy) std::cout << "  test_acc " << harness::format_double(*last.test_accuracy);
  std::cout << '\n';
  if (!config.output.checkpoint.empty()) std::cout << "checkpoint " << config.output.checkpoint << '\n';
  if (!config.output.metrics.empty()) std::cout << "metrics " << config.output.metrics << '\n';
  return kExitOk;
}

int run_eval(const EvalArgs& args) {
  harness::RunConfig config;
  if (!args.config.empty()) {
    config = harness::load_run_config(args.config, args.overrides);
  } else if (!args.overrides.empty()) {
    config = harness::parse_run_config("", args.overrides);
  }
  config.inference.validate();
  const harness::Checkpoint ck = harness::load_checkpoint(args.checkpoint);
  const harness::Dataset data = harness::load_dataset(args.data);
  const auto mode = args.iterative ? harness::EvalMode::Iterative : harness::EvalMode::Auto;
  const harness::EvalResult result = harness::evaluate(ck, data, config.inference, mode);
  std::cout << "samples " << result.samples << "\naccuracy "
            << harness::format_double(result.accuracy) << "\nmean_output_error "
            << harness::format_double(result.mean_output_error) << '\n';
  return kExitOk;
}

int run_verify(const VerifyArgs& args) {
  bool ok = true;
  for (const std::string& name : args.suites) {
    const std::vector<harness::Suite> suites =
        name == "all" ? std::vector<harness::Suite>{harness::Suite::Theorem1, harness::Suite::Theorem2,
                                                    harness::Suite::Gradients, harness::Suite::Cost}
                      : std::vector<harness::Suite>{*harness::parse_suite(name)};
    for (const harness::Suite suite : suites) {
      const harness::VerifyReport report = harness::verify(suite, args.seed);
      harness::print_report(std::cout, report);
      ok = ok && report.passed();
    }
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("invalid layer sizes '" + text + "'");
    sizes.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return sizes;
}

int run_cost(const CostArgs& args) {
  std::optional<LayerSpec> spec;
  Mask mask;
  if (!args.checkpoint.empty()) {
    const harness::Checkpoint ck = harness::load_checkpoint(args.checkpoint);
    spec = ck.spec;
    mask = ck.model.mask();
  } else {
    if (args.sizes.empty()) throw ConfigError("cost needs --sizes or --checkpoint");
    try {
      spec.emplace(parse_sizes(args.sizes));
      mask = topology::build_mask(*spec, topology::parse_connection_set(args.connections));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  const topology::CostReport r = topology::cost_report(*spec, mask, args.steps);
  std::cout << "N " << r.node_count << "\nd " << r.connections << "\nT " << r.steps
            << "\ndense_ops " << r.dense_ops << "\nsparse_ops " << r.sparse_ops
            << "  (c = " << topology::kMaddsPerConnection << " multiply-adds per weight per step)"
            << "\nL " << r.depth << "\nM " << r.largest_block << "\nfnn_ops " << r.fnn_ops
            << "  (forward blocks only)\n";
  return kExitOk;
}

int run_gen(const GenArgs& args) {
  harness::Dataset data;
  if (args.kind == "xor") {
    data = harness::make_xor();
  } else if (args.kind == "moons") {
    data = harness::make_two_moons(args.samples, args.noise, args.seed);
  } else {
    throw ConfigError("unknown dataset kind '" + args.kind + "'");
  }
  if (args.out.empty() || args.out == "-") {
    harness::write_dataset(std::cout, data);
  } else {
    harness::save_dataset(args.out, data);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive coding networks and graphs: train, evaluate, verify"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model with inference learning");
  train->add_option("-c,--config", train_args.config, "Run configuration file")->required();
  train->add_option("--seed", train_args.seed, "Random seed")->required();
  train->add_option("--set", train_args.overrides, "Override a config key: section.key=value");
  train->add_option("--workers", train_args.workers, "Sample-parallel workers per batch");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  eval->add_option("--data", eval_args.data, "Dataset CSV")->required();
  eval->add_option("-c,--config", eval_args.config, "Config providing the [inference] section");
  eval->add_option("--set", eval_args.overrides, "Override a config key: section.key=value");
  eval->add_flag("--iterative", eval_args.iterative,
                 "Use gradient-descent inference even for feedforward masks");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run numerical verification suites");
  verify->add_option("--suite", verify_args.suites, "theorem1, theorem2, gradients, cost or all")
      ->check(CLI::IsMember({"theorem1", "theorem2", "gradients", "cost", "all"}));
  verify->add_option("--seed", verify_args.seed, "Random seed");

  CostArgs cost_args;
  auto* cost = app.add_subcommand("cost", "Report inference cost for a topology");
  cost->add_option("--sizes", cost_args.sizes, "Comma-separated layer widths");
  cost->add_option("--connections", cost_args.connections, "Comma-separated connection kinds");
  cost->add_option("--checkpoint", cost_args.checkpoint, "Take topology from a checkpoint");
  cost->add_option("--steps", cost_args.steps, "Inference steps T");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "Write a seeded toy dataset as CSV");
  gen->add_option("--kind", gen_args.kind, "xor or moons")->check(CLI::IsMember({"xor", "moons"}));
  gen->add_option("--samples", gen_args.samples, "Number of samples (moons)");
  gen->add_option("--noise", gen_args.noise, "Gaussian jitter (moons)");
  gen->add_option("--seed", gen_args.seed, "Random seed")->required();
  gen->add_option("-o,--out", gen_args.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return run_train(train_args);
    if (*eval) return run_eval(eval_args);
    if (*verify) return run_verify(verify_args);
    if (*cost) return run_cost(cost_args);
    if (*gen) return run_gen(gen_args);
  } catch (const DivergedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
