#include "pcgraph/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pcgraph/errors.hpp"

namespace pcgraph::harness {

namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view text) {
  std::vector<std::size_t> sizes;
  while (true) {
    const auto comma = text.find(',');
    sizes.push_back(parse_number<std::size_t>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return sizes;
}

template <class T>
T parse_enum(std::string_view key, std::string_view text,
             std::optional<T> (*parser)(std::string_view)) {
  const auto value = parser(trim(text));
  if (!value) throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return *value;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.sizes", [](RunConfig& c, auto k, auto v) { c.model.sizes = parse_sizes(k, v); }},
      {"model.connections",
       [](RunConfig& c, auto k, auto v) {
         try {
           c.model.connections = topology::parse_connection_set(v);
         } catch (const DomainError& e) {
           throw ConfigError(std::string(k) + ": " + e.what());
         }
       }},
      {"model.activation",
       [](RunConfig& c, auto k, auto v) { c.model.activation = parse_enum(k, v, &parse_activation); }},
      {"model.convention",
       [](RunConfig& c, auto k, auto v) { c.model.convention = parse_enum(k, v, &parse_convention); }},
      {"model.weight_scale",
       [](RunConfig& c, auto k, auto v) { c.model.weight_scale = parse_number<double>(k, v); }},
      {"model.seed",
       [](RunConfig& c, auto k, auto v) { c.model.seed = parse_number<std::uint64_t>(k, v); }},
      {"inference.steps",
       [](RunConfig& c, auto k, auto v) { c.inference.max_steps = parse_number<std::size_t>(k, v); }},
      {"inference.step_size",
       [](RunConfig& c, auto k, auto v) { c.inference.step_size = parse_number<double>(k, v); }},
      {"inference.stop_tolerance",
       [](RunConfig& c, auto k, auto v) { c.inference.stop_tolerance = parse_number<double>(k, v); }},
      {"inference.init",
       [](RunConfig& c, auto k, auto v) { c.inference.init = parse_enum(k, v, &parse_init_mode); }},
      {"inference.init_std",
       [](RunConfig& c, auto k, auto v) { c.inference.init_std = parse_number<double>(k, v); }},
      {"inference.solver",
       [](RunConfig& c, auto k, auto v) { c.inference.solver = parse_enum(k, v, &parse_solver); }},
      {"inference.evaluation",
       [](RunConfig& c, auto k, auto v) {
         c.inference.evaluation = parse_enum(k, v, &parse_evaluation_path);
       }},
      {"training.epochs",
       [](RunConfig& c, auto k, auto v) { c.training.epochs = parse_number<std::size_t>(k, v); }},
      {"training.batch_size",
       [](RunConfig& c, auto k, auto v) { c.training.batch_size = parse_number<std::size_t>(k, v); }},
      {"training.learning_rate",
       [](RunConfig& c, auto k, auto v) { c.training.learning_rate = parse_number<double>(k, v); }},
      {"training.dataset", [](RunConfig& c, auto, auto v) { c.training.dataset = trim(v); }},
      {"training.train_fraction",
       [](RunConfig& c, auto k, auto v) { c.training.train_fraction = parse_number<double>(k, v); }},
      {"training.workers",
       [](RunConfig& c, auto k, auto v) { c.training.workers = parse_number<std::size_t>(k, v); }},
      {"output.checkpoint", [](RunConfig& c, auto, auto v) { c.output.checkpoint = trim(v); }},
      {"output.metrics", [](RunConfig& c, auto, auto v) { c.output.metrics = trim(v); }},
      {"output.record_wall_clock",
       [](RunConfig& c, auto k, auto v) { c.output.record_wall_clock = parse_bool(k, v); }},
  };
  return table;
}

void apply(RunConfig& config, const std::string& key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

}  // namespace

std::uint64_t RunConfig::seed() const {
  if (!model.seed) throw ConfigError("model.seed is required");
  return *model.seed;
}

void RunConfig::validate() const {
  try {
    (void)layer_spec();
    inference.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(model.weight_scale > 0.0)) throw ConfigError("model.weight_scale must be positive");
  if (training.epochs == 0) throw ConfigError("training.epochs must be positive");
  if (training.batch_size == 0) throw ConfigError("training.batch_size must be positive");
  if (!(training.learning_rate >= 0.0) || !std::isfinite(training.learning_rate)) {
    throw ConfigError("training.learning_rate must be nonnegative");
  }
  if (!(training.train_fraction > 0.0 && training.train_fraction <= 1.0)) {
    throw ConfigError("training.train_fraction must lie in (0, 1]");
  }
  if (training.workers == 0) throw ConfigError("training.workers must be positive");
}

RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      apply(config, section + "." + key, value.get_value<std::string>());
    }
  }
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not key=value");
    apply(config, std::string(trim(std::string_view(item).substr(0, eq))),
          std::string_view(item).substr(eq + 1));
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), overrides);
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "[model]\nsizes = ";
  for (std::size_t i = 0; i < c.model.sizes.size(); ++i) out << (i ? "," : "") << c.model.sizes[i];
  out << "\nconnections = " << topology::format_connection_set(c.model.connections)
      << "\nactivation = " << to_string(c.model.activation)
      << "\nconvention = " << to_string(c.model.convention)
      << "\nweight_scale = " << c.model.weight_scale << '\n';
  if (c.model.seed) out << "seed = " << *c.model.seed << '\n';
  out << "\n[inference]\nsteps = " << c.inference.max_steps
      << "\nstep_size = " << c.inference.step_size
      << "\nstop_tolerance = " << c.inference.stop_tolerance
      << "\ninit = " << to_string(c.inference.init) << "\ninit_std = " << c.inference.init_std
      << "\nsolver = " << to_string(c.inference.solver)
      << "\nevaluation = " << to_string(c.inference.evaluation) << '\n';
  out << "\n[training]\nepochs = " << c.training.epochs
      << "\nbatch_size = " << c.training.batch_size
      << "\nlearning_rate = " << c.training.learning_rate
      << "\ndataset = " << c.training.dataset
      << "\ntrain_fraction = " << c.training.train_fraction
      << "\nworkers = " << c.training.workers << '\n';
  out << "\n[output]\ncheckpoint = " << c.output.checkpoint << "\nmetrics = " << c.output.metrics
      << "\nrecord_wall_clock = " << (c.output.record_wall_clock ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace pcgraph::harness
