#include "pcgraph/harness/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "pcgraph/errors.hpp"

namespace pcgraph::harness {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view text, std::size_t line) {
  text = strip(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError(line, "malformed number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    have_header = !strip(line).empty();
  }
  if (!have_header) throw SchemaError("dataset is empty");

  Dataset data;
  const auto header = split_fields(strip(line));
  bool in_targets = false;
  for (std::string_view raw : header) {
    const std::string_view name = strip(raw);
    const std::string expected_x = "x" + std::to_string(data.input_width);
    const std::string expected_y = "y" + std::to_string(data.output_width);
    if (!in_targets && name == expected_x) {
      ++data.input_width;
    } else if (name == expected_y) {
      in_targets = true;
      ++data.output_width;
    } else {
      throw SchemaError("unexpected header column '" + std::string(name) + "'");
    }
  }
  if (data.input_width == 0 || data.output_width == 0) {
    throw SchemaError("header must declare at least one x and one y column");
  }

  const std::size_t width = data.input_width + data.output_width;
  const auto nx = static_cast<Eigen::Index>(data.input_width);
  const auto ny = static_cast<Eigen::Index>(data.output_width);
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                        " fields, found " + std::to_string(fields.size()));
    }
    Sample sample{Vector(nx), Vector(ny)};
    for (Eigen::Index i = 0; i < nx; ++i) sample.x[i] = parse_field(fields[static_cast<std::size_t>(i)], line_no);
    for (Eigen::Index i = 0; i < ny; ++i) {
      sample.y[i] = parse_field(fields[static_cast<std::size_t>(nx + i)], line_no);
    }
    data.samples.push_back(std::move(sample));
  }
  if (data.samples.empty()) throw SchemaError("dataset has no records");
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.input_width; ++i) out << (i ? "," : "") << 'x' << i;
  for (std::size_t i = 0; i < data.output_width; ++i) out << ",y" << i;
  out << '\n';
  for (const Sample& s : data.samples) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << (i ? "," : "") << format_double(s.x[i]);
    for (Eigen::Index i = 0; i < s.y.size(); ++i) out << ',' << format_double(s.y[i]);
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_dataset(out, data);
  if (!out) throw IoError("failed writing dataset " + path.string());
}

Dataset make_xor() {
  Dataset data;
  data.input_width = 2;
  data.output_width = 1;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Sample s{Vector(2), Vector(1)};
      s.x << a, b;
      s.y << static_cast<double>(a ^ b);
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

Dataset make_two_moons(std::size_t count, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> jitter(0.0, noise);

  Dataset data;
  data.input_width = 2;
  data.output_width = 2;
  data.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool lower = (i % 2) == 1;
    const double t = angle(rng);
    Sample s{Vector(2), Vector::Zero(2)};
    // Centred on the origin: the two arcs are point reflections of each
    // other, which a bias-free network with odd activations can separate.
    if (lower) {
      s.x << 0.5 - std::cos(t), 0.25 - std::sin(t);
    } else {
      s.x << std::cos(t) - 0.5, std::sin(t) - 0.25;
    }
    if (noise > 0.0) {
      s.x[0] += jitter(rng);
      s.x[1] += jitter(rng);
    }
    s.y[lower ? 1 : 0] = 1.0;
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace pcgraph::harness
