#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcgraph/types.hpp"

namespace pcgraph::harness {

struct Sample {
  Vector x;
  Vector y;
};

struct Dataset {
  std::size_t input_width = 0;
  std::size_t output_width = 0;
  std::vector<Sample> samples;
};

/// Reads CSV with header `x0,...,x{n_x-1},y0,...,y{n_y-1}` followed by one
/// record per line. Throws SchemaError for a missing/invalid header, no
/// records or a row of the wrong width, ParseError for a malformed number.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// The four XOR rows with a single 0/1 target.
Dataset make_xor();

/// Two interleaving half circles with Gaussian jitter. Labels are one-hot over
/// two outputs and the classes alternate, so any even count is balanced.
Dataset make_two_moons(std::size_t count, double noise, std::uint64_t seed);

}  // namespace pcgraph::harness
