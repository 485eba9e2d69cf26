#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pcgraph/layer_spec.hpp"
#include "pcgraph/pcg.hpp"
#include "pcgraph/topology.hpp"

namespace pcgraph::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// A trained graph together with the layer partition and connection kinds
/// that define its mask.
///
/// Binary layout, little-endian throughout:
///
///   "PCG1"                      4 bytes magic
///   u32 version                 currently 1
///   u32 layer count, u32 x count layer widths
///   u32 kind count,  u8 x count connection kind tags (ascending)
///   u8 activation tag, u8 convention tag
///   u64 epoch, u64 seed
///   u64 d, f64 x d              unmasked weights in row-major order
struct Checkpoint {
  LayerSpec spec;
  topology::ConnectionSet connections;
  pcg::PcgModel model;
  std::uint64_t epoch = 0;
  std::uint64_t seed = 0;
};

/// Throws StructureError if `model`'s mask is not the mask of spec/kinds.
Checkpoint make_checkpoint(LayerSpec spec, topology::ConnectionSet connections,
                           pcg::PcgModel model, std::uint64_t epoch, std::uint64_t seed);

std::string encode_checkpoint(const Checkpoint& checkpoint);

/// Throws SchemaError on a bad magic, version, tag, length or trailing bytes.
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pcgraph::harness
