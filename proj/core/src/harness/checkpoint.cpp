#include "pcgraph/harness/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pcgraph/errors.hpp"

namespace pcgraph::harness {

namespace {

constexpr std::string_view kMagic = "PCG1";

class Writer {
 public:
  void bytes(std::string_view data) { out_.append(data); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string take() { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    const auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  std::uint64_t u64() { return little_endian(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw SchemaError("checkpoint is truncated");
  }
  std::uint64_t little_endian(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

constexpr std::uint8_t kMaxActivationTag = static_cast<std::uint8_t>(ActivationKind::ReLU);
constexpr std::uint8_t kMaxConventionTag =
    static_cast<std::uint8_t>(PredictionConvention::ActivationMatrix);
constexpr std::uint8_t kMaxKindTag = static_cast<std::uint8_t>(topology::ConnectionKind::AllToAll);

}  // namespace

Checkpoint make_checkpoint(LayerSpec spec, topology::ConnectionSet connections,
                           pcg::PcgModel model, std::uint64_t epoch, std::uint64_t seed) {
  if (model.mask() != topology::build_mask(spec, connections)) {
    throw StructureError("model mask does not match the layer spec and connection kinds");
  }
  if (model.input_width() != spec.input_width() || model.output_width() != spec.output_width()) {
    throw StructureError("model clamp widths do not match the layer spec");
  }
  return Checkpoint{std::move(spec), std::move(connections), std::move(model), epoch, seed};
}

std::string encode_checkpoint(const Checkpoint& ck) {
  Writer w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ck.spec.layer_count()));
  for (std::size_t n : ck.spec.sizes()) w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(ck.connections.size()));
  for (topology::ConnectionKind kind : ck.connections) w.u8(static_cast<std::uint8_t>(kind));
  w.u8(static_cast<std::uint8_t>(ck.model.activation()));
  w.u8(static_cast<std::uint8_t>(ck.model.convention()));
  w.u64(ck.epoch);
  w.u64(ck.seed);
  w.u64(ck.model.connection_count());
  const Matrix& weights = ck.model.weights();
  const Mask& mask = ck.model.mask();
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      if (mask(r, c)) w.f64(weights(r, c));
    }
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(kMagic.size()) != kMagic) throw SchemaError("not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw SchemaError("unsupported checkpoint version " + std::to_string(version));
  }

  const std::uint32_t layers = r.u32();
  if (layers < 2 || layers > r.remaining() / 4) throw SchemaError("invalid layer count");
  std::vector<std::size_t> sizes(layers);
  for (auto& n : sizes) n = r.u32();
  std::optional<LayerSpec> spec;
  try {
    spec.emplace(std::move(sizes));
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid layer spec: ") + e.what());
  }

  const std::uint32_t kind_count = r.u32();
  if (kind_count == 0 || kind_count > kMaxKindTag + 1u) throw SchemaError("invalid kind count");
  topology::ConnectionSet kinds;
  for (std::uint32_t i = 0; i < kind_count; ++i) {
    const std::uint8_t tag = r.u8();
    if (tag > kMaxKindTag) throw SchemaError("invalid connection kind tag");
    if (!kinds.insert(static_cast<topology::ConnectionKind>(tag)).second) {
      throw SchemaError("duplicate connection kind");
    }
  }
  const std::uint8_t activation = r.u8();
  const std::uint8_t convention = r.u8();
  if (activation > kMaxActivationTag) throw SchemaError("invalid activation tag");
  if (convention > kMaxConventionTag) throw SchemaError("invalid convention tag");
  const std::uint64_t epoch = r.u64();
  const std::uint64_t seed = r.u64();

  const Mask mask = topology::build_mask(*spec, kinds);
  const std::uint64_t d = r.u64();
  if (d != static_cast<std::uint64_t>(mask.count())) {
    throw SchemaError("payload length " + std::to_string(d) + " does not match mask with " +
                      std::to_string(mask.count()) + " connections");
  }
  if (r.remaining() != d * 8) throw SchemaError("payload size does not match its declared length");

  Matrix weights = Matrix::Zero(mask.rows(), mask.cols());
  for (Eigen::Index row = 0; row < mask.rows(); ++row) {
    for (Eigen::Index col = 0; col < mask.cols(); ++col) {
      if (mask(row, col)) weights(row, col) = r.f64();
    }
  }
  pcg::PcgModel model(std::move(weights), mask, static_cast<ActivationKind>(activation),
                      static_cast<PredictionConvention>(convention), spec->input_width(),
                      spec->output_width());
  return Checkpoint{*spec, std::move(kinds), std::move(model), epoch, seed};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string bytes = encode_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return decode_checkpoint(bytes.str());
}

}  // namespace pcgraph::harness
