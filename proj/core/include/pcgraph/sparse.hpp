#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcgraph/types.hpp"

namespace pcgraph {

/// Multiply-add tally kept by instrumented products.
struct OpCounter {
  std::uint64_t madds = 0;
};

/// Compressed-row copy of the unmasked entries of a weight matrix. Every
/// unmasked position is stored, including ones whose value happens to be 0,
/// so the work per product is exactly nonzeros() multiply-adds.
class CsrWeights {
 public:
  CsrWeights(const Matrix& weights, const Mask& mask);

  std::size_t size() const noexcept { return size_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  /// W x
  Vector multiply(const Vector& x, OpCounter* counter = nullptr) const;
  /// W^T x
  Vector multiply_transposed(const Vector& x, OpCounter* counter = nullptr) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> row_begin_;
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

}  // namespace pcgraph
