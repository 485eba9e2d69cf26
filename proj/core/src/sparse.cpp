#include "pcgraph/sparse.hpp"

#include "pcgraph/errors.hpp"

namespace pcgraph {

CsrWeights::CsrWeights(const Matrix& weights, const Mask& mask)
    : size_(static_cast<std::size_t>(weights.rows())) {
  if (weights.rows() != weights.cols() || mask.rows() != weights.rows() ||
      mask.cols() != weights.cols()) {
    throw DomainError("sparse weights need square, equally shaped weight and mask matrices");
  }
  const auto n = weights.rows();
  // Two passes in storage (column) order: count entries per row, then place
  // them. Columns arrive in increasing order, so each row stays sorted.
  row_begin_.assign(size_ + 1, 0);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (mask(r, c)) ++row_begin_[static_cast<std::size_t>(r) + 1];
    }
  }
  for (std::size_t r = 0; r < size_; ++r) row_begin_[r + 1] += row_begin_[r];
  columns_.resize(row_begin_.back());
  values_.resize(row_begin_.back());
  std::vector<std::size_t> next(row_begin_.begin(), row_begin_.end() - 1);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!mask(r, c)) continue;
      const std::size_t k = next[static_cast<std::size_t>(r)]++;
      columns_[k] = static_cast<std::size_t>(c);
      values_[k] = weights(r, c);
    }
  }
}

Vector CsrWeights::multiply(const Vector& x, OpCounter* counter) const {
  if (static_cast<std::size_t>(x.size()) != size_) throw DomainError("sparse product width mismatch");
  Vector out(x.size());
  for (std::size_t r = 0; r < size_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      acc += values_[k] * x[static_cast<Eigen::Index>(columns_[k])];
    }
    out[static_cast<Eigen::Index>(r)] = acc;
  }
  if (counter) counter->madds += values_.size();
  return out;
}

Vector CsrWeights::multiply_transposed(const Vector& x, OpCounter* counter) const {
  if (static_cast<std::size_t>(x.size()) != size_) throw DomainError("sparse product width mismatch");
  Vector out = Vector::Zero(x.size());
  for (std::size_t r = 0; r < size_; ++r) {
    const double xr = x[static_cast<Eigen::Index>(r)];
    for (std::size_t k = row_begin_[r]; k < row_begin_[r + 1]; ++k) {
      out[static_cast<Eigen::Index>(columns_[k])] += values_[k] * xr;
    }
  }
  if (counter) counter->madds += values_.size();
  return out;
}

}  // namespace pcgraph
