#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcgraph/errors.hpp"
#include "pcgraph/pcg.hpp"
#include "pcgraph/sparse.hpp"
#include "pcgraph/topology.hpp"

namespace pcgraph {
namespace {

using topology::ConnectionKind;
using topology::ConnectionSet;

const std::vector<ConnectionKind> kAllKinds{
    ConnectionKind::Forward, ConnectionKind::ForwardSkip, ConnectionKind::Backward,
    ConnectionKind::BackwardSkip, ConnectionKind::Lateral, ConnectionKind::SelfLoop,
    ConnectionKind::AllToAll};

// Entry-level definition of each block family, written independently of the
// library: target layer l (row), source layer k (column).
bool admitted(ConnectionKind kind, std::size_t row, std::size_t col, std::size_t l, std::size_t k) {
  switch (kind) {
    case ConnectionKind::Forward:
      return k + 1 == l;
    case ConnectionKind::ForwardSkip:
      return k + 1 < l;
    case ConnectionKind::Backward:
      return k == l + 1;
    case ConnectionKind::BackwardSkip:
      return k > l + 1;
    case ConnectionKind::Lateral:
      return k == l && row != col;
    case ConnectionKind::SelfLoop:
      return row == col;
    case ConnectionKind::AllToAll:
      return row != col;
  }
  return false;
}

TEST(BuildMask, BlockCounts) {
  const LayerSpec spec({2, 3, 3, 2});
  EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::Forward}).count(), 21);
  EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::AllToAll}).count(), 90);
  EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::Lateral}).count(), 16);
  EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::SelfLoop}).count(), 10);
  EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::AllToAll, ConnectionKind::SelfLoop}).count(),
            100);
}

TEST(BuildMask, MatchesEntryDefinitions) {
  oracle::Engine rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const LayerSpec spec(oracle::random_sizes(rng, 1, 5, 4));
    for (ConnectionKind kind : kAllKinds) {
      const Mask mask = topology::build_mask(spec, {kind});
      for (std::size_t r = 0; r < spec.node_count(); ++r) {
        for (std::size_t c = 0; c < spec.node_count(); ++c) {
          ASSERT_EQ(mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
                    admitted(kind, r, c, spec.layer_of(r), spec.layer_of(c)))
              << topology::to_string(kind) << " at (" << r << ", " << c << ")";
        }
      }
    }
  }
}

TEST(BuildMask, ForwardEqualsHierarchicalMask) {
  oracle::Engine rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const LayerSpec spec(oracle::random_sizes(rng, 1, 6, 6));
    EXPECT_EQ(topology::build_mask(spec, {ConnectionKind::Forward}), pcg::hierarchical_mask(spec));
  }
}

TEST(BuildMask, MonotoneInKinds) {
  const LayerSpec spec({2, 3, 4, 2});
  for (unsigned subset = 1; subset < (1u << kAllKinds.size()); ++subset) {
    ConnectionSet base;
    for (std::size_t i = 0; i < kAllKinds.size(); ++i) {
      if (subset & (1u << i)) base.insert(kAllKinds[i]);
    }
    const Mask small = topology::build_mask(spec, base);
    for (ConnectionKind extra : kAllKinds) {
      ConnectionSet bigger = base;
      bigger.insert(extra);
      const Mask large = topology::build_mask(spec, bigger);
      ASSERT_FALSE((small.array() && !large.array()).any());
    }
  }
}

TEST(BuildMask, EmptyKindsRejected) {
  EXPECT_THROW(topology::build_mask(LayerSpec({2, 2}), {}), DomainError);
}

TEST(ConnectionNames, ParseAndFormat) {
  const ConnectionSet kinds = topology::parse_connection_set("forward, forwardskip,lateral");
  EXPECT_EQ(kinds, (ConnectionSet{ConnectionKind::Forward, ConnectionKind::ForwardSkip,
                                  ConnectionKind::Lateral}));
  EXPECT_EQ(topology::parse_connection_set(topology::format_connection_set(kinds)), kinds);
  for (ConnectionKind kind : kAllKinds) {
    EXPECT_EQ(topology::parse_connection_kind(topology::to_string(kind)), kind);
  }
  EXPECT_THROW(topology::parse_connection_set("forward,sideways"), DomainError);
  EXPECT_THROW(topology::parse_connection_set(""), DomainError);
}

TEST(CostReport, ForwardMask) {
  const LayerSpec spec({2, 3, 3, 2});
  const auto report = topology::cost_report(spec, topology::build_mask(spec, {ConnectionKind::Forward}), 1);
  EXPECT_EQ(report.node_count, 10u);
  EXPECT_EQ(report.connections, 21u);
  EXPECT_EQ(report.sparse_ops, 21u * topology::kMaddsPerConnection);
  EXPECT_EQ(report.dense_ops, 100u);
  EXPECT_EQ(report.depth, 3u);
  EXPECT_EQ(report.largest_block, 9u);
  EXPECT_EQ(report.fnn_ops, 27u);
}

TEST(CostReport, DenseOpsAndEmptyMask) {
  const LayerSpec spec({2, 3, 3, 2});
  const auto all = topology::cost_report(spec, topology::build_mask(spec, {ConnectionKind::AllToAll}), 5);
  EXPECT_EQ(all.dense_ops, 500u);
  EXPECT_EQ(all.sparse_ops, 900u);
  const auto none = topology::cost_report(spec, Mask::Constant(10, 10, false), 5);
  EXPECT_EQ(none.connections, 0u);
  EXPECT_EQ(none.sparse_ops, 0u);
}

TEST(CostReport, Invariants) {
  oracle::Engine rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const LayerSpec spec(oracle::random_sizes(rng, 1, 4, 5));
    const auto report = topology::cost_report(
        spec, topology::build_mask(spec, {kAllKinds[static_cast<std::size_t>(trial) % kAllKinds.size()]}), 7);
    EXPECT_LE(report.connections, report.node_count * report.node_count);
    EXPECT_LE(report.sparse_ops, report.dense_ops * topology::kMaddsPerConnection);
  }
  EXPECT_THROW(topology::cost_report(LayerSpec({2, 2}), Mask::Constant(3, 3, true), 1), DomainError);
}

TEST(InstrumentedInference, OneStepCostsTwoPerConnection) {
  oracle::Engine rng(4);
  const LayerSpec spec({2, 3, 3, 2});
  for (const ConnectionSet& kinds :
       {ConnectionSet{ConnectionKind::Forward},
        ConnectionSet{ConnectionKind::Forward, ConnectionKind::Lateral},
        ConnectionSet{ConnectionKind::AllToAll}}) {
    for (auto conv : {PredictionConvention::MatrixActivation, PredictionConvention::ActivationMatrix}) {
      const auto model = oracle::random_pcg(rng, topology::build_mask(spec, kinds),
                                            ActivationKind::Tanh, conv, 2, 2);
      pcg::PcgState state{oracle::random_vector(rng, 10, 1.0), ClampMode::Training};
      OpCounter counter;
      pcg::descent_step(model, state, 0.1, EvaluationPath::Sparse, &counter);
      EXPECT_EQ(counter.madds, model.connection_count() * topology::kMaddsPerConnection);

      OpCounter dense;
      pcg::descent_step(model, state, 0.1, EvaluationPath::Dense, &dense);
      EXPECT_EQ(dense.madds, 2u * 100u);
    }
  }
}

TEST(CsrWeights, ProductsMatchDense) {
  oracle::Engine rng(5);
  const LayerSpec spec({3, 4, 2});
  const Mask mask = topology::build_mask(spec, {ConnectionKind::Forward, ConnectionKind::Backward});
  const auto model = oracle::random_pcg(rng, mask, ActivationKind::Tanh,
                                        PredictionConvention::MatrixActivation, 3, 2);
  const CsrWeights csr(model.weights(), mask);
  EXPECT_EQ(csr.nonzeros(), static_cast<std::size_t>(mask.count()));
  const Vector x = oracle::random_vector(rng, 9, 1.0);
  OpCounter counter;
  EXPECT_LE((csr.multiply(x, &counter) - model.weights() * x).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((csr.multiply_transposed(x, &counter) - model.weights().transpose() * x)
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
  EXPECT_EQ(counter.madds, 2u * csr.nonzeros());
}

}  // namespace
}  // namespace pcgraph
