#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcgraph::harness {

enum class Suite { Theorem1, Theorem2, Gradients, Cost };

std::string_view to_string(Suite suite);
std::optional<Suite> parse_suite(std::string_view name);

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Worst observed value of the checked quantity and the bound it must
  /// stay below (or equal, for exact checks where the bound is 0).
  double measured = 0.0;
  double threshold = 0.0;
  std::size_t instances = 0;
};

struct VerifyReport {
  Suite suite = Suite::Theorem1;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Runs one suite of seeded numerical checks:
///  theorem1  - exact testing-mode inference equals the feedforward pass
///              bit-for-bit; gradient descent from zero reaches it.
///  theorem2  - the hierarchically embedded graph has E_G = E_N + C and
///              identical activity and weight updates.
///  gradients - closed-form gradients against central finite differences.
///  cost      - instrumented sparse inference spends exactly c d T madds.
VerifyReport verify(Suite suite, std::uint64_t seed);

void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace pcgraph::harness
