#pragma once

#include <cstdint>
#include <vector>

#include "ppa/order_graph.hpp"

namespace ppa {

struct VerifyStats {
  std::uint64_t nodes_visited = 0;  // successful frontier advances
  std::uint64_t edges_tried = 0;    // advance attempts, failed ones included
  std::uint64_t backtracks = 0;
  std::size_t measured_C = 0;
};

/// Outcome of a consistency verification: PASS carries a witness
/// linearization, FAIL carries rule violations plus the exhausted-search
/// marker.
struct Verdict {
  bool pass = false;
  std::vector<OpId> witness;
  std::vector<RuleViolation> certificate;
  bool search_exhausted = false;
  VerifyStats stats;
};

}  // namespace ppa
