#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ppa/pending.hpp"
#include "ppa/verdict.hpp"

namespace ppa {

// Worst-case enumeration at the default cap stays in the thousands of
// interleavings, well under a second with value checks.
inline constexpr std::size_t kOracleDefaultCap = 14;

class OracleCapExceeded : public std::runtime_error {
 public:
  OracleCapExceeded(std::size_t n, std::size_t cap)
      : std::runtime_error("oracle cap exceeded: " + std::to_string(n) +
                           " ops > cap " + std::to_string(cap)) {}
};

// Exhaustively visits every interleaving that respects processor order and
// physical time order, each exactly once, in deterministic order. The visitor
// receives flat indices in append order and returns false to stop early.
// Deliberately brute force and independent of the search engine: eligibility
// is re-derived by scanning all unappended ops.
void for_each_linearization(
    const AssignedTrace& at,
    const std::function<bool(const std::vector<std::size_t>&)>& visit,
    std::size_t cap = kOracleDefaultCap);

// All PO+T-respecting linearizations as op ids.
std::vector<std::vector<OpId>> enumerate_linearizations(
    const AssignedTrace& at, std::size_t cap = kOracleDefaultCap);

// Ground truth for SC-with-pending-periods: PASS iff some enumerated
// linearization satisfies read-latest-write with initial value 0.
Verdict oracle_verify_sc(const AssignedTrace& at,
                         std::size_t cap = kOracleDefaultCap);

/// All-pairs ordering counts over the enumerated (value-agnostic)
/// linearizations, for bulk MHB/CHB ground truth.
struct OracleOrderTable {
  std::uint64_t total = 0;
  // before[u][v] = number of linearizations placing u before v (flat).
  std::vector<std::vector<std::uint64_t>> before;

  bool mhb(std::size_t u_flat, std::size_t v_flat) const {
    return before[u_flat][v_flat] == total;  // vacuously true when total == 0
  }
  bool chb(std::size_t u_flat, std::size_t v_flat) const {
    return before[u_flat][v_flat] > 0;
  }
};

OracleOrderTable oracle_order_table(const AssignedTrace& at,
                                    std::size_t cap = kOracleDefaultCap);

bool oracle_mhb(const AssignedTrace& at, OpId u, OpId v,
                std::size_t cap = kOracleDefaultCap);
bool oracle_chb(const AssignedTrace& at, OpId u, OpId v,
                std::size_t cap = kOracleDefaultCap);

}  // namespace ppa
