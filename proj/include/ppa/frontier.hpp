#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ppa/order_graph.hpp"
#include "ppa/pending.hpp"
#include "ppa/verdict.hpp"

namespace ppa {

/// A frontier is the per-processor count of appended ops; count 0 is the
/// absent-operation sentinel for that processor.
using Frontier = std::vector<std::uint32_t>;

/// Per-processor suffix minima of period end ticks; decides whether an op may
/// be appended: op x is eligible iff no unappended op y has end(y) < start(x),
/// so every append order embeds physical time order.
class AdvanceRules {
 public:
  explicit AdvanceRules(const AssignedTrace& at);

  bool eligible(const Frontier& f, std::uint32_t proc) const;
  // Advancing flat ops, branch-ordered: ascending period end, then processor.
  std::vector<std::size_t> successors(const Frontier& f) const;
  bool terminating(const Frontier& f) const;

  const AssignedTrace& assigned() const { return *at_; }

 private:
  const AssignedTrace* at_;
  std::vector<std::vector<Tick>> suffix_min_end_;  // [proc][pos], size k+1
};

// One spec-level step: per processor whose next op is advance-eligible, the
// (op, successor frontier) pair; at most p entries, branch-ordered.
std::vector<std::pair<std::size_t, Frontier>> feasible_successors(
    const AssignedTrace& at, const Frontier& f);

class FrontierCapExceeded : public std::runtime_error {
 public:
  explicit FrontierCapExceeded(std::size_t cap)
      : std::runtime_error("frontier graph exceeds node cap " +
                           std::to_string(cap)) {}
};

/// Explicitly enumerated pruned frontier graph: every frontier reachable from
/// the starting frontier under advance-eligibility, value checks not applied.
/// Immutable once built; the assigned trace must outlive it.
class FrontierGraph {
 public:
  struct Edge {
    std::uint32_t to;
    std::size_t op_flat;  // advancing op
  };

  static constexpr std::size_t kDefaultNodeCap = 2'000'000;

  FrontierGraph(const AssignedTrace& at, std::size_t node_cap);

  const AssignedTrace& assigned() const { return *at_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const Frontier& node(std::uint32_t id) const { return nodes_.at(id); }
  const std::vector<Edge>& out(std::uint32_t id) const { return out_.at(id); }
  std::uint32_t start_node() const { return 0; }
  // Absent when the terminating frontier is unreachable.
  std::optional<std::uint32_t> end_node() const { return end_node_; }

 private:
  const AssignedTrace* at_;
  std::vector<Frontier> nodes_;
  std::vector<std::vector<Edge>> out_;
  std::size_t edge_count_ = 0;
  std::optional<std::uint32_t> end_node_;
};

inline FrontierGraph build_frontier_graph(
    const AssignedTrace& at, std::size_t node_cap = FrontierGraph::kDefaultNodeCap) {
  return FrontierGraph(at, node_cap);
}

/// Backtracking search state: current frontier, execution graph under
/// construction, per-address last-appended-write and reader bookkeeping.
/// advance/backtrack are exact inverses.
class SearchState {
 public:
  explicit SearchState(const AssignedTrace& at);
  SearchState(const SearchState&) = delete;
  SearchState& operator=(const SearchState&) = delete;

  const Frontier& frontier() const { return frontier_; }
  bool at_terminating_frontier() const { return rules_.terminating(frontier_); }
  std::vector<std::size_t> feasible_ops() const {
    return rules_.successors(frontier_);
  }

  // Applies op's read/write effects, adds execution-order edges, and runs the
  // incremental acyclicity check on the touched ops. Empty result: advanced.
  // Non-empty: the violations; the state is left unchanged.
  std::vector<RuleViolation> advance(std::size_t op_flat);
  bool can_backtrack() const { return !undo_stack_.empty(); }
  // Removes exactly the edges the undone advance added and restores the
  // last-write/reader bookkeeping. Returns the undone op.
  std::size_t backtrack();

  const std::vector<std::size_t>& linearization() const { return lin_; }
  const TGOGraph& graph() const { return graph_; }
  const AdvanceRules& rules() const { return rules_; }

  // Canonical structural hash over frontier, linearization, exec edges and
  // memory bookkeeping; equal states hash equal.
  std::uint64_t fingerprint() const;
  // Key for failed-state memoization: frontier plus per-address last write.
  std::uint64_t memo_key() const;

 private:
  struct Undo {
    std::size_t op_flat;
    std::vector<ExecEdge> edges;
    bool wrote = false;
    std::uint64_t addr = 0;
    std::optional<std::size_t> saved_last_write;
    std::vector<std::size_t> saved_readers;
  };

  const AssignedTrace* at_;
  AdvanceRules rules_;
  TGOGraph graph_;
  Frontier frontier_;
  std::vector<std::size_t> lin_;
  std::unordered_map<std::uint64_t, std::size_t> last_write_;  // addr -> flat
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> readers_;
  std::vector<Undo> undo_stack_;
};

struct VerifyOptions {
  // Remember failed (frontier, per-address last write) states and prune
  // revisits. Off by default: the complexity argument does not rely on it.
  bool memoize_failures = false;
};

// Complete SC-with-pending-periods verification: PASS iff some path from the
// starting to the terminating frontier yields an acyclic TGO graph with all
// read values satisfied.
Verdict verify_sc(const AssignedTrace& at, const VerifyOptions& opts = {});

}  // namespace ppa
