#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppa/pending.hpp"

namespace ppa {

enum class EdgeLabel : std::uint8_t {
  kSourcing,             // w ->E r : r returns w's value
  kReadBeforeNextWrite,  // r ->E w : r read the value w overwrites
  kCoherence,            // w ->E w' : same-location write order
};

struct ExecEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeLabel label = EdgeLabel::kSourcing;
  friend bool operator==(const ExecEdge&, const ExecEdge&) = default;
};

struct RuleViolation {
  int rule = 0;                // 1, 2 or 3
  std::vector<OpId> witness;   // ops forming the offending cycle / edge pair
  friend bool operator==(const RuleViolation&, const RuleViolation&) = default;
};

struct RuleCheckStats {
  std::size_t expanded = 0;  // ops visited by the localized search
};

/// Execution graph over an assigned trace: processor-order chains, a dynamic
/// multiset of execution-order edges, and implicit physical-time-order edges
/// decided by period comparison on demand.
///
/// Owned by one search engine at a time; the trace must outlive the graph.
class TGOGraph {
 public:
  explicit TGOGraph(const AssignedTrace& at);

  const AssignedTrace& assigned() const { return *at_; }

  // Endpoints must conflict: same address and at least one write. Throws
  // std::invalid_argument otherwise, and on removing an absent edge.
  void add_exec_edge(std::size_t from, std::size_t to, EdgeLabel label);
  void remove_exec_edge(std::size_t from, std::size_t to, EdgeLabel label);

  std::size_t exec_edge_count() const { return edge_count_; }
  const std::vector<ExecEdge>& exec_out(std::size_t flat) const {
    return out_.at(flat);
  }
  std::vector<ExecEdge> exec_edges() const;  // all, deterministic order

  // Rule 1: an outgoing E edge (or the direct processor-order successor)
  // whose target is physically before u. Each hit is a 2-cycle.
  std::vector<RuleViolation> check_rule1(std::size_t u) const;
  // Rule 2: a PO/E path from u through ops overlapping u's pending period
  // reaching some v with v ->T u. One violation per distinct v, shortest
  // path first; witness [u, first hop, v].
  std::vector<RuleViolation> check_rule2(std::size_t u,
                                         RuleCheckStats* stats = nullptr) const;
  // Rule 3: a PO/E cycle through u entirely inside u's overlap window.
  // Witness is the cycle in order, starting at u.
  std::vector<RuleViolation> check_rule3(std::size_t u,
                                         RuleCheckStats* stats = nullptr) const;

  // Id-based variants per the module contract; throw on unknown id.
  std::vector<RuleViolation> check_rule1_id(OpId u) const;
  std::vector<RuleViolation> check_rule2_id(OpId u) const;
  std::vector<RuleViolation> check_rule3_id(OpId u) const;

  // Rules 1-3 over the given ops (incremental mode). Empty result == Pass.
  std::vector<RuleViolation> check_acyclic(
      std::span<const std::size_t> dirty) const;
  // Full mode: rules 1-3 over every op. Equivalent to global cycle detection
  // over PO, E and materialized T edges.
  std::vector<RuleViolation> check_acyclic() const;

  const OverlapIndex& overlap_index() const { return index_; }

 private:
  bool conflicting(std::size_t a, std::size_t b) const;
  const Operation& op(std::size_t flat) const { return at_->op(flat); }

  const AssignedTrace* at_;
  OverlapIndex index_;
  std::vector<std::vector<ExecEdge>> out_;
  std::size_t edge_count_ = 0;
};

inline TGOGraph build_base_graph(const AssignedTrace& at) {
  return TGOGraph(at);
}

// Classifies reads whose value is impossible under processor order and
// physical time order alone into rule violations, from the trace's values:
// stale sources (the claimed write is overwritten, via T or PO, by a write
// that itself physically precedes the read), reads of initial 0 despite a
// physically preceding write, and reads sourcing a program-order-later write.
// Sound: every entry corresponds to a cycle under read-mapping-implied edges.
std::vector<RuleViolation> diagnose_read_mapping(const AssignedTrace& at);

}  // namespace ppa
