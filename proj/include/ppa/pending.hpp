#pragma once

#include <cstdint>
#include <vector>

#include "ppa/trace.hpp"

namespace ppa {

enum class Provenance : std::uint8_t { kObserved, kInferred };

/// Closed interval [start, end] in ticks guaranteed to contain an op's
/// performed time.
struct Period {
  Tick start = 0;
  Tick end = 0;

  // Strict: touching intervals (end == other.start) count as overlapped.
  bool before(const Period& other) const { return end < other.start; }
  bool overlaps(const Period& other) const {
    return !before(other) && !other.before(*this);
  }
  friend bool operator==(const Period&, const Period&) = default;
};

/// A trace in which every op carries a pending period, observed or inferred.
///
/// Unobserved ops take their start from the nearest observed predecessor and
/// their end from the nearest observed successor in processor order.
class AssignedTrace {
 public:
  // Requires validate_trace(trace).ok(); throws std::invalid_argument when a
  // processor's boundary op lacks an observation to infer from.
  static AssignedTrace assign(Trace trace);

  const Trace& trace() const { return trace_; }
  std::size_t op_count() const { return trace_.op_count(); }
  const Operation& op(std::size_t flat) const { return trace_.op(flat); }

  const Period& period(std::size_t flat) const { return periods_.at(flat); }
  Provenance provenance(std::size_t flat) const { return prov_.at(flat); }

  bool physically_before(std::size_t u_flat, std::size_t v_flat) const {
    return periods_[u_flat].before(periods_[v_flat]);
  }

 private:
  AssignedTrace() = default;
  Trace trace_;
  std::vector<Period> periods_;
  std::vector<Provenance> prov_;
};

inline AssignedTrace assign_pending_periods(Trace trace) {
  return AssignedTrace::assign(std::move(trace));
}

// True iff end(u) < start(v), strictly (Def. 6). Throws std::out_of_range on
// unknown ids. Irreflexive by construction.
bool physically_before(const AssignedTrace& at, OpId u, OpId v);

/// Per-processor interval index answering overlap queries.
class OverlapIndex {
 public:
  explicit OverlapIndex(const AssignedTrace& at);

  // Flat indices of ops on `proc` whose period intersects [a, b].
  std::vector<std::size_t> query(std::uint32_t proc, Tick a, Tick b) const;
  // All ops v != u whose period overlaps u's, ascending flat order.
  std::vector<std::size_t> overlap_set_flat(std::size_t u_flat) const;
  // Id-based variant per the module contract; throws on unknown id.
  std::vector<OpId> overlap_set(OpId u) const;

  const AssignedTrace& assigned() const { return *at_; }

 private:
  const AssignedTrace* at_;
  // Per proc: flat indices sorted by period start, with running max of end to
  // cut short scans from the left.
  std::vector<std::vector<std::size_t>> by_start_;
  std::vector<std::vector<Tick>> prefix_max_end_;
};

// Max over ops u and processors j of |{v on proc j, v != u, v overlaps u}|.
// The empirical per-processor overlap bound C of the frontier counting
// argument.
std::size_t measure_C(const AssignedTrace& at);

// Histogram of |overlap_set(u)| over all ops: pairs (overlap count, #ops),
// ascending.
std::vector<std::pair<std::size_t, std::size_t>> overlap_histogram(
    const AssignedTrace& at);

}  // namespace ppa
