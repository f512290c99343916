#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppa/pending.hpp"
#include "ppa/trace.hpp"

namespace ppa {

struct SimConfig {
  std::uint32_t num_procs = 2;
  std::uint32_t ops_per_proc = 8;
  std::uint64_t num_addrs = 2;
  Tick max_pending_len = 8;  // B: bounds every end - start
  Tick gap_max = 3;          // issue gap per processor ~ p * U[1, gap_max]
  std::uint64_t seed = 0;

  bool valid() const {
    return num_procs >= 1 && ops_per_proc >= 1 && num_addrs >= 1 &&
           max_pending_len >= 1 && gap_max >= 1;
  }
};

/// Operation with ground-truth performed time; start/end always observed and
/// start <= performed <= end on generated traces.
struct AnnotatedOp {
  Operation op;
  Tick performed = 0;
};

struct AnnotatedTrace {
  std::uint32_t num_procs = 0;
  std::vector<std::vector<AnnotatedOp>> procs;  // idx order

  std::size_t op_count() const;
  const AnnotatedOp* find(OpId id) const;
  Trace to_trace() const;  // full observation, performed times dropped
};

// SC-legal by construction: distinct performed ticks, strictly increasing per
// processor, every read returns the latest prior write to its address (or 0),
// every write a globally unique nonzero value, every period length <= B.
AnnotatedTrace generate_execution(const SimConfig& cfg);

// Keeps start/end on ops at idx == 0 (mod m), the first and the last op of
// each processor; clears both elsewhere. Performed times are dropped.
Trace sample_observations(const AnnotatedTrace& tr, std::uint32_t m);

enum class FaultKind : std::uint8_t {
  kStaleRead,  // read returns a value overwritten before its period began
  kReorderPo,  // two same-processor performed times swapped against PO
  kLostWrite,  // read sources a write that never becomes the latest
  kBadPeriod,  // reported pending period shrunk to exclude the performed time
};

const char* fault_kind_name(FaultKind kind);
FaultKind fault_kind_from_name(const std::string& name);  // throws on unknown

struct FaultDescriptor {
  FaultKind kind = FaultKind::kStaleRead;
  std::vector<OpId> op_ids;  // implicated ops
};

class TraceTooSmall : public std::runtime_error {
 public:
  explicit TraceTooSmall(const std::string& what) : std::runtime_error(what) {}
};

// Mutates values/timestamps only; never adds or removes ops. The mutation
// guarantees loss of SC-legality for the first three kinds and a pending
// period excluding the performed time for kBadPeriod. Throws TraceTooSmall
// when no qualifying site exists.
std::pair<AnnotatedTrace, FaultDescriptor> inject_fault(
    const AnnotatedTrace& tr, FaultKind kind, std::uint64_t seed);

// Ids of ops whose ground-truth performed time falls outside the (observed or
// inferred) pending period: the legality monitor for improper performed
// times. Ops present in only one input are ignored.
std::vector<OpId> check_period_legality(const AnnotatedTrace& truth,
                                        const AssignedTrace& assigned);

// Ground-truth sidecar: the trace format plus a trailing "performed" field,
// header format "ppa-truth".
std::string serialize_truth(const AnnotatedTrace& tr);
AnnotatedTrace parse_truth(std::string_view text);

}  // namespace ppa
