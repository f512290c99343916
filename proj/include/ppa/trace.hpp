#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ppa {

using Tick = std::uint64_t;
using OpId = std::uint64_t;

// Largest representable tick. Compares greater than every finite tick and
// stands in for an unbounded end time.
inline constexpr Tick kTickMax = ~Tick{0};

enum class Kind : std::uint8_t { kRead, kWrite };

/// One memory access. start/end, when present, bound the op's pending period.
struct Operation {
  OpId id = 0;
  std::uint32_t proc = 0;
  std::uint32_t idx = 0;  // program-order position within proc
  Kind kind = Kind::kRead;
  std::uint64_t addr = 0;
  std::uint64_t value = 0;
  std::optional<Tick> start;
  std::optional<Tick> end;

  bool is_read() const { return kind == Kind::kRead; }
  bool is_write() const { return kind == Kind::kWrite; }
  // An op counts as observed only when both bounding time points are known.
  bool observed() const { return start.has_value() && end.has_value(); }

  friend bool operator==(const Operation&, const Operation&) = default;
};

/// Immutable execution trace: ops grouped per processor in idx order.
///
/// Flat indices enumerate ops processor by processor (proc 0 first), each in
/// idx order; they are the cheap handle used throughout the library, while
/// OpId is the stable external name.
class Trace {
 public:
  Trace() = default;
  // Groups ops by processor and orders each group by idx. Throws
  // std::invalid_argument on proc >= num_procs, duplicate id, or duplicate
  // (proc, idx).
  Trace(std::uint32_t num_procs, std::vector<Operation> ops);

  std::uint32_t num_procs() const { return num_procs_; }
  std::size_t op_count() const { return count_; }
  const std::vector<Operation>& proc_ops(std::uint32_t proc) const {
    return procs_.at(proc);
  }

  std::size_t flat_index(std::uint32_t proc, std::uint32_t pos) const {
    return offsets_.at(proc) + pos;
  }
  const Operation& op(std::size_t flat) const { return *flat_.at(flat); }

  // nullptr when the id is unknown.
  const Operation* find(OpId id) const;
  std::size_t flat_of(OpId id) const;  // throws std::out_of_range

  bool operator==(const Trace& other) const;

 private:
  std::uint32_t num_procs_ = 0;
  std::size_t count_ = 0;
  std::vector<std::vector<Operation>> procs_;
  std::vector<std::size_t> offsets_;
  std::vector<const Operation*> flat_;
  std::unordered_map<OpId, std::size_t> id_to_flat_;
};

struct ValidationIssue {
  std::string code;
  std::string message;
  std::vector<OpId> ops;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Parse failure; line is 1-based within the input stream.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Trace file format: one JSON record per line. Line 1 is the header
// {"format":"ppa-trace","version":1,"procs":p}; every other line is one
// operation with exactly the fields id, proc, idx, kind, addr, value, start,
// end in that order, kind as "R"/"W", absent timestamps as null.
Trace parse_trace(std::string_view text);
std::string serialize_trace(const Trace& trace);

// Reports every violated trace invariant: idx contiguity per processor,
// boundary ops observed, start <= end. Total: never throws on a Trace.
ValidationReport validate_trace(const Trace& trace);

}  // namespace ppa
