#include "ppa/trace.hpp"

#include <algorithm>

#include "json.hpp"

namespace ppa {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t require_uint(const ordered_json& rec, const char* key,
                           std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  if (!it->is_number_unsigned()) {
    throw ParseError(line,
                     std::string("field \"") + key +
                         "\" must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

std::optional<Tick> opt_tick(const ordered_json& rec, const char* key,
                             std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  if (it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) {
    throw ParseError(line, std::string("field \"") + key +
                               "\" must be a non-negative integer or null");
  }
  return it->get<Tick>();
}

ordered_json parse_line(const std::string& line, std::size_t lineno) {
  ordered_json rec = ordered_json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw ParseError(lineno, "malformed record");
  }
  return rec;
}

constexpr const char* kOpFields[] = {"id",   "proc",  "idx",   "kind",
                                     "addr", "value", "start", "end"};

}  // namespace

Trace::Trace(std::uint32_t num_procs, std::vector<Operation> ops)
    : num_procs_(num_procs), procs_(num_procs) {
  for (Operation& op : ops) {
    if (op.proc >= num_procs_) {
      throw std::invalid_argument("operation proc out of range");
    }
    procs_[op.proc].push_back(std::move(op));
  }
  for (auto& group : procs_) {
    std::sort(group.begin(), group.end(),
              [](const Operation& a, const Operation& b) {
                return a.idx < b.idx;
              });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i].idx == group[i - 1].idx) {
        throw std::invalid_argument("duplicate (proc, idx)");
      }
    }
  }
  offsets_.resize(num_procs_);
  for (std::uint32_t p = 0; p < num_procs_; ++p) {
    offsets_[p] = count_;
    count_ += procs_[p].size();
  }
  flat_.reserve(count_);
  id_to_flat_.reserve(count_);
  for (const auto& group : procs_) {
    for (const Operation& op : group) {
      if (!id_to_flat_.emplace(op.id, flat_.size()).second) {
        throw std::invalid_argument("duplicate operation id");
      }
      flat_.push_back(&op);
    }
  }
}

const Operation* Trace::find(OpId id) const {
  auto it = id_to_flat_.find(id);
  return it == id_to_flat_.end() ? nullptr : flat_[it->second];
}

std::size_t Trace::flat_of(OpId id) const {
  auto it = id_to_flat_.find(id);
  if (it == id_to_flat_.end()) {
    throw std::out_of_range("unknown op id " + std::to_string(id));
  }
  return it->second;
}

bool Trace::operator==(const Trace& other) const {
  return num_procs_ == other.num_procs_ && procs_ == other.procs_;
}

Trace parse_trace(std::string_view text) {
  std::vector<std::string> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::size_t lineno = 0;
  std::optional<std::uint32_t> num_procs;
  std::vector<Operation> ops;

  for (const std::string& line : lines) {
    ++lineno;
    if (lineno == 1) {
      ordered_json hdr = parse_line(line, lineno);
      auto fmt = hdr.find("format");
      if (fmt == hdr.end() || !fmt->is_string() ||
          fmt->get<std::string>() != "ppa-trace") {
        throw ParseError(lineno, "missing or wrong header format");
      }
      if (require_uint(hdr, "version", lineno) != 1) {
        throw ParseError(lineno, "unsupported version");
      }
      std::uint64_t procs = require_uint(hdr, "procs", lineno);
      num_procs = static_cast<std::uint32_t>(procs);
      continue;
    }

    ordered_json rec = parse_line(line, lineno);
    if (rec.size() != std::size(kOpFields)) {
      throw ParseError(lineno, "record must have exactly the operation fields");
    }
    for (const char* key : kOpFields) {
      if (!rec.contains(key)) {
        throw ParseError(lineno, std::string("missing field \"") + key + "\"");
      }
    }
    Operation op;
    op.id = require_uint(rec, "id", lineno);
    op.proc = static_cast<std::uint32_t>(require_uint(rec, "proc", lineno));
    op.idx = static_cast<std::uint32_t>(require_uint(rec, "idx", lineno));
    const auto& kind = rec.at("kind");
    if (!kind.is_string()) throw ParseError(lineno, "field \"kind\" must be \"R\" or \"W\"");
    std::string k = kind.get<std::string>();
    if (k == "R") {
      op.kind = Kind::kRead;
    } else if (k == "W") {
      op.kind = Kind::kWrite;
    } else {
      throw ParseError(lineno, "field \"kind\" must be \"R\" or \"W\"");
    }
    op.addr = require_uint(rec, "addr", lineno);
    op.value = require_uint(rec, "value", lineno);
    op.start = opt_tick(rec, "start", lineno);
    op.end = opt_tick(rec, "end", lineno);
    if (!num_procs.has_value()) {
      throw ParseError(lineno, "missing header line");
    }
    if (op.proc >= *num_procs) {
      throw ParseError(lineno, "proc " + std::to_string(op.proc) +
                                   " out of range [0, " +
                                   std::to_string(*num_procs) + ")");
    }
    ops.push_back(std::move(op));
  }

  if (!num_procs.has_value()) {
    throw ParseError(1, "missing header line");
  }

  // Duplicate ids / (proc, idx) surface from the Trace constructor.
  try {
    return Trace(*num_procs, std::move(ops));
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
}

std::string serialize_trace(const Trace& trace) {
  ordered_json hdr;
  hdr["format"] = "ppa-trace";
  hdr["version"] = 1;
  hdr["procs"] = trace.num_procs();
  std::string out = hdr.dump();
  out.push_back('\n');
  for (std::uint32_t p = 0; p < trace.num_procs(); ++p) {
    for (const Operation& op : trace.proc_ops(p)) {
      ordered_json rec;
      rec["id"] = op.id;
      rec["proc"] = op.proc;
      rec["idx"] = op.idx;
      rec["kind"] = op.is_write() ? "W" : "R";
      rec["addr"] = op.addr;
      rec["value"] = op.value;
      if (op.start) rec["start"] = *op.start; else rec["start"] = nullptr;
      if (op.end) rec["end"] = *op.end; else rec["end"] = nullptr;
      out += rec.dump();
      out.push_back('\n');
    }
  }
  return out;
}

ValidationReport validate_trace(const Trace& trace) {
  ValidationReport report;
  for (std::uint32_t p = 0; p < trace.num_procs(); ++p) {
    const auto& group = trace.proc_ops(p);
    for (std::size_t i = 0; i < group.size(); ++i) {
      const Operation& op = group[i];
      if (op.idx != i) {
        report.issues.push_back(
            {"non-contiguous idx",
             "proc " + std::to_string(p) + " jumps to idx " +
                 std::to_string(op.idx) + " at position " + std::to_string(i),
             {op.id}});
      }
      if (op.start && op.end && *op.start > *op.end) {
        report.issues.push_back(
            {"start exceeds end",
             "op " + std::to_string(op.id) + " has start " +
                 std::to_string(*op.start) + " > end " +
                 std::to_string(*op.end),
             {op.id}});
      }
    }
    if (!group.empty()) {
      auto report_boundary = [&](const Operation& boundary) {
        if (boundary.observed()) return;
        report.issues.push_back(
            {"boundary op unobserved",
             "op " + std::to_string(boundary.id) + " (proc " +
                 std::to_string(p) +
                 ") lacks an observed start/end but has no observed "
                 "neighbor to infer from",
             {boundary.id}});
      };
      report_boundary(group.front());
      if (group.size() > 1) report_boundary(group.back());
    }
  }
  return report;
}

}  // namespace ppa
