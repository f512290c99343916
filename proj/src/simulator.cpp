#include "ppa/simulator.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "ppa/rng.hpp"

namespace ppa {

namespace {

using ordered_json = nlohmann::ordered_json;

struct FlatRef {
  std::uint32_t proc;
  std::uint32_t idx;
};

std::vector<FlatRef> performed_order(const AnnotatedTrace& tr) {
  std::vector<FlatRef> order;
  for (std::uint32_t p = 0; p < tr.num_procs; ++p) {
    for (std::uint32_t i = 0; i < tr.procs[p].size(); ++i) {
      order.push_back({p, i});
    }
  }
  std::sort(order.begin(), order.end(), [&](const FlatRef& a, const FlatRef& b) {
    return tr.procs[a.proc][a.idx].performed <
           tr.procs[b.proc][b.idx].performed;
  });
  return order;
}

// Recomputes every read's value by replaying writes in performed order.
void replay_values(AnnotatedTrace& tr) {
  std::unordered_map<std::uint64_t, std::uint64_t> mem;
  for (const FlatRef& ref : performed_order(tr)) {
    AnnotatedOp& a = tr.procs[ref.proc][ref.idx];
    if (a.op.is_write()) {
      mem[a.op.addr] = a.op.value;
    } else {
      auto it = mem.find(a.op.addr);
      a.op.value = it == mem.end() ? 0 : it->second;
    }
  }
}

}  // namespace

std::size_t AnnotatedTrace::op_count() const {
  std::size_t n = 0;
  for (const auto& group : procs) n += group.size();
  return n;
}

const AnnotatedOp* AnnotatedTrace::find(OpId id) const {
  for (const auto& group : procs) {
    for (const AnnotatedOp& a : group) {
      if (a.op.id == id) return &a;
    }
  }
  return nullptr;
}

Trace AnnotatedTrace::to_trace() const {
  std::vector<Operation> ops;
  for (const auto& group : procs) {
    for (const AnnotatedOp& a : group) ops.push_back(a.op);
  }
  return Trace(num_procs, std::move(ops));
}

AnnotatedTrace generate_execution(const SimConfig& cfg) {
  if (!cfg.valid()) throw std::invalid_argument("invalid simulator config");
  Rng rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 0x245f);
  AnnotatedTrace tr;
  tr.num_procs = cfg.num_procs;
  tr.procs.resize(cfg.num_procs);

  // Performed ticks stay congruent to the processor index mod p, so they are
  // globally distinct while strictly increasing per processor.
  for (std::uint32_t p = 0; p < cfg.num_procs; ++p) {
    Tick t = p;
    for (std::uint32_t i = 0; i < cfg.ops_per_proc; ++i) {
      t += cfg.num_procs * rng.range(1, cfg.gap_max);
      AnnotatedOp a;
      a.performed = t;
      a.op.id = static_cast<OpId>(p) * cfg.ops_per_proc + i;
      a.op.proc = p;
      a.op.idx = i;
      a.op.kind = rng.bounded(2) == 0 ? Kind::kWrite : Kind::kRead;
      a.op.addr = rng.bounded(cfg.num_addrs);
      Tick before = rng.bounded(cfg.max_pending_len + 1);
      Tick after = rng.bounded(cfg.max_pending_len - before + 1);
      a.op.start = t >= before ? t - before : 0;
      a.op.end = t + after;
      tr.procs[p].push_back(a);
    }
  }

  // Unique nonzero write values in performed order, then read replay.
  std::uint64_t counter = 0;
  for (const FlatRef& ref : performed_order(tr)) {
    AnnotatedOp& a = tr.procs[ref.proc][ref.idx];
    if (a.op.is_write()) a.op.value = ++counter;
  }
  replay_values(tr);
  return tr;
}

Trace sample_observations(const AnnotatedTrace& tr, std::uint32_t m) {
  if (m == 0) throw std::invalid_argument("observation rate m must be >= 1");
  std::vector<Operation> ops;
  for (std::uint32_t p = 0; p < tr.num_procs; ++p) {
    const auto& group = tr.procs[p];
    for (std::uint32_t i = 0; i < group.size(); ++i) {
      Operation op = group[i].op;
      bool keep = i % m == 0 || i + 1 == group.size();
      if (!keep) {
        op.start.reset();
        op.end.reset();
      }
      ops.push_back(std::move(op));
    }
  }
  return Trace(tr.num_procs, std::move(ops));
}

const char* fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::kStaleRead: return "stale-read";
    case FaultKind::kReorderPo: return "reorder-po";
    case FaultKind::kLostWrite: return "lost-write";
    case FaultKind::kBadPeriod: return "bad-period";
  }
  return "unknown";
}

FaultKind fault_kind_from_name(const std::string& name) {
  if (name == "stale-read") return FaultKind::kStaleRead;
  if (name == "reorder-po") return FaultKind::kReorderPo;
  if (name == "lost-write") return FaultKind::kLostWrite;
  if (name == "bad-period") return FaultKind::kBadPeriod;
  throw std::invalid_argument("unknown fault kind: " + name);
}

namespace {

Tick start_of(const AnnotatedOp& a) { return *a.op.start; }
Tick end_of(const AnnotatedOp& a) { return *a.op.end; }

std::vector<AnnotatedOp*> all_ops(AnnotatedTrace& tr) {
  std::vector<AnnotatedOp*> out;
  for (auto& group : tr.procs) {
    for (AnnotatedOp& a : group) out.push_back(&a);
  }
  return out;
}

}  // namespace

std::pair<AnnotatedTrace, FaultDescriptor> inject_fault(
    const AnnotatedTrace& tr, FaultKind kind, std::uint64_t seed) {
  AnnotatedTrace mutated = tr;
  FaultDescriptor desc;
  desc.kind = kind;
  Rng rng(seed ^ 0x7f4a7c15ULL);
  std::vector<AnnotatedOp*> ops = all_ops(mutated);

  switch (kind) {
    case FaultKind::kStaleRead: {
      // Triples w1 ->T w2 ->T r on one address: r's claimed source was
      // overwritten before r's pending period began.
      struct Triple { AnnotatedOp *w1, *w2, *r; };
      std::vector<Triple> sites;
      for (AnnotatedOp* r : ops) {
        if (!r->op.is_read()) continue;
        for (AnnotatedOp* w2 : ops) {
          if (!w2->op.is_write() || w2->op.addr != r->op.addr) continue;
          if (!(end_of(*w2) < start_of(*r))) continue;
          for (AnnotatedOp* w1 : ops) {
            if (!w1->op.is_write() || w1->op.addr != r->op.addr) continue;
            if (end_of(*w1) < start_of(*w2)) {
              sites.push_back({w1, w2, r});
            }
          }
        }
      }
      if (sites.empty()) {
        throw TraceTooSmall("no stale-read site: need writes w1 ->T w2 ->T r "
                            "on one address");
      }
      Triple site = sites[rng.bounded(sites.size())];
      site.r->op.value = site.w1->op.value;
      desc.op_ids = {site.w1->op.id, site.w2->op.id, site.r->op.id};
      break;
    }
    case FaultKind::kLostWrite: {
      // w1 ->PO w2 on one processor, w2 forced before r (T, or PO on r's own
      // processor): w1 can never be the latest write r sees.
      struct Triple { AnnotatedOp *w1, *w2, *r; };
      std::vector<Triple> sites;
      for (AnnotatedOp* r : ops) {
        if (!r->op.is_read()) continue;
        for (AnnotatedOp* w2 : ops) {
          if (!w2->op.is_write() || w2->op.addr != r->op.addr) continue;
          bool forced = end_of(*w2) < start_of(*r) ||
                        (w2->op.proc == r->op.proc && w2->op.idx < r->op.idx);
          if (!forced) continue;
          for (AnnotatedOp* w1 : ops) {
            if (!w1->op.is_write() || w1->op.addr != r->op.addr) continue;
            if (w1->op.proc == w2->op.proc && w1->op.idx < w2->op.idx) {
              sites.push_back({w1, w2, r});
            }
          }
        }
      }
      if (sites.empty()) {
        throw TraceTooSmall("no lost-write site: need same-processor writes "
                            "w1 ->PO w2 with w2 forced before a read");
      }
      Triple site = sites[rng.bounded(sites.size())];
      site.r->op.value = site.w1->op.value;
      desc.op_ids = {site.w1->op.id, site.w2->op.id, site.r->op.id};
      break;
    }
    case FaultKind::kReorderPo: {
      // Adjacent same-processor (read, write) on one address: swap their time
      // bundles so the write performs first, and let the read return its
      // value. Program order forbids it in every linearization.
      struct Pair { AnnotatedOp *r, *w; };
      std::vector<Pair> sites;
      for (auto& group : mutated.procs) {
        for (std::size_t i = 0; i + 1 < group.size(); ++i) {
          AnnotatedOp& a = group[i];
          AnnotatedOp& b = group[i + 1];
          if (a.op.is_read() && b.op.is_write() && a.op.addr == b.op.addr) {
            sites.push_back({&a, &b});
          }
        }
      }
      if (sites.empty()) {
        throw TraceTooSmall("no reorder-po site: need an adjacent "
                            "same-processor read/write pair on one address");
      }
      Pair site = sites[rng.bounded(sites.size())];
      std::swap(site.r->performed, site.w->performed);
      std::swap(site.r->op.start, site.w->op.start);
      std::swap(site.r->op.end, site.w->op.end);
      site.r->op.value = site.w->op.value;
      desc.op_ids = {site.r->op.id, site.w->op.id};
      break;
    }
    case FaultKind::kBadPeriod: {
      std::vector<AnnotatedOp*> sites;
      for (AnnotatedOp* a : ops) {
        if (start_of(*a) < a->performed || a->performed < end_of(*a)) {
          sites.push_back(a);
        }
      }
      if (sites.empty()) {
        throw TraceTooSmall("no bad-period site: every pending period is a "
                            "single tick");
      }
      AnnotatedOp* a = sites[rng.bounded(sites.size())];
      if (a->performed < end_of(*a)) {
        a->op.start = a->performed + 1;  // period now starts after t_p
      } else {
        a->op.end = a->performed - 1;  // start < t_p here, so start <= end
      }
      desc.op_ids = {a->op.id};
      break;
    }
  }
  return {std::move(mutated), std::move(desc)};
}

std::vector<OpId> check_period_legality(const AnnotatedTrace& truth,
                                        const AssignedTrace& assigned) {
  std::vector<OpId> flagged;
  for (std::size_t f = 0; f < assigned.op_count(); ++f) {
    const AnnotatedOp* a = truth.find(assigned.op(f).id);
    if (a == nullptr) continue;
    const Period& period = assigned.period(f);
    if (a->performed < period.start || period.end < a->performed) {
      flagged.push_back(assigned.op(f).id);
    }
  }
  std::sort(flagged.begin(), flagged.end());
  return flagged;
}

std::string serialize_truth(const AnnotatedTrace& tr) {
  ordered_json hdr;
  hdr["format"] = "ppa-truth";
  hdr["version"] = 1;
  hdr["procs"] = tr.num_procs;
  std::string out = hdr.dump();
  out.push_back('\n');
  for (const auto& group : tr.procs) {
    for (const AnnotatedOp& a : group) {
      ordered_json rec;
      rec["id"] = a.op.id;
      rec["proc"] = a.op.proc;
      rec["idx"] = a.op.idx;
      rec["kind"] = a.op.is_write() ? "W" : "R";
      rec["addr"] = a.op.addr;
      rec["value"] = a.op.value;
      rec["start"] = *a.op.start;
      rec["end"] = *a.op.end;
      rec["performed"] = a.performed;
      out += rec.dump();
      out.push_back('\n');
    }
  }
  return out;
}

AnnotatedTrace parse_truth(std::string_view text) {
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
  if (lines.empty()) throw ParseError(1, "missing header line");

  AnnotatedTrace tr;
  std::size_t lineno = 0;
  for (const std::string& line : lines) {
    ++lineno;
    ordered_json rec = ordered_json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw ParseError(lineno, "malformed record");
    }
    if (lineno == 1) {
      if (!rec.contains("format") || rec["format"] != "ppa-truth") {
        throw ParseError(lineno, "missing or wrong header format");
      }
      tr.num_procs = rec.at("procs").get<std::uint32_t>();
      tr.procs.resize(tr.num_procs);
      continue;
    }
    AnnotatedOp a;
    a.op.id = rec.at("id").get<OpId>();
    a.op.proc = rec.at("proc").get<std::uint32_t>();
    a.op.idx = rec.at("idx").get<std::uint32_t>();
    std::string k = rec.at("kind").get<std::string>();
    if (k != "R" && k != "W") throw ParseError(lineno, "bad kind");
    a.op.kind = k == "W" ? Kind::kWrite : Kind::kRead;
    a.op.addr = rec.at("addr").get<std::uint64_t>();
    a.op.value = rec.at("value").get<std::uint64_t>();
    a.op.start = rec.at("start").get<Tick>();
    a.op.end = rec.at("end").get<Tick>();
    a.performed = rec.at("performed").get<Tick>();
    if (a.op.proc >= tr.num_procs) throw ParseError(lineno, "proc out of range");
    tr.procs[a.op.proc].push_back(std::move(a));
  }
  for (auto& group : tr.procs) {
    std::sort(group.begin(), group.end(),
              [](const AnnotatedOp& x, const AnnotatedOp& y) {
                return x.op.idx < y.op.idx;
              });
  }
  return tr;
}

}  // namespace ppa
