#include "ppa/frontier.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_set>

namespace ppa {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

struct FrontierHash {
  std::size_t operator()(const Frontier& f) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t c : f) h = hash_mix(h, c);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

AdvanceRules::AdvanceRules(const AssignedTrace& at) : at_(&at) {
  const Trace& t = at.trace();
  suffix_min_end_.resize(t.num_procs());
  for (std::uint32_t p = 0; p < t.num_procs(); ++p) {
    std::size_t k = t.proc_ops(p).size();
    auto& sme = suffix_min_end_[p];
    sme.assign(k + 1, kTickMax);
    for (std::size_t i = k; i-- > 0;) {
      sme[i] = std::min(sme[i + 1], at.period(t.flat_index(p, i)).end);
    }
  }
}

bool AdvanceRules::eligible(const Frontier& f, std::uint32_t proc) const {
  const Trace& t = at_->trace();
  std::size_t pos = f[proc];
  if (pos >= t.proc_ops(proc).size()) return false;
  Tick sx = at_->period(t.flat_index(proc, pos)).start;
  for (std::uint32_t q = 0; q < t.num_procs(); ++q) {
    std::size_t from = q == proc ? pos + 1 : f[q];
    if (suffix_min_end_[q][std::min(from, suffix_min_end_[q].size() - 1)] < sx) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> AdvanceRules::successors(const Frontier& f) const {
  const Trace& t = at_->trace();
  std::vector<std::size_t> ops;
  for (std::uint32_t p = 0; p < t.num_procs(); ++p) {
    if (eligible(f, p)) ops.push_back(t.flat_index(p, f[p]));
  }
  // Earliest deadline first, processor index as the tiebreak.
  std::sort(ops.begin(), ops.end(), [&](std::size_t a, std::size_t b) {
    Tick ea = at_->period(a).end, eb = at_->period(b).end;
    if (ea != eb) return ea < eb;
    return at_->op(a).proc < at_->op(b).proc;
  });
  return ops;
}

bool AdvanceRules::terminating(const Frontier& f) const {
  for (std::uint32_t p = 0; p < at_->trace().num_procs(); ++p) {
    if (f[p] != at_->trace().proc_ops(p).size()) return false;
  }
  return true;
}

std::vector<std::pair<std::size_t, Frontier>> feasible_successors(
    const AssignedTrace& at, const Frontier& f) {
  AdvanceRules rules(at);
  std::vector<std::pair<std::size_t, Frontier>> result;
  for (std::size_t op : rules.successors(f)) {
    Frontier succ = f;
    ++succ[at.op(op).proc];
    result.emplace_back(op, std::move(succ));
  }
  return result;
}

FrontierGraph::FrontierGraph(const AssignedTrace& at, std::size_t node_cap)
    : at_(&at) {
  AdvanceRules rules(at);
  std::unordered_map<Frontier, std::uint32_t, FrontierHash> ids;
  Frontier start(at.trace().num_procs(), 0);
  nodes_.push_back(start);
  out_.emplace_back();
  ids.emplace(std::move(start), 0);

  for (std::uint32_t head = 0; head < nodes_.size(); ++head) {
    Frontier f = nodes_[head];  // nodes_ may reallocate below
    for (std::size_t op : rules.successors(f)) {
      Frontier succ = f;
      ++succ[at.op(op).proc];
      auto [it, inserted] =
          ids.emplace(succ, static_cast<std::uint32_t>(nodes_.size()));
      if (inserted) {
        if (nodes_.size() >= node_cap) throw FrontierCapExceeded(node_cap);
        nodes_.push_back(std::move(succ));
        out_.emplace_back();
      }
      out_[head].push_back({it->second, op});
      ++edge_count_;
    }
  }

  Frontier terminating(at.trace().num_procs(), 0);
  for (std::uint32_t p = 0; p < at.trace().num_procs(); ++p) {
    terminating[p] = static_cast<std::uint32_t>(at.trace().proc_ops(p).size());
  }
  auto it = ids.find(terminating);
  if (it != ids.end()) end_node_ = it->second;
}

SearchState::SearchState(const AssignedTrace& at)
    : at_(&at),
      rules_(at),
      graph_(at),
      frontier_(at.trace().num_procs(), 0) {}

std::vector<RuleViolation> SearchState::advance(std::size_t op_flat) {
  const Operation& o = at_->op(op_flat);
  Undo undo;
  undo.op_flat = op_flat;
  undo.addr = o.addr;

  auto lw = last_write_.find(o.addr);
  if (o.is_read()) {
    std::uint64_t current =
        lw == last_write_.end() ? 0 : at_->op(lw->second).value;
    if (o.value != current) {
      // Read-value mismatch: the latest appended write has not propagated to
      // this read on this branch. Rule 1 shape; state unchanged.
      RuleViolation v{1, {o.id}};
      if (lw != last_write_.end()) v.witness.push_back(at_->op(lw->second).id);
      return {v};
    }
    if (lw != last_write_.end()) {
      graph_.add_exec_edge(lw->second, op_flat, EdgeLabel::kSourcing);
      undo.edges.push_back({lw->second, op_flat, EdgeLabel::kSourcing});
    }
    readers_[o.addr].push_back(op_flat);
  } else {
    undo.wrote = true;
    auto rd = readers_.find(o.addr);
    if (lw != last_write_.end()) {
      undo.saved_last_write = lw->second;
      graph_.add_exec_edge(lw->second, op_flat, EdgeLabel::kCoherence);
      undo.edges.push_back({lw->second, op_flat, EdgeLabel::kCoherence});
    }
    if (rd != readers_.end()) {
      for (std::size_t r : rd->second) {
        graph_.add_exec_edge(r, op_flat, EdgeLabel::kReadBeforeNextWrite);
        undo.edges.push_back({r, op_flat, EdgeLabel::kReadBeforeNextWrite});
      }
      undo.saved_readers = std::move(rd->second);
      rd->second.clear();
    }
    last_write_[o.addr] = op_flat;
  }

  // Incremental acyclicity check over the touched ops.
  std::vector<std::size_t> dirty{op_flat};
  for (const ExecEdge& e : undo.edges) dirty.push_back(e.from);
  std::vector<RuleViolation> violations = graph_.check_acyclic(dirty);
  if (!violations.empty()) {
    // Roll the effects back; the caller backtracks.
    for (std::size_t i = undo.edges.size(); i-- > 0;) {
      const ExecEdge& e = undo.edges[i];
      graph_.remove_exec_edge(e.from, e.to, e.label);
    }
    if (o.is_read()) {
      readers_[o.addr].pop_back();
    } else {
      if (undo.saved_last_write) {
        last_write_[o.addr] = *undo.saved_last_write;
      } else {
        last_write_.erase(o.addr);
      }
      if (!undo.saved_readers.empty()) {
        readers_[o.addr] = std::move(undo.saved_readers);
      }
    }
    return violations;
  }

  ++frontier_[o.proc];
  lin_.push_back(op_flat);
  undo_stack_.push_back(std::move(undo));
  return {};
}

std::size_t SearchState::backtrack() {
  Undo undo = std::move(undo_stack_.back());
  undo_stack_.pop_back();
  const Operation& o = at_->op(undo.op_flat);

  lin_.pop_back();
  --frontier_[o.proc];
  for (std::size_t i = undo.edges.size(); i-- > 0;) {
    const ExecEdge& e = undo.edges[i];
    graph_.remove_exec_edge(e.from, e.to, e.label);
  }
  if (o.is_read()) {
    readers_[o.addr].pop_back();
  } else {
    if (undo.saved_last_write) {
      last_write_[o.addr] = *undo.saved_last_write;
    } else {
      last_write_.erase(o.addr);
    }
    readers_[o.addr] = std::move(undo.saved_readers);
  }
  return undo.op_flat;
}

std::uint64_t SearchState::fingerprint() const {
  std::uint64_t h = 0x100001b3ULL;
  for (std::uint32_t c : frontier_) h = hash_mix(h, c);
  for (std::size_t f : lin_) h = hash_mix(h, f);
  std::vector<ExecEdge> edges = graph_.exec_edges();
  std::sort(edges.begin(), edges.end(), [](const ExecEdge& a, const ExecEdge& b) {
    return std::tie(a.from, a.to, a.label) < std::tie(b.from, b.to, b.label);
  });
  for (const ExecEdge& e : edges) {
    h = hash_mix(h, e.from);
    h = hash_mix(h, e.to);
    h = hash_mix(h, static_cast<std::uint64_t>(e.label));
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> lw(last_write_.begin(),
                                                        last_write_.end());
  std::sort(lw.begin(), lw.end());
  for (auto& [addr, op] : lw) {
    h = hash_mix(h, addr);
    h = hash_mix(h, op);
  }
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> rd(
      readers_.begin(), readers_.end());
  std::sort(rd.begin(), rd.end());
  for (auto& [addr, list] : rd) {
    if (list.empty()) continue;
    h = hash_mix(h, addr);
    for (std::size_t r : list) h = hash_mix(h, r);
  }
  return h;
}

std::uint64_t SearchState::memo_key() const {
  std::uint64_t h = 0x811c9dc5ULL;
  for (std::uint32_t c : frontier_) h = hash_mix(h, c);
  std::vector<std::pair<std::uint64_t, std::size_t>> lw(last_write_.begin(),
                                                        last_write_.end());
  std::sort(lw.begin(), lw.end());
  for (auto& [addr, op] : lw) {
    h = hash_mix(h, addr);
    h = hash_mix(h, op);
  }
  return h;
}

namespace {

void merge_unique(std::vector<RuleViolation>& into,
                  std::vector<RuleViolation> from) {
  for (RuleViolation& v : from) {
    if (std::find(into.begin(), into.end(), v) == into.end()) {
      into.push_back(std::move(v));
    }
  }
}

}  // namespace

Verdict verify_sc(const AssignedTrace& at, const VerifyOptions& opts) {
  Verdict verdict;
  verdict.stats.measured_C = measure_C(at);

  SearchState state(at);
  if (state.at_terminating_frontier()) {  // zero ops
    verdict.pass = true;
    return verdict;
  }

  struct Level {
    std::vector<std::size_t> candidates;
    std::size_t next = 0;
  };
  std::vector<Level> levels;
  levels.push_back({state.feasible_ops()});

  std::vector<RuleViolation> branch_violations;  // deduplicated samples
  constexpr std::size_t kMaxBranchSamples = 16;
  std::unordered_set<std::uint64_t> failed_states;

  for (;;) {
    Level& top = levels.back();
    if (top.next >= top.candidates.size()) {
      if (levels.size() == 1) {
        verdict.pass = false;
        verdict.search_exhausted = true;
        break;
      }
      if (opts.memoize_failures) failed_states.insert(state.memo_key());
      state.backtrack();
      ++verdict.stats.backtracks;
      levels.pop_back();
      continue;
    }
    std::size_t op = top.candidates[top.next++];
    ++verdict.stats.edges_tried;
    std::vector<RuleViolation> viols = state.advance(op);
    if (!viols.empty()) {
      if (branch_violations.size() < kMaxBranchSamples) {
        merge_unique(branch_violations, std::move(viols));
      }
      continue;
    }
    ++verdict.stats.nodes_visited;
    if (state.at_terminating_frontier()) {
      verdict.pass = true;
      for (std::size_t f : state.linearization()) {
        verdict.witness.push_back(at.op(f).id);
      }
      break;
    }
    if (opts.memoize_failures && failed_states.count(state.memo_key())) {
      state.backtrack();
      ++verdict.stats.backtracks;
      continue;
    }
    levels.push_back({state.feasible_ops()});
  }

  if (!verdict.pass) {
    // Certificate: structural PO/T cycles on the bare graph, impossible reads
    // from the trace's values, then any rule violations the search hit, with
    // sampled branch mismatches as the fallback.
    TGOGraph base(at);
    std::vector<RuleViolation> cert = base.check_acyclic();
    merge_unique(cert, diagnose_read_mapping(at));
    if (cert.empty()) merge_unique(cert, std::move(branch_violations));
    verdict.certificate = std::move(cert);
  }
  return verdict;
}

}  // namespace ppa
