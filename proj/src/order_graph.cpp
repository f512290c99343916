#include "ppa/order_graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace ppa {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

}  // namespace

TGOGraph::TGOGraph(const AssignedTrace& at)
    : at_(&at), index_(at), out_(at.op_count()) {}

bool TGOGraph::conflicting(std::size_t a, std::size_t b) const {
  if (a == b) return false;
  const Operation& oa = op(a);
  const Operation& ob = op(b);
  return oa.addr == ob.addr && (oa.is_write() || ob.is_write());
}

void TGOGraph::add_exec_edge(std::size_t from, std::size_t to,
                             EdgeLabel label) {
  if (!conflicting(from, to)) {
    throw std::invalid_argument(
        "execution-order edge endpoints must conflict (same address, at "
        "least one write)");
  }
  out_[from].push_back({from, to, label});
  ++edge_count_;
}

void TGOGraph::remove_exec_edge(std::size_t from, std::size_t to,
                                EdgeLabel label) {
  auto& edges = out_.at(from);
  ExecEdge needle{from, to, label};
  // Last-added first: matches the search engine's stack discipline.
  for (std::size_t i = edges.size(); i-- > 0;) {
    if (edges[i] == needle) {
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(i));
      --edge_count_;
      return;
    }
  }
  throw std::invalid_argument("removing absent execution-order edge");
}

std::vector<ExecEdge> TGOGraph::exec_edges() const {
  std::vector<ExecEdge> all;
  all.reserve(edge_count_);
  for (const auto& edges : out_) {
    all.insert(all.end(), edges.begin(), edges.end());
  }
  return all;
}

// PO successor + exec targets, sorted and deduplicated.
static std::vector<std::size_t> go_neighbors(const AssignedTrace& at,
                                             const std::vector<ExecEdge>& out,
                                             std::size_t u) {
  std::vector<std::size_t> nbrs;
  const Operation& o = at.op(u);
  const auto& group = at.trace().proc_ops(o.proc);
  // u's position within its group equals u - flat_index(proc, 0).
  std::size_t pos = u - at.trace().flat_index(o.proc, 0);
  if (pos + 1 < group.size()) {
    nbrs.push_back(at.trace().flat_index(o.proc, pos + 1));
  }
  for (const ExecEdge& e : out) nbrs.push_back(e.to);
  std::sort(nbrs.begin(), nbrs.end());
  nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  return nbrs;
}

std::vector<RuleViolation> TGOGraph::check_rule1(std::size_t u) const {
  std::vector<RuleViolation> out;
  std::set<std::size_t> seen;
  for (const ExecEdge& e : out_.at(u)) {
    if (at_->physically_before(e.to, u) && seen.insert(e.to).second) {
      out.push_back({1, {op(u).id, op(e.to).id}});
    }
  }
  // The direct processor-order successor closes the same 2-cycle shape when
  // the trace's periods are inconsistent with processor order.
  const Operation& o = op(u);
  const auto& group = at_->trace().proc_ops(o.proc);
  std::size_t pos = u - at_->trace().flat_index(o.proc, 0);
  if (pos + 1 < group.size()) {
    std::size_t v = at_->trace().flat_index(o.proc, pos + 1);
    if (at_->physically_before(v, u) && !seen.count(v)) {
      out.push_back({1, {op(u).id, op(v).id}});
    }
  }
  return out;
}

std::vector<RuleViolation> TGOGraph::check_rule2(std::size_t u,
                                                 RuleCheckStats* stats) const {
  std::vector<RuleViolation> found;
  std::vector<std::size_t> window = index_.overlap_set_flat(u);
  if (window.empty()) {
    if (stats) stats->expanded = 0;
    return found;
  }
  std::vector<char> in_window(at_->op_count(), 0);
  for (std::size_t w : window) in_window[w] = 1;

  // BFS from u over PO/E edges expanding only window ops. Any reached op
  // physically before u closes a cycle back through u; the first hop is the
  // rule's v'. Direct edges from u to a T-predecessor are rule 1's case.
  std::vector<std::size_t> first_hop(at_->op_count(), kNone);
  std::deque<std::size_t> queue;
  std::size_t expanded = 0;
  for (std::size_t x : go_neighbors(*at_, out_.at(u), u)) {
    if (in_window[x] && first_hop[x] == kNone) {
      first_hop[x] = x;
      queue.push_back(x);
    }
  }
  std::set<std::size_t> reported;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    ++expanded;
    for (std::size_t z : go_neighbors(*at_, out_.at(x), x)) {
      if (at_->physically_before(z, u)) {
        if (reported.insert(z).second) {
          found.push_back(
              {2, {op(u).id, op(first_hop[x]).id, op(z).id}});
        }
      } else if (in_window[z] && first_hop[z] == kNone) {
        first_hop[z] = first_hop[x];
        queue.push_back(z);
      }
    }
  }
  if (stats) stats->expanded = expanded;
  return found;
}

std::vector<RuleViolation> TGOGraph::check_rule3(std::size_t u,
                                                 RuleCheckStats* stats) const {
  std::vector<RuleViolation> found;
  std::vector<std::size_t> window = index_.overlap_set_flat(u);
  std::vector<char> in_window(at_->op_count(), 0);
  for (std::size_t w : window) in_window[w] = 1;

  // Shortest PO/E cycle through u with every member overlapping u, by BFS.
  std::vector<std::size_t> parent(at_->op_count(), kNone);
  std::deque<std::size_t> queue;
  std::size_t expanded = 0;
  for (std::size_t x : go_neighbors(*at_, out_.at(u), u)) {
    if (x == u) continue;  // self edges cannot exist
    if (in_window[x] && parent[x] == kNone) {
      parent[x] = u;
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    ++expanded;
    for (std::size_t z : go_neighbors(*at_, out_.at(x), x)) {
      if (z == u) {
        std::vector<std::size_t> cycle;
        for (std::size_t cur = x; cur != u; cur = parent[cur]) {
          cycle.push_back(cur);
        }
        RuleViolation v{3, {op(u).id}};
        for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) {
          v.witness.push_back(op(*it).id);
        }
        found.push_back(std::move(v));
        if (stats) stats->expanded = expanded;
        return found;
      }
      if (in_window[z] && parent[z] == kNone) {
        parent[z] = x;
        queue.push_back(z);
      }
    }
  }
  if (stats) stats->expanded = expanded;
  return found;
}

std::vector<RuleViolation> TGOGraph::check_rule1_id(OpId u) const {
  return check_rule1(at_->trace().flat_of(u));
}
std::vector<RuleViolation> TGOGraph::check_rule2_id(OpId u) const {
  return check_rule2(at_->trace().flat_of(u));
}
std::vector<RuleViolation> TGOGraph::check_rule3_id(OpId u) const {
  return check_rule3(at_->trace().flat_of(u));
}

std::vector<RuleViolation> TGOGraph::check_acyclic(
    std::span<const std::size_t> dirty) const {
  std::vector<RuleViolation> all;
  auto append = [&all](std::vector<RuleViolation> v) {
    all.insert(all.end(), std::make_move_iterator(v.begin()),
               std::make_move_iterator(v.end()));
  };
  for (std::size_t u : dirty) {
    append(check_rule1(u));
    append(check_rule2(u));
    append(check_rule3(u));
  }
  return all;
}

std::vector<RuleViolation> TGOGraph::check_acyclic() const {
  std::vector<std::size_t> all(at_->op_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return check_acyclic(all);
}

std::vector<RuleViolation> diagnose_read_mapping(const AssignedTrace& at) {
  std::vector<RuleViolation> out;

  // Writes grouped per address, flat order.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> writes;
  for (std::size_t i = 0; i < at.op_count(); ++i) {
    if (at.op(i).is_write()) writes[at.op(i).addr].push_back(i);
  }

  auto po_before = [&](std::size_t a, std::size_t b) {
    return at.op(a).proc == at.op(b).proc && at.op(a).idx < at.op(b).idx;
  };
  auto forced_before = [&](std::size_t a, std::size_t b) {
    return at.physically_before(a, b) || po_before(a, b);
  };

  for (std::size_t r = 0; r < at.op_count(); ++r) {
    const Operation& ro = at.op(r);
    if (!ro.is_read()) continue;
    auto wit = writes.find(ro.addr);
    const std::vector<std::size_t> empty;
    const std::vector<std::size_t>& ws =
        wit == writes.end() ? empty : wit->second;

    // Candidate sources: writes of the read's value, plus the initial state
    // when the value is 0. The read is impossible only if every candidate is.
    bool initial_candidate = ro.value == 0;
    std::vector<std::size_t> sources;
    for (std::size_t w : ws) {
      if (at.op(w).value == ro.value) sources.push_back(w);
    }
    if (sources.empty() && !initial_candidate) {
      // Value never written to this address.
      out.push_back({1, {ro.id}});
      continue;
    }

    // One impossibility pattern per candidate; the read is flagged only when
    // every candidate has one, and then all patterns go into the certificate
    // so every op implicated in killing a source is named.
    std::vector<RuleViolation> patterns;
    bool all_impossible = true;

    if (initial_candidate) {
      bool impossible = false;
      for (std::size_t w : ws) {
        if (forced_before(w, r)) {
          impossible = true;
          patterns.push_back({1, {ro.id, at.op(w).id}});
          break;
        }
      }
      if (!impossible) all_impossible = false;
    }
    for (std::size_t src : sources) {
      if (!all_impossible) break;
      bool impossible = false;
      if (forced_before(r, src)) {
        // Read from the future: r precedes its own source in every run.
        impossible = true;
        if (at.physically_before(r, src)) {
          patterns.push_back({1, {at.op(src).id, ro.id}});
        } else {
          patterns.push_back({3, {ro.id, at.op(src).id}});
        }
      } else {
        for (std::size_t w : ws) {
          if (w == src) continue;
          if (forced_before(src, w) && forced_before(w, r)) {
            impossible = true;
            patterns.push_back({1, {ro.id, at.op(w).id}});
            break;
          }
        }
      }
      if (!impossible) all_impossible = false;
    }

    if (all_impossible && !patterns.empty()) {
      constexpr std::size_t kMaxPatternsPerRead = 4;
      for (std::size_t i = 0;
           i < patterns.size() && i < kMaxPatternsPerRead; ++i) {
        if (std::find(out.begin(), out.end(), patterns[i]) == out.end()) {
          out.push_back(std::move(patterns[i]));
        }
      }
    }
  }
  return out;
}

}  // namespace ppa
