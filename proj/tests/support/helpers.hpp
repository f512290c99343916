#pragma once

// Shared test scaffolding: compact trace builders, the independent
// (materialized-edge) cycle oracle, witness replay validation, and random
// instance generators for property tests.

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppa/frontier.hpp"
#include "ppa/order_graph.hpp"
#include "ppa/pending.hpp"
#include "ppa/rng.hpp"
#include "ppa/trace.hpp"

namespace ppa::test {

struct OpSpec {
  std::uint32_t proc;
  char kind;  // 'R' or 'W'
  std::uint64_t addr;
  std::uint64_t value;
  std::optional<Tick> start;
  std::optional<Tick> end;
};

// Ids are assigned in listing order; idx per processor in listing order.
inline Trace make_trace(std::uint32_t procs, const std::vector<OpSpec>& specs) {
  std::vector<Operation> ops;
  std::vector<std::uint32_t> next_idx(procs, 0);
  OpId id = 0;
  for (const OpSpec& s : specs) {
    Operation op;
    op.id = id++;
    op.proc = s.proc;
    op.idx = next_idx.at(s.proc)++;
    op.kind = s.kind == 'W' ? Kind::kWrite : Kind::kRead;
    op.addr = s.addr;
    op.value = s.value;
    op.start = s.start;
    op.end = s.end;
    ops.push_back(std::move(op));
  }
  return Trace(procs, std::move(ops));
}

inline AssignedTrace make_assigned(std::uint32_t procs,
                                   const std::vector<OpSpec>& specs) {
  return assign_pending_periods(make_trace(procs, specs));
}

// Brute-force overlap set: the definitional O(n^2) scan.
inline std::vector<std::size_t> brute_overlap_set(const AssignedTrace& at,
                                                  std::size_t u) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < at.op_count(); ++v) {
    if (v == u) continue;
    if (!at.physically_before(u, v) && !at.physically_before(v, u)) {
      out.push_back(v);
    }
  }
  return out;
}

inline std::size_t brute_measure_C(const AssignedTrace& at) {
  std::size_t best = 0;
  for (std::size_t u = 0; u < at.op_count(); ++u) {
    std::vector<std::size_t> counts(at.trace().num_procs(), 0);
    for (std::size_t v : brute_overlap_set(at, u)) {
      ++counts[at.op(v).proc];
    }
    for (std::size_t c : counts) best = std::max(best, c);
  }
  return best;
}

// Independent acyclicity oracle: materializes every PO, E and T edge and runs
// a colored DFS. This is the global detector the checking rules are tested
// against, so it must not share code with TGOGraph.
inline bool global_has_cycle(const TGOGraph& g) {
  const AssignedTrace& at = g.assigned();
  const std::size_t n = at.op_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::uint32_t p = 0; p < at.trace().num_procs(); ++p) {
    const auto& group = at.trace().proc_ops(p);
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      adj[at.trace().flat_index(p, i)].push_back(at.trace().flat_index(p, i + 1));
    }
  }
  for (const ExecEdge& e : g.exec_edges()) adj[e.from].push_back(e.to);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && at.period(u).end < at.period(v).start) {
        adj[u].push_back(v);
      }
    }
  }
  std::vector<int> color(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    stack.push_back({root, 0});
    color[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < adj[node].size()) {
        std::size_t to = adj[node][next++];
        if (color[to] == 1) return true;
        if (color[to] == 0) {
          color[to] = 1;
          stack.push_back({to, 0});
        }
      } else {
        color[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

// GO reachability over PO and E edges only (no T), for the consistency
// theorem check.
inline bool go_reaches(const TGOGraph& g, std::size_t from, std::size_t to) {
  const AssignedTrace& at = g.assigned();
  std::vector<char> seen(at.op_count(), 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    std::vector<std::size_t> nbrs;
    const Operation& o = at.op(x);
    std::size_t pos = x - at.trace().flat_index(o.proc, 0);
    if (pos + 1 < at.trace().proc_ops(o.proc).size()) {
      nbrs.push_back(at.trace().flat_index(o.proc, pos + 1));
    }
    for (const ExecEdge& e : g.exec_out(x)) nbrs.push_back(e.to);
    for (std::size_t z : nbrs) {
      if (z == to) return true;
      if (!seen[z]) {
        seen[z] = 1;
        stack.push_back(z);
      }
    }
  }
  return false;
}

// Theorem 2 shape: no pair with v ->T u while u reaches v over PO/E edges.
inline bool consistency_theorem_holds(const TGOGraph& g) {
  const AssignedTrace& at = g.assigned();
  for (std::size_t u = 0; u < at.op_count(); ++u) {
    for (std::size_t v = 0; v < at.op_count(); ++v) {
      if (u == v || !at.physically_before(v, u)) continue;
      if (go_reaches(g, u, v)) return false;
    }
  }
  return true;
}

struct ReplayResult {
  bool ok = true;
  std::string why;
};

// Checks a PASS witness end to end: a permutation of all ops that respects
// processor order and physical time order, with every read returning the
// latest prior write (or 0).
inline ReplayResult replay_witness(const AssignedTrace& at,
                                   const std::vector<OpId>& order) {
  ReplayResult res;
  if (order.size() != at.op_count()) {
    return {false, "witness has wrong length"};
  }
  std::vector<std::size_t> flats;
  std::vector<char> used(at.op_count(), 0);
  for (OpId id : order) {
    std::size_t f = at.trace().flat_of(id);
    if (used[f]) return {false, "op repeated in witness"};
    used[f] = 1;
    flats.push_back(f);
  }
  std::vector<std::uint32_t> next(at.trace().num_procs(), 0);
  std::unordered_map<std::uint64_t, std::uint64_t> mem;
  for (std::size_t i = 0; i < flats.size(); ++i) {
    const Operation& o = at.op(flats[i]);
    if (o.idx != next[o.proc]++) return {false, "processor order violated"};
    for (std::size_t j = i + 1; j < flats.size(); ++j) {
      if (at.physically_before(flats[j], flats[i])) {
        return {false, "physical time order violated"};
      }
    }
    if (o.is_write()) {
      mem[o.addr] = o.value;
    } else {
      auto it = mem.find(o.addr);
      std::uint64_t current = it == mem.end() ? 0 : it->second;
      if (o.value != current) return {false, "read value mismatch"};
    }
  }
  return res;
}

// Replays a witness's advance effects to rebuild the accepted TGO graph.
inline TGOGraph graph_from_witness(const AssignedTrace& at,
                                   const std::vector<OpId>& order) {
  TGOGraph g(at);
  std::unordered_map<std::uint64_t, std::size_t> last_write;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> readers;
  for (OpId id : order) {
    std::size_t f = at.trace().flat_of(id);
    const Operation& o = at.op(f);
    auto lw = last_write.find(o.addr);
    if (o.is_read()) {
      if (lw != last_write.end()) {
        g.add_exec_edge(lw->second, f, EdgeLabel::kSourcing);
      }
      readers[o.addr].push_back(f);
    } else {
      if (lw != last_write.end()) {
        g.add_exec_edge(lw->second, f, EdgeLabel::kCoherence);
      }
      for (std::size_t r : readers[o.addr]) {
        g.add_exec_edge(r, f, EdgeLabel::kReadBeforeNextWrite);
      }
      readers[o.addr].clear();
      last_write[o.addr] = f;
    }
  }
  return g;
}

// Random assigned trace whose periods are per-processor consistent (drawn
// around strictly increasing per-processor performed ticks).
inline AssignedTrace random_assigned(Rng& rng, std::uint32_t max_procs = 3,
                                     std::uint32_t max_ops_per_proc = 4,
                                     std::uint64_t max_addrs = 2,
                                     Tick max_halfwidth = 6) {
  std::uint32_t procs = 1 + static_cast<std::uint32_t>(rng.bounded(max_procs));
  std::vector<OpSpec> specs;
  for (std::uint32_t p = 0; p < procs; ++p) {
    std::uint32_t k =
        1 + static_cast<std::uint32_t>(rng.bounded(max_ops_per_proc));
    Tick t = rng.bounded(4);
    for (std::uint32_t i = 0; i < k; ++i) {
      t += 1 + rng.bounded(5);
      Tick a = rng.bounded(max_halfwidth + 1);
      Tick b = rng.bounded(max_halfwidth + 1);
      OpSpec s;
      s.proc = p;
      s.kind = rng.bounded(2) == 0 ? 'W' : 'R';
      s.addr = rng.bounded(max_addrs);
      s.value = rng.bounded(4);
      s.start = t >= a ? t - a : 0;
      s.end = t + b;
      specs.push_back(s);
    }
  }
  return make_assigned(procs, specs);
}

// Sprinkles random conflicting exec edges, in either direction, labels chosen
// to fit the endpoint kinds.
inline void add_random_exec_edges(TGOGraph& g, Rng& rng, std::size_t tries) {
  const AssignedTrace& at = g.assigned();
  const std::size_t n = at.op_count();
  if (n < 2) return;
  for (std::size_t t = 0; t < tries; ++t) {
    std::size_t a = rng.bounded(n);
    std::size_t b = rng.bounded(n);
    if (a == b) continue;
    const Operation& oa = at.op(a);
    const Operation& ob = at.op(b);
    if (oa.addr != ob.addr || (!oa.is_write() && !ob.is_write())) continue;
    EdgeLabel label;
    if (oa.is_write() && ob.is_write()) {
      label = EdgeLabel::kCoherence;
    } else if (oa.is_write()) {
      label = EdgeLabel::kSourcing;
    } else {
      label = EdgeLabel::kReadBeforeNextWrite;
    }
    g.add_exec_edge(a, b, label);
  }
}

}  // namespace ppa::test
