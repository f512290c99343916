#include "ppa/event_order.hpp"

#include <algorithm>
#include <deque>

namespace ppa {

namespace {

constexpr std::uint32_t kNoNode = static_cast<std::uint32_t>(-1);

struct QueryOps {
  std::uint32_t u_proc, u_idx, v_proc, v_idx;
};

QueryOps resolve(const FrontierGraph& fg, OpId u, OpId v) {
  const Trace& t = fg.assigned().trace();
  const Operation& uo = t.op(t.flat_of(u));
  const Operation& vo = t.op(t.flat_of(v));
  if (uo.proc == vo.proc) {
    throw std::invalid_argument(
        "ordering query requires ops on distinct processors (same-processor "
        "order is program order)");
  }
  return {uo.proc, uo.idx, vo.proc, vo.idx};
}

// u appended, v not.
bool qualifying(const Frontier& f, const QueryOps& q) {
  return f[q.u_proc] > q.u_idx && f[q.v_proc] <= q.v_idx;
}

}  // namespace

std::vector<std::uint32_t> qualifying_frontiers(const FrontierGraph& fg,
                                                OpId u, OpId v) {
  QueryOps q = resolve(fg, u, v);
  std::vector<std::uint32_t> hits;
  for (std::uint32_t id = 0; id < fg.node_count(); ++id) {
    if (qualifying(fg.node(id), q)) hits.push_back(id);
  }
  return hits;
}

OrderAnswer order_query(const FrontierGraph& fg, OpId u, OpId v) {
  QueryOps q = resolve(fg, u, v);
  OrderAnswer ans;
  const std::size_t n = fg.node_count();
  if (!fg.end_node()) {
    // No complete candidate execution at all: MHB vacuously, CHB never.
    ans.mhb = true;
    ans.chb = false;
    return ans;
  }
  const std::uint32_t end = *fg.end_node();

  for (std::uint32_t id = 0; id < n; ++id) {
    if (qualifying(fg.node(id), q)) ++ans.mhb_cut_size;
  }

  // MHB: one forward pass that never enters the qualifying set; if it still
  // reaches the terminating frontier, some path avoids the cut.
  {
    std::vector<char> seen(n, 0);
    std::deque<std::uint32_t> queue;
    bool end_reachable = false;
    if (!qualifying(fg.node(fg.start_node()), q)) {
      seen[fg.start_node()] = 1;
      queue.push_back(fg.start_node());
    }
    while (!queue.empty() && !end_reachable) {
      std::uint32_t x = queue.front();
      queue.pop_front();
      ++ans.visited;
      if (x == end) {
        end_reachable = true;
        break;
      }
      for (const FrontierGraph::Edge& e : fg.out(x)) {
        if (!seen[e.to] && !qualifying(fg.node(e.to), q)) {
          seen[e.to] = 1;
          queue.push_back(e.to);
        }
      }
    }
    ans.mhb = !end_reachable;
  }

  // CHB: forward reachability from start and backward from end; any
  // qualifying frontier reachable both ways sits on a witness path.
  {
    std::vector<std::uint32_t> parent(n, kNoNode);  // start-side BFS tree
    std::vector<char> fwd(n, 0);
    std::deque<std::uint32_t> queue{fg.start_node()};
    fwd[fg.start_node()] = 1;
    while (!queue.empty()) {
      std::uint32_t x = queue.front();
      queue.pop_front();
      ++ans.visited;
      for (const FrontierGraph::Edge& e : fg.out(x)) {
        if (!fwd[e.to]) {
          fwd[e.to] = 1;
          parent[e.to] = x;
          queue.push_back(e.to);
        }
      }
    }
    // next_hop toward end over reversed edges.
    std::vector<std::uint32_t> next_hop(n, kNoNode);
    std::vector<std::vector<std::uint32_t>> rin(n);
    for (std::uint32_t x = 0; x < n; ++x) {
      for (const FrontierGraph::Edge& e : fg.out(x)) rin[e.to].push_back(x);
    }
    std::vector<char> bwd(n, 0);
    queue.assign(1, end);
    bwd[end] = 1;
    while (!queue.empty()) {
      std::uint32_t x = queue.front();
      queue.pop_front();
      ++ans.visited;
      for (std::uint32_t from : rin[x]) {
        if (!bwd[from]) {
          bwd[from] = 1;
          next_hop[from] = x;
          queue.push_back(from);
        }
      }
    }
    std::uint32_t witness_node = kNoNode;
    for (std::uint32_t id = 0; id < n && witness_node == kNoNode; ++id) {
      if (fwd[id] && bwd[id] && qualifying(fg.node(id), q)) witness_node = id;
    }
    ans.chb = witness_node != kNoNode;
    if (ans.chb) {
      std::vector<std::uint32_t> path;
      for (std::uint32_t x = witness_node; x != kNoNode; x = parent[x]) {
        path.push_back(x);
      }
      std::reverse(path.begin(), path.end());
      for (std::uint32_t x = witness_node; x != end; x = next_hop[x]) {
        path.push_back(next_hop[x]);
      }
      for (std::uint32_t x : path) ans.chb_path.push_back(fg.node(x));
    }
  }
  return ans;
}

bool must_happen_before(const FrontierGraph& fg, OpId u, OpId v) {
  return order_query(fg, u, v).mhb;
}

bool could_happen_before(const FrontierGraph& fg, OpId u, OpId v) {
  return order_query(fg, u, v).chb;
}

}  // namespace ppa
