#include "ppa/oracle.hpp"

#include <unordered_map>

namespace ppa {

namespace {

// Deliberately first-principles: candidate x (the next op of some processor)
// may come next iff no unappended op y has end(y) < start(x), checked by
// scanning every unappended op.
struct Enumerator {
  const AssignedTrace& at;
  const std::function<bool(const std::vector<std::size_t>&)>& visit;
  std::vector<std::uint32_t> counts;
  std::vector<std::size_t> order;
  bool stopped = false;

  bool eligible(std::size_t x) const {
    Tick sx = at.period(x).start;
    for (std::uint32_t p = 0; p < at.trace().num_procs(); ++p) {
      const auto& group = at.trace().proc_ops(p);
      for (std::size_t i = counts[p]; i < group.size(); ++i) {
        std::size_t y = at.trace().flat_index(p, i);
        if (y != x && at.period(y).end < sx) return false;
      }
    }
    return true;
  }

  void run() {
    if (order.size() == at.op_count()) {
      if (!visit(order)) stopped = true;
      return;
    }
    for (std::uint32_t p = 0; p < at.trace().num_procs() && !stopped; ++p) {
      if (counts[p] >= at.trace().proc_ops(p).size()) continue;
      std::size_t x = at.trace().flat_index(p, counts[p]);
      if (!eligible(x)) continue;
      ++counts[p];
      order.push_back(x);
      run();
      order.pop_back();
      --counts[p];
    }
  }
};

}  // namespace

void for_each_linearization(
    const AssignedTrace& at,
    const std::function<bool(const std::vector<std::size_t>&)>& visit,
    std::size_t cap) {
  if (at.op_count() > cap) throw OracleCapExceeded(at.op_count(), cap);
  Enumerator e{at, visit, std::vector<std::uint32_t>(at.trace().num_procs(), 0),
               {}};
  e.order.reserve(at.op_count());
  e.run();
}

std::vector<std::vector<OpId>> enumerate_linearizations(const AssignedTrace& at,
                                                        std::size_t cap) {
  std::vector<std::vector<OpId>> all;
  for_each_linearization(
      at,
      [&](const std::vector<std::size_t>& order) {
        std::vector<OpId> ids;
        ids.reserve(order.size());
        for (std::size_t f : order) ids.push_back(at.op(f).id);
        all.push_back(std::move(ids));
        return true;
      },
      cap);
  return all;
}

Verdict oracle_verify_sc(const AssignedTrace& at, std::size_t cap) {
  Verdict verdict;
  verdict.stats.measured_C = measure_C(at);
  std::uint64_t tried = 0;
  for_each_linearization(
      at,
      [&](const std::vector<std::size_t>& order) {
        ++tried;
        std::unordered_map<std::uint64_t, std::uint64_t> mem;
        for (std::size_t f : order) {
          const Operation& o = at.op(f);
          if (o.is_write()) {
            mem[o.addr] = o.value;
          } else {
            auto it = mem.find(o.addr);
            std::uint64_t current = it == mem.end() ? 0 : it->second;
            if (o.value != current) return true;  // next interleaving
          }
        }
        verdict.pass = true;
        for (std::size_t f : order) verdict.witness.push_back(at.op(f).id);
        return false;
      },
      cap);
  verdict.stats.edges_tried = tried;
  if (!verdict.pass) verdict.search_exhausted = true;
  return verdict;
}

OracleOrderTable oracle_order_table(const AssignedTrace& at, std::size_t cap) {
  OracleOrderTable table;
  std::size_t n = at.op_count();
  table.before.assign(n, std::vector<std::uint64_t>(n, 0));
  std::vector<std::size_t> pos(n, 0);
  for_each_linearization(
      at,
      [&](const std::vector<std::size_t>& order) {
        ++table.total;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            if (pos[a] < pos[b]) ++table.before[a][b];
          }
        }
        return true;
      },
      cap);
  return table;
}

bool oracle_mhb(const AssignedTrace& at, OpId u, OpId v, std::size_t cap) {
  std::size_t uf = at.trace().flat_of(u);
  std::size_t vf = at.trace().flat_of(v);
  bool always = true;
  for_each_linearization(
      at,
      [&](const std::vector<std::size_t>& order) {
        for (std::size_t f : order) {
          if (f == uf) return true;  // u first here
          if (f == vf) {
            always = false;
            return false;
          }
        }
        return true;
      },
      cap);
  return always;
}

bool oracle_chb(const AssignedTrace& at, OpId u, OpId v, std::size_t cap) {
  std::size_t uf = at.trace().flat_of(u);
  std::size_t vf = at.trace().flat_of(v);
  bool ever = false;
  for_each_linearization(
      at,
      [&](const std::vector<std::size_t>& order) {
        for (std::size_t f : order) {
          if (f == uf) {
            ever = true;
            return false;
          }
          if (f == vf) return true;
        }
        return true;
      },
      cap);
  return ever;
}

}  // namespace ppa
