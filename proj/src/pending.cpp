#include "ppa/pending.hpp"

#include <algorithm>
#include <map>

namespace ppa {

AssignedTrace AssignedTrace::assign(Trace trace) {
  AssignedTrace at;
  at.trace_ = std::move(trace);
  const Trace& t = at.trace_;
  at.periods_.resize(t.op_count());
  at.prov_.resize(t.op_count());

  for (std::uint32_t p = 0; p < t.num_procs(); ++p) {
    const auto& group = t.proc_ops(p);
    const std::size_t n = group.size();
    if (n == 0) continue;

    // Nearest observed predecessor's start, scanning forward.
    std::vector<Tick> inherited_start(n);
    bool have = false;
    Tick cur = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (group[i].observed()) {
        cur = *group[i].start;
        have = true;
      } else if (!have) {
        throw std::invalid_argument(
            "op " + std::to_string(group[i].id) +
            " has no observed predecessor in processor order");
      }
      inherited_start[i] = cur;
    }
    // Nearest observed successor's end, scanning backward.
    std::vector<Tick> inherited_end(n);
    have = false;
    for (std::size_t i = n; i-- > 0;) {
      if (group[i].observed()) {
        cur = *group[i].end;
        have = true;
      } else if (!have) {
        throw std::invalid_argument(
            "op " + std::to_string(group[i].id) +
            " has no observed successor in processor order");
      }
      inherited_end[i] = cur;
    }

    for (std::size_t i = 0; i < n; ++i) {
      std::size_t flat = t.flat_index(p, i);
      if (group[i].observed()) {
        at.periods_[flat] = {*group[i].start, *group[i].end};
        at.prov_[flat] = Provenance::kObserved;
      } else {
        at.periods_[flat] = {inherited_start[i], inherited_end[i]};
        at.prov_[flat] = Provenance::kInferred;
      }
    }
  }
  return at;
}

bool physically_before(const AssignedTrace& at, OpId u, OpId v) {
  std::size_t uf = at.trace().flat_of(u);
  std::size_t vf = at.trace().flat_of(v);
  return at.physically_before(uf, vf);
}

OverlapIndex::OverlapIndex(const AssignedTrace& at) : at_(&at) {
  const Trace& t = at.trace();
  by_start_.resize(t.num_procs());
  prefix_max_end_.resize(t.num_procs());
  for (std::uint32_t p = 0; p < t.num_procs(); ++p) {
    auto& order = by_start_[p];
    order.resize(t.proc_ops(p).size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = t.flat_index(p, i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return at.period(a).start < at.period(b).start;
    });
    auto& pme = prefix_max_end_[p];
    pme.resize(order.size());
    Tick running = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      running = std::max(running, at.period(order[i]).end);
      pme[i] = running;
    }
  }
}

std::vector<std::size_t> OverlapIndex::query(std::uint32_t proc, Tick a,
                                             Tick b) const {
  const auto& order = by_start_.at(proc);
  const auto& pme = prefix_max_end_[proc];
  std::vector<std::size_t> hits;
  // Candidates have start <= b; among them keep end >= a. Walking the
  // start-sorted prefix backwards lets the running max-end prune the rest.
  std::size_t hi = std::upper_bound(order.begin(), order.end(), b,
                                    [&](Tick val, std::size_t op) {
                                      return val < at_->period(op).start;
                                    }) -
                   order.begin();
  for (std::size_t i = hi; i-- > 0;) {
    if (pme[i] < a) break;  // nothing to the left ends late enough
    if (at_->period(order[i]).end >= a) hits.push_back(order[i]);
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::vector<std::size_t> OverlapIndex::overlap_set_flat(
    std::size_t u_flat) const {
  const Period& pu = at_->period(u_flat);
  std::vector<std::size_t> result;
  for (std::uint32_t p = 0; p < at_->trace().num_procs(); ++p) {
    for (std::size_t v : query(p, pu.start, pu.end)) {
      if (v != u_flat) result.push_back(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<OpId> OverlapIndex::overlap_set(OpId u) const {
  std::size_t uf = at_->trace().flat_of(u);
  std::vector<OpId> ids;
  for (std::size_t v : overlap_set_flat(uf)) ids.push_back(at_->op(v).id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t measure_C(const AssignedTrace& at) {
  OverlapIndex index(at);
  std::size_t best = 0;
  for (std::size_t u = 0; u < at.op_count(); ++u) {
    const Period& pu = at.period(u);
    for (std::uint32_t p = 0; p < at.trace().num_procs(); ++p) {
      std::vector<std::size_t> hits = index.query(p, pu.start, pu.end);
      std::size_t count = hits.size();
      for (std::size_t v : hits) {
        if (v == u) --count;
      }
      best = std::max(best, count);
    }
  }
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> overlap_histogram(
    const AssignedTrace& at) {
  OverlapIndex index(at);
  std::map<std::size_t, std::size_t> buckets;
  for (std::size_t u = 0; u < at.op_count(); ++u) {
    buckets[index.overlap_set_flat(u).size()]++;
  }
  return {buckets.begin(), buckets.end()};
}

}  // namespace ppa
