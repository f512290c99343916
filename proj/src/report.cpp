#include "ppa/report.hpp"

namespace ppa {

ordered_json violation_json(const RuleViolation& v) {
  ordered_json j;
  j["rule"] = v.rule;
  j["witness"] = v.witness;
  return j;
}

ordered_json verdict_report(const Verdict& v,
                            std::optional<std::uint64_t> elapsed_us) {
  ordered_json j;
  j["verdict"] = v.pass ? "PASS" : "FAIL";
  if (v.pass) {
    j["witness"] = v.witness;
  } else {
    ordered_json cert;
    cert["search_exhausted"] = v.search_exhausted;
    cert["violations"] = ordered_json::array();
    for (const RuleViolation& viol : v.certificate) {
      cert["violations"].push_back(violation_json(viol));
    }
    j["certificate"] = std::move(cert);
  }
  ordered_json stats;
  stats["nodes_visited"] = v.stats.nodes_visited;
  stats["edges_tried"] = v.stats.edges_tried;
  stats["backtracks"] = v.stats.backtracks;
  stats["measured_C"] = v.stats.measured_C;
  if (elapsed_us) stats["elapsed_ticks"] = *elapsed_us;
  j["stats"] = std::move(stats);
  return j;
}

ordered_json order_answer_report(const OrderAnswer& a) {
  ordered_json j;
  j["mhb"] = a.mhb;
  j["chb"] = a.chb;
  ordered_json witness;
  if (a.mhb) witness["mhb_cut_size"] = a.mhb_cut_size;
  if (a.chb) {
    ordered_json path = ordered_json::array();
    for (const Frontier& f : a.chb_path) path.push_back(f);
    witness["chb_path"] = std::move(path);
  }
  j["witness"] = std::move(witness);
  return j;
}

ordered_json validation_report_json(const ValidationReport& r) {
  ordered_json j;
  j["ok"] = r.ok();
  ordered_json issues = ordered_json::array();
  for (const ValidationIssue& issue : r.issues) {
    ordered_json ji;
    ji["code"] = issue.code;
    ji["message"] = issue.message;
    ji["ops"] = issue.ops;
    issues.push_back(std::move(ji));
  }
  j["issues"] = std::move(issues);
  return j;
}

ordered_json fault_descriptor_json(const FaultDescriptor& d) {
  ordered_json j;
  j["kind"] = fault_kind_name(d.kind);
  j["op_ids"] = d.op_ids;
  return j;
}

ordered_json stats_report(const AssignedTrace& at, const FrontierGraph& fg) {
  ordered_json j;
  std::size_t n = at.op_count();
  std::size_t p = at.trace().num_procs();
  std::size_t c = measure_C(at);
  j["n"] = n;
  j["p"] = p;
  j["measured_C"] = c;
  ordered_json hist = ordered_json::array();
  for (auto& [overlap, count] : overlap_histogram(at)) {
    hist.push_back(ordered_json::array({overlap, count}));
  }
  j["overlap_histogram"] = std::move(hist);
  j["frontier_nodes"] = fg.node_count();
  j["frontier_edges"] = fg.edge_count();
  // nodes <= n * (C+1)^(p-1) + 1, saturating to avoid overflow.
  long double bound = 1.0L;
  for (std::size_t i = 1; i < p; ++i) bound *= static_cast<long double>(c + 1);
  bound = bound * static_cast<long double>(n) + 1.0L;
  j["bound_check"] = static_cast<long double>(fg.node_count()) <= bound;
  return j;
}

}  // namespace ppa
