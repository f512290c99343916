#pragma once

#include <cstdint>
#include <optional>

#include "json.hpp"
#include "ppa/event_order.hpp"
#include "ppa/simulator.hpp"
#include "ppa/verdict.hpp"

namespace ppa {

using ordered_json = nlohmann::ordered_json;

// {"verdict":"PASS","witness":[...],"stats":{...}} or
// {"verdict":"FAIL","certificate":{"search_exhausted":...,"violations":[...]},
//  "stats":{...}}. elapsed_us is emitted only when present so default reports
// carry no wall-clock field.
ordered_json verdict_report(const Verdict& v,
                            std::optional<std::uint64_t> elapsed_us = {});

ordered_json violation_json(const RuleViolation& v);
ordered_json order_answer_report(const OrderAnswer& a);
ordered_json validation_report_json(const ValidationReport& r);
ordered_json fault_descriptor_json(const FaultDescriptor& d);

// {"n":...,"p":...,"measured_C":...,"overlap_histogram":[[k,count],...],
//  "frontier_nodes":...,"frontier_edges":...,"bound_check":...}
ordered_json stats_report(const AssignedTrace& at, const FrontierGraph& fg);

}  // namespace ppa
