#pragma once

#include <cstdint>
#include <vector>

#include "ppa/frontier.hpp"

namespace ppa {

/// Must/could happened-before answer. mhb implies chb. The witness is the
/// qualifying cut size for MHB and one start-to-end frontier path through the
/// qualifying set for CHB.
struct OrderAnswer {
  bool mhb = false;
  bool chb = false;
  std::size_t mhb_cut_size = 0;
  std::vector<Frontier> chb_path;
  std::size_t visited = 0;  // node visits spent, for the complexity bound
};

// Frontiers in which u has been appended and v has not. Throws
// std::invalid_argument for same-processor queries, std::out_of_range for
// unknown ids.
std::vector<std::uint32_t> qualifying_frontiers(const FrontierGraph& fg,
                                                OpId u, OpId v);

// True iff removing the qualifying set disconnects the starting frontier from
// the terminating one: u precedes v in every candidate execution.
bool must_happen_before(const FrontierGraph& fg, OpId u, OpId v);
// True iff some qualifying frontier lies on a start-to-end path: u precedes v
// in at least one candidate execution.
bool could_happen_before(const FrontierGraph& fg, OpId u, OpId v);

// Both relations plus witnesses in one pass pair.
OrderAnswer order_query(const FrontierGraph& fg, OpId u, OpId v);

}  // namespace ppa
