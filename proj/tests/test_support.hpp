#pragma once

// Shared fixtures for the test suite.

#include "perlab/per.hpp"
#include "perlab/universe.hpp"

#include <vector>

namespace perlab::testing {

// Six pers over the codes {0,1,2,3}: a diamond (L1, L2 between L0 and L3)
// inside a chain up to L5.  Used as the standard object set for checks that
// sweep ordered pairs.
inline std::vector<Per> standard_lattice() {
  std::vector<Per> l;
  l.push_back(empty_per());                                        // L0
  l.push_back(make_per({{Code(0)}}));                              // L1
  l.push_back(make_per({{Code(1)}}));                              // L2
  l.push_back(make_per({{Code(0)}, {Code(1)}}));                   // L3
  l.push_back(make_per({{Code(0), Code(1)}}));                     // L4
  l.push_back(make_per({{Code(0), Code(1)}, {Code(2), Code(3)}})); // L5
  return l;
}

inline BudgetPtr small_budget(std::uint64_t fuel_steps = 1000) {
  return make_budget(UniverseSpec::terms_up_to(1), fuel(fuel_steps));
}

}  // namespace perlab::testing
