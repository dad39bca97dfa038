#pragma once

#include <vector>

#include "nlk/config.hpp"
#include "nlk/grid.hpp"

namespace nlk {

/// Initial phases on `grid`:
///  - constant:    theta = offset
///  - smooth:      sin(2 pi x_1) rescaled to diameter M, plus offset
///  - random:      seeded uniform sample rescaled to span exactly [-M/2, M/2], plus offset
///  - two_cluster: +M/2 on the left half of the first axis, -M/2 on the right, plus offset
std::vector<double> make_initial_condition(const Grid& grid, const InitialConfig& initial);

}  // namespace nlk
