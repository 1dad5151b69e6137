#pragma once

#include <vector>

namespace stochmatch {

struct Arrival {
  double time = 0.0;  // in [0, 1]
  int type = 0;
};

/// One realization of the arrival process, sorted by time.
using ArrivalSequence = std::vector<Arrival>;

}  // namespace stochmatch
