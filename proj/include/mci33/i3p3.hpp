#pragma once

#include "mci33/core.hpp"

namespace mci33 {

// The single-dose i3+3 rule: escalate when y/n is below the interval, stay
// when inside it, and above it stay only if removing one DLT would put the
// rate below the interval; otherwise de-escalate. Boundary ratios count as
// inside. Throws domain_error for n < 1 or y outside [0, n].
Decision decide(int n, int y, const EquivalenceInterval& ei);

}  // namespace mci33
