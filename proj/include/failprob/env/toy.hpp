#pragma once

#include "failprob/scenario.hpp"

namespace failprob::env {

/// One-dimensional illustrative problem: s = x with a unit normal prior,
/// failure when |s| reaches the threshold. Margin = threshold - |s|.
Scenario make_toy_scenario(double threshold = 5.0);

}  // namespace failprob::env
