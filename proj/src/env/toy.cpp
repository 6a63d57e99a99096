#include "failprob/env/toy.hpp"

#include <cmath>

namespace failprob::env {

Scenario make_toy_scenario(double threshold) {
  if (threshold <= 0.0) {
    throw std::invalid_argument("toy scenario: threshold must be positive");
  }
  Scenario s;
  s.name = "toy";
  s.dimension = 1;
  s.state_dim = 1;
  s.prior_sigma = {1.0};
  s.default_epsilon = 0.04;

  s.rollout = [threshold](std::span<const double> x) {
    Rollout r;
    r.states = {{x[0]}};
    r.steps_executed = 1;
    r.raw_margin = threshold - std::fabs(x[0]);
    r.distance = r.raw_margin > 0.0 ? r.raw_margin : 0.0;
    r.failed = r.raw_margin <= 0.0;
    r.log_prior = gaussian_logpdf0(x[0], 1.0);
    return r;
  };
  s.record_margin = [threshold](ad::Tape&, std::span<const ad::Var> x) {
    return threshold - ad::abs(x[0]);
  };
  return s;
}

}  // namespace failprob::env
