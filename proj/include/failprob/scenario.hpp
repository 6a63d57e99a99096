#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "failprob/autodiff.hpp"
#include "failprob/rng.hpp"

namespace failprob {

/// One simulated trajectory. `distance` is the margin to the failure set,
/// clipped at zero, so failed == (distance == 0). `raw_margin` keeps the
/// unclipped value (negative once the failure set is entered).
struct Rollout {
  std::vector<std::vector<double>> states;
  double distance = 0.0;
  double raw_margin = 0.0;
  double log_prior = 0.0;
  bool failed = false;
  int steps_executed = 0;
};

/// A validation problem: deterministic dynamics driven by a disturbance
/// vector of fixed dimension with a zero-mean diagonal Gaussian prior, plus a
/// scalar margin to the failure set. The same simulation is exposed twice:
/// once on plain doubles and once recorded on a tape for differentiation.
struct Scenario {
  std::string name;
  int dimension = 0;
  std::vector<double> prior_sigma;  // per-coordinate std dev

  std::function<Rollout(std::span<const double>)> rollout;
  /// Records the simulation and returns the unclipped margin.
  std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)> record_margin;

  /// Smoothing variance that works well for this scenario's margin units.
  double default_epsilon = 0.05;
  /// Labels for plotting/projection, e.g. trajectory coordinate names.
  int state_dim = 0;
};

/// Variance of the Gaussian standing in for the failure indicator.
struct SmoothingConfig {
  double epsilon = 0.05;
};

inline double clipped_distance(const Rollout& r) {
  return r.distance > 0.0 ? r.distance : 0.0;
}

/// log N(x | 0, variance)
inline double gaussian_logpdf0(double x, double variance) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (kLog2Pi + std::log(variance)) - x * x / (2.0 * variance);
}

double prior_logpdf(const Scenario& s, std::span<const double> x);
void sample_prior(const Scenario& s, Rng& rng, std::span<double> out);

double smoothed_log_posterior(const Scenario& s, const SmoothingConfig& cfg,
                              std::span<const double> x);

bool is_failure(const Scenario& s, std::span<const double> x);

/// Gradient of the smoothed log-posterior wrt every coordinate of x,
/// obtained by recording the full rollout on a fresh tape.
std::vector<double> grad_log_posterior(const Scenario& s,
                                       const SmoothingConfig& cfg,
                                       std::span<const double> x);

/// Reusable evaluator holding its own tape, one instance per thread/chain.
class SmoothedPosterior {
 public:
  SmoothedPosterior(const Scenario& s, SmoothingConfig cfg)
      : scenario_(&s), cfg_(cfg) {
    tape_.reserve(1 << 16);
  }

  const Scenario& scenario() const { return *scenario_; }
  const SmoothingConfig& config() const { return cfg_; }

  double value(std::span<const double> x) const;

  /// Evaluates value and gradient in one recorded pass.
  double value_and_grad(std::span<const double> x, std::vector<double>& grad);

  std::size_t last_tape_size() const { return tape_.size(); }

 private:
  const Scenario* scenario_;
  SmoothingConfig cfg_;
  ad::Tape tape_;
};

}  // namespace failprob
