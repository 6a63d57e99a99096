#include "failprob/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace failprob {

namespace {

void check_dim(const Scenario& s, std::span<const double> x) {
  if (static_cast<int>(x.size()) != s.dimension) {
    throw std::invalid_argument("scenario '" + s.name +
                                "': disturbance vector has wrong length");
  }
}

}  // namespace

double prior_logpdf(const Scenario& s, std::span<const double> x) {
  check_dim(s, x);
  double lp = 0.0;
  for (int i = 0; i < s.dimension; ++i) {
    const double sig = s.prior_sigma[i];
    lp += gaussian_logpdf0(x[i], sig * sig);
  }
  return lp;
}

void sample_prior(const Scenario& s, Rng& rng, std::span<double> out) {
  if (static_cast<int>(out.size()) != s.dimension) {
    throw std::invalid_argument("sample_prior: output span has wrong length");
  }
  for (int i = 0; i < s.dimension; ++i) out[i] = s.prior_sigma[i] * rng.normal();
}

double smoothed_log_posterior(const Scenario& s, const SmoothingConfig& cfg,
                              std::span<const double> x) {
  check_dim(s, x);
  const Rollout r = s.rollout(x);
  return gaussian_logpdf0(clipped_distance(r), cfg.epsilon) + r.log_prior;
}

bool is_failure(const Scenario& s, std::span<const double> x) {
  check_dim(s, x);
  return s.rollout(x).failed;
}

std::vector<double> grad_log_posterior(const Scenario& s,
                                       const SmoothingConfig& cfg,
                                       std::span<const double> x) {
  SmoothedPosterior post(s, cfg);
  std::vector<double> grad;
  post.value_and_grad(x, grad);
  return grad;
}

double SmoothedPosterior::value(std::span<const double> x) const {
  return smoothed_log_posterior(*scenario_, cfg_, x);
}

double SmoothedPosterior::value_and_grad(std::span<const double> x,
                                         std::vector<double>& grad) {
  check_dim(*scenario_, x);
  tape_.reset();
  std::vector<ad::Var> inputs;
  inputs.reserve(x.size());
  for (double xi : x) inputs.push_back(tape_.input(xi));

  ad::Var margin = scenario_->record_margin(tape_, inputs);
  ad::Var clipped = ad::max(margin, 0.0);

  constexpr double kLog2Pi = 1.8378770664093454836;
  const double inv2eps = 1.0 / (2.0 * cfg_.epsilon);
  ad::Var loglik = ad::square(clipped) * (-inv2eps) +
                   (-0.5 * (kLog2Pi + std::log(cfg_.epsilon)));

  ad::Var lp = tape_.constant(0.0);
  for (int i = 0; i < scenario_->dimension; ++i) {
    const double sig = scenario_->prior_sigma[i];
    lp = lp + (ad::square(inputs[i]) * (-1.0 / (2.0 * sig * sig)) +
               (-0.5 * (kLog2Pi + 2.0 * std::log(sig))));
  }
  ad::Var total = loglik + lp;
  grad = ad::gradient(tape_, total, inputs);
  return total.value;
}

}  // namespace failprob
