#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "failprob/mlp.hpp"
#include "failprob/scenario.hpp"

namespace failprob::env {

/// Torque-controlled inverted pendulum. The failure threshold is the angle
/// where gravity torque equals the actuator limit, so beyond it the
/// controller cannot recover.
struct PendulumParams {
  double mgl = 4.17;      // m*g*l [N*m], l = 1 m, m = 0.425 kg, g = 9.81
  double inertia = 0.425; // m*l^2 [kg*m^2]
  double torque_max = 2.0;
  double sigma_n = 0.1;   // per-step torque disturbance std [N*m]
  double dt = 0.1;
  int horizon = 50;
  double theta_fail = 0.5;  // [rad]
  double theta0 = 0.0;
  double theta_dot0 = 0.0;
};

inline PendulumParams default_pendulum_params() { return {}; }

/// Saturated PD law standing in for a learned controller.
inline constexpr double kPendulumExpertKp = 15.0;  // N*m/rad
inline constexpr double kPendulumExpertKd = 3.0;   // N*m*s/rad

template <class S>
S expert_pendulum_torque(const S& theta, const S& theta_dot,
                         const PendulumParams& p) {
  using std::clamp;
  return clamp(theta * (-kPendulumExpertKp) + theta_dot * (-kPendulumExpertKd),
               -p.torque_max, p.torque_max);
}

/// One semi-implicit Euler update of (theta, theta_dot).
template <class S>
std::pair<S, S> pendulum_step(const S& theta, const S& theta_dot,
                              const S& torque_control,
                              const S& torque_disturbance,
                              const PendulumParams& p) {
  using std::sin;
  S accel = (p.mgl * sin(theta) + torque_control + torque_disturbance) *
            (1.0 / p.inertia);
  S theta_dot_next = theta_dot + accel * p.dt;
  S theta_next = theta + theta_dot_next * p.dt;
  return {theta_next, theta_dot_next};
}

template <class S>
struct PendulumSim {
  S margin;  // min over executed steps of theta_fail - |theta|
  int steps_executed = 0;
  std::vector<std::vector<double>> trace;
};

/// Full rollout. Stops as soon as the failure threshold is crossed; the
/// margin is a left fold of binary min so exactly one timestep receives the
/// subgradient.
template <class S, class Policy>
PendulumSim<S> simulate_pendulum(std::span<const S> x, const PendulumParams& p,
                                 Policy&& policy) {
  using std::abs;
  using std::min;
  PendulumSim<S> sim;
  S theta = x[0] * 0.0 + p.theta0;
  S theta_dot = x[0] * 0.0 + p.theta_dot0;
  bool first = true;
  for (int t = 0; t < p.horizon; ++t) {
    S torque = policy(theta, theta_dot);
    auto [th, thd] = pendulum_step(theta, theta_dot, torque, x[t], p);
    theta = th;
    theta_dot = thd;
    S step_margin = p.theta_fail - abs(theta);
    sim.margin = first ? step_margin : min(sim.margin, step_margin);
    first = false;
    sim.trace.push_back({value_of(theta), value_of(theta_dot)});
    sim.steps_executed = t + 1;
    if (value_of(sim.margin) <= 0.0) break;
  }
  return sim;
}

/// Scenario with an MLP controller (the default experimental setup).
Scenario make_pendulum_scenario(const PendulumParams& p, MlpPolicy policy);

/// Scenario driven directly by the saturated PD expert.
Scenario make_pendulum_scenario_expert(const PendulumParams& p);

/// Grid of (theta, theta_dot) states used to clone the expert.
std::vector<std::vector<double>> pendulum_training_states();

/// Behavior-cloned 2-32-32-1 tanh policy with torque bound applied through
/// torque_max * tanh(.). Deterministic; trained once per process.
const MlpPolicy& trained_pendulum_policy();

}  // namespace failprob::env
