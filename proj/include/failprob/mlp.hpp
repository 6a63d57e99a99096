#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "failprob/autodiff.hpp"
#include "failprob/rng.hpp"

namespace failprob {

/// Fully connected network with tanh hidden activations and a linear output
/// layer. Parameters are stored flat, per layer: row-major weight matrix
/// (out x in) followed by the bias vector.
struct MlpNetwork {
  std::vector<int> layer_sizes;
  std::vector<double> params;

  static std::size_t param_count(std::span<const int> sizes);

  /// Xavier-style random init, deterministic for a given rng state.
  static MlpNetwork random_init(std::vector<int> sizes, Rng& rng);
};

void save_mlp(const MlpNetwork& net, const std::string& path);
MlpNetwork load_mlp(const std::string& path);

namespace detail {

template <class S, class P>
using MlpScalar = decltype(std::declval<P>() * std::declval<S>());

}  // namespace detail

/// Forward pass generic over the data scalar S and parameter scalar P, so the
/// same code serves plain evaluation, rollout recording (S = Var), and
/// training (P = Var).
template <class S, class P>
std::vector<detail::MlpScalar<S, P>> mlp_forward(std::span<const int> sizes,
                                                 std::span<const P> params,
                                                 std::span<const S> input) {
  using R = detail::MlpScalar<S, P>;
  if (static_cast<int>(input.size()) != sizes.front()) {
    throw std::invalid_argument("mlp_forward: input size mismatch");
  }
  using std::tanh;

  std::vector<R> acts;
  acts.reserve(input.size());
  std::size_t off = 0;
  // first layer consumes S-typed inputs
  {
    const int nin = sizes[0];
    const int nout = sizes[1];
    for (int j = 0; j < nout; ++j) {
      R acc = params[off + static_cast<std::size_t>(j) * nin] * input[0];
      for (int k = 1; k < nin; ++k) {
        acc = acc + params[off + static_cast<std::size_t>(j) * nin + k] * input[k];
      }
      acc = acc + params[off + static_cast<std::size_t>(nout) * nin + j];
      acts.push_back(sizes.size() > 2 ? tanh(acc) : acc);
    }
    off += static_cast<std::size_t>(nout) * nin + nout;
  }
  for (std::size_t layer = 1; layer + 1 < sizes.size(); ++layer) {
    const int nin = sizes[layer];
    const int nout = sizes[layer + 1];
    const bool last = layer + 2 == sizes.size();
    std::vector<R> next;
    next.reserve(nout);
    for (int j = 0; j < nout; ++j) {
      R acc = params[off + static_cast<std::size_t>(j) * nin] * acts[0];
      for (int k = 1; k < nin; ++k) {
        acc = acc + params[off + static_cast<std::size_t>(j) * nin + k] * acts[k];
      }
      acc = acc + params[off + static_cast<std::size_t>(nout) * nin + j];
      next.push_back(last ? acc : tanh(acc));
    }
    acts = std::move(next);
    off += static_cast<std::size_t>(nout) * nin + nout;
  }
  return acts;
}

/// Network plus the fixed input/output transforms that turn raw outputs into
/// bounded actions: action_j = out_gain_j * tanh(raw_j) + out_bias_j.
struct MlpPolicy {
  MlpNetwork net;
  std::vector<double> input_scale;  // inputs divided by these before the net
  std::vector<double> out_gain;
  std::vector<double> out_bias;

  template <class S>
  std::vector<S> act(std::span<const S> state) const {
    using std::tanh;
    std::vector<S> scaled;
    scaled.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
      scaled.push_back(state[i] * (1.0 / input_scale[i]));
    }
    auto raw = mlp_forward<S, double>(net.layer_sizes, net.params,
                                      std::span<const S>(scaled));
    std::vector<S> out;
    out.reserve(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
      out.push_back(tanh(raw[j]) * out_gain[j] + out_bias[j]);
    }
    return out;
  }
};

struct CloneResult {
  MlpPolicy policy;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  bool diverged = false;  // true when MSE grew 10x over its starting value
};

struct CloneConfig {
  int epochs = 400;
  double learning_rate = 1e-2;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

/// Fits the policy's bounded outputs to expert actions on the sample states
/// by minibatch Adam on the mean squared error, with every gradient taken
/// from the recorded computation graph.
CloneResult behavior_clone(
    MlpPolicy policy,
    const std::function<std::vector<double>(std::span<const double>)>& expert,
    const std::vector<std::vector<double>>& sample_states,
    const CloneConfig& cfg);

}  // namespace failprob
