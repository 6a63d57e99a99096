#include "failprob/mlp.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace failprob {

std::size_t MlpNetwork::param_count(std::span<const int> sizes) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    n += static_cast<std::size_t>(sizes[i]) * sizes[i + 1] + sizes[i + 1];
  }
  return n;
}

MlpNetwork MlpNetwork::random_init(std::vector<int> sizes, Rng& rng) {
  MlpNetwork net;
  net.layer_sizes = std::move(sizes);
  net.params.resize(param_count(net.layer_sizes));
  std::size_t off = 0;
  for (std::size_t i = 0; i + 1 < net.layer_sizes.size(); ++i) {
    const int nin = net.layer_sizes[i];
    const int nout = net.layer_sizes[i + 1];
    const double scale = std::sqrt(2.0 / (nin + nout));
    for (int j = 0; j < nin * nout; ++j) net.params[off++] = scale * rng.normal();
    for (int j = 0; j < nout; ++j) net.params[off++] = 0.0;
  }
  return net;
}

void save_mlp(const MlpNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mlp: cannot open " + path);
  out << "layers:";
  for (int s : net.layer_sizes) out << ' ' << s;
  out << '\n';
  char buf[64];
  for (double p : net.params) {
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    out << buf << '\n';
  }
}

MlpNetwork load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mlp: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "layers:") throw std::runtime_error("load_mlp: bad header");
  MlpNetwork net;
  int s = 0;
  while (hs >> s) net.layer_sizes.push_back(s);
  if (net.layer_sizes.size() < 2) throw std::runtime_error("load_mlp: bad sizes");
  const std::size_t count = MlpNetwork::param_count(net.layer_sizes);
  net.params.reserve(count);
  double v = 0.0;
  while (in >> v) net.params.push_back(v);
  if (net.params.size() != count) {
    throw std::runtime_error("load_mlp: parameter count mismatch");
  }
  return net;
}

CloneResult behavior_clone(
    MlpPolicy policy,
    const std::function<std::vector<double>(std::span<const double>)>& expert,
    const std::vector<std::vector<double>>& sample_states,
    const CloneConfig& cfg) {
  if (sample_states.empty()) {
    throw std::invalid_argument("behavior_clone: empty sample set");
  }
  const std::size_t n = sample_states.size();
  std::vector<std::vector<double>> targets;
  targets.reserve(n);
  for (const auto& s : sample_states) targets.push_back(expert(s));
  const std::size_t n_out = targets.front().size();

  auto mse_over = [&](const MlpPolicy& p, std::span<const std::size_t> idx) {
    double acc = 0.0;
    for (std::size_t i : idx) {
      auto a = p.act<double>(sample_states[i]);
      for (std::size_t j = 0; j < n_out; ++j) acc += ad::square(a[j] - targets[i][j]);
    }
    return acc / (static_cast<double>(idx.size()) * n_out);
  };

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  CloneResult result;
  result.initial_mse = mse_over(policy, all);

  const std::size_t np = policy.net.params.size();
  std::vector<double> m(np, 0.0), v(np, 0.0);
  const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
  Rng rng(cfg.seed);
  ad::Tape tape;
  tape.reserve(1 << 20);

  std::vector<std::size_t> order(all);
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our deterministic rng
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.uniform_index(i + 1)]);
    }
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      tape.reset();
      std::vector<ad::Var> pvars;
      pvars.reserve(np);
      for (double p : policy.net.params) pvars.push_back(tape.input(p));

      MlpPolicy staged = policy;  // transforms reused; params come from pvars
      ad::Var loss = tape.constant(0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& s = sample_states[order[k]];
        std::vector<double> scaled(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
          scaled[i] = s[i] / staged.input_scale[i];
        }
        auto raw = mlp_forward<double, ad::Var>(
            staged.net.layer_sizes, std::span<const ad::Var>(pvars),
            std::span<const double>(scaled));
        for (std::size_t j = 0; j < n_out; ++j) {
          ad::Var a = ad::tanh(raw[j]) * staged.out_gain[j] + staged.out_bias[j];
          loss = loss + ad::square(a - targets[order[k]][j]);
        }
      }
      loss = loss * (1.0 / (static_cast<double>(stop - start) * n_out));
      auto grad = ad::gradient(tape, loss, pvars);

      ++step;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
      for (std::size_t i = 0; i < np; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
        policy.net.params[i] -=
            cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam_eps);
      }
    }
    const double mse = mse_over(policy, all);
    if (result.initial_mse > 0.0 && mse > 10.0 * result.initial_mse) {
      result.final_mse = mse;
      result.diverged = true;
      result.policy = std::move(policy);
      return result;
    }
  }
  result.final_mse = mse_over(policy, all);
  result.policy = std::move(policy);
  return result;
}

}  // namespace failprob
