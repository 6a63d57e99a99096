#include "failprob/autodiff.hpp"

#include <algorithm>

namespace failprob::ad {

std::vector<double> Tape::replay_values() const {
  std::vector<double> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const double a = (n.op == Op::kInput || n.op == Op::kConst)
                         ? 0.0
                         : out[n.a];
    double v = 0.0;
    switch (n.op) {
      case Op::kInput:
      case Op::kConst:
        v = n.value;
        break;
      case Op::kAdd:
        v = a + out[n.b];
        break;
      case Op::kSub:
        v = a - out[n.b];
        break;
      case Op::kMul:
        v = a * out[n.b];
        break;
      case Op::kDiv:
        v = a / out[n.b];
        break;
      case Op::kNeg:
        v = -a;
        break;
      case Op::kExp:
        v = std::exp(a);
        break;
      case Op::kLog:
        v = std::log(a);
        break;
      case Op::kSqrt:
        v = std::sqrt(a);
        break;
      case Op::kSin:
        v = std::sin(a);
        break;
      case Op::kCos:
        v = std::cos(a);
        break;
      case Op::kTanh:
        v = std::tanh(a);
        break;
      case Op::kPow:
        v = std::pow(a, out[n.b]);
        break;
      case Op::kPowC:
        v = std::pow(a, n.aux0);
        break;
      case Op::kMin:
        v = std::min(a, out[n.b]);
        break;
      case Op::kMax:
        v = std::max(a, out[n.b]);
        break;
      case Op::kAbs:
        v = std::fabs(a);
        break;
      case Op::kClamp:
        v = std::clamp(a, n.aux0, n.aux1);
        break;
      case Op::kAddC:
        v = a + n.aux0;
        break;
      case Op::kMulC:
        v = a * n.aux0;
        break;
      case Op::kRsubC:
        v = n.aux0 - a;
        break;
      case Op::kRdivC:
        v = n.aux0 / a;
        break;
    }
    out[i] = v;
  }
  return out;
}

std::vector<double> gradient(Tape& tape, const Var& output,
                             std::span<const Var> inputs) {
  if (output.tape != &tape) {
    throw std::invalid_argument("ad: output does not belong to this tape");
  }
  auto& adj = tape.adjoint_;
  const std::size_t n = static_cast<std::size_t>(output.index) + 1;
  adj.assign(n, 0.0);
  adj[output.index] = 1.0;

  std::size_t visits = 0;
  const auto& nodes = tape.nodes_;
  for (std::size_t i = n; i-- > 0;) {
    ++visits;
    const double g = adj[i];
    if (g == 0.0) continue;
    const Node& node = nodes[i];
    switch (node.op) {
      case Op::kInput:
      case Op::kConst:
        break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv:
      case Op::kPow:
      case Op::kMin:
      case Op::kMax:
        adj[node.a] += g * node.da;
        adj[node.b] += g * node.db;
        break;
      default:  // unary and const-parameter ops
        adj[node.a] += g * node.da;
        break;
    }
  }
  tape.last_reverse_visits_ = visits;

  std::vector<double> out;
  out.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.tape != &tape) {
      throw std::invalid_argument("ad: input does not belong to this tape");
    }
    out.push_back(in.index < n ? adj[in.index] : 0.0);
  }
  return out;
}

}  // namespace failprob::ad
