#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace failprob::ad {

/// Primitive operations recordable on a tape. Variants suffixed `C` take one
/// scalar parameter instead of a second tape operand.
enum class Op : std::uint8_t {
  kInput,
  kConst,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kExp,
  kLog,
  kSqrt,
  kSin,
  kCos,
  kTanh,
  kPow,    // a^b, both operands on tape
  kPowC,   // a^c
  kMin,
  kMax,
  kAbs,
  kClamp,  // clamp(a, lo, hi), bounds as parameters
  kAddC,
  kMulC,
  kRsubC,  // c - a
  kRdivC,  // c / a
};

struct Node {
  double value = 0.0;
  double da = 0.0;  // cached partial wrt operand a
  double db = 0.0;  // cached partial wrt operand b
  double aux0 = 0.0;
  double aux1 = 0.0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  Op op = Op::kConst;
};

class Tape;

/// Handle to one scalar node on a tape. Valid only for the tape that made it.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t index = 0;
  double value = 0.0;
};

inline double value_of(const Var& v) { return v.value; }
inline double value_of(double v) { return v; }

/// Append-only record of a scalar computation. Operand indices always refer
/// to earlier nodes, so a single reverse sweep propagates adjoints. Not
/// thread-safe; use one tape per thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void reserve(std::size_t n) { nodes_.reserve(n); }

  /// Drops all nodes, keeping allocated capacity for the next recording.
  void reset() { nodes_.clear(); }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::uint32_t i) const { return nodes_[i]; }

  Var input(double value) {
    Node n;
    n.value = value;
    n.op = Op::kInput;
    return append(n);
  }

  Var constant(double value) {
    Node n;
    n.value = value;
    n.op = Op::kConst;
    return append(n);
  }

  Var append(const Node& n) {
    const auto idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(n);
    return Var{this, idx, n.value};
  }

  /// Recomputes every node value from the recorded ops. Used to check that
  /// replaying a tape is bitwise identical to the original forward pass.
  std::vector<double> replay_values() const;

  /// Number of nodes visited by the most recent reverse sweep.
  std::size_t last_reverse_visits() const { return last_reverse_visits_; }

 private:
  friend std::vector<double> gradient(Tape& tape, const Var& output,
                                      std::span<const Var> inputs);
  std::vector<Node> nodes_;
  std::vector<double> adjoint_;  // scratch, reused across sweeps
  std::size_t last_reverse_visits_ = 0;
};

/// Reverse sweep: returns d(output)/d(input) for each input. The tape is not
/// modified (scratch adjoint storage aside), so further recording is fine.
std::vector<double> gradient(Tape& tape, const Var& output,
                             std::span<const Var> inputs);

namespace detail {

inline void check_same_tape(const Var& a, const Var& b) {
  if (a.tape != b.tape) {
    throw std::invalid_argument("ad: operands recorded on different tapes");
  }
}

inline Var binary(Op op, const Var& a, const Var& b, double value, double da,
                  double db) {
  check_same_tape(a, b);
  Node n;
  n.value = value;
  n.da = da;
  n.db = db;
  n.a = a.index;
  n.b = b.index;
  n.op = op;
  return a.tape->append(n);
}

inline Var unary(Op op, const Var& a, double value, double da, double aux0 = 0.0,
                 double aux1 = 0.0) {
  Node n;
  n.value = value;
  n.da = da;
  n.aux0 = aux0;
  n.aux1 = aux1;
  n.a = a.index;
  n.op = op;
  return a.tape->append(n);
}

}  // namespace detail

// -- arithmetic ---------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
  return detail::binary(Op::kAdd, a, b, a.value + b.value, 1.0, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
  return detail::binary(Op::kSub, a, b, a.value - b.value, 1.0, -1.0);
}
inline Var operator*(const Var& a, const Var& b) {
  return detail::binary(Op::kMul, a, b, a.value * b.value, b.value, a.value);
}
inline Var operator/(const Var& a, const Var& b) {
  if (b.value == 0.0) throw std::domain_error("ad: division by zero");
  const double inv = 1.0 / b.value;
  return detail::binary(Op::kDiv, a, b, a.value * inv, inv,
                        -a.value * inv * inv);
}
inline Var operator-(const Var& a) {
  return detail::unary(Op::kNeg, a, -a.value, -1.0);
}

inline Var operator+(const Var& a, double c) {
  return detail::unary(Op::kAddC, a, a.value + c, 1.0, c);
}
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) { return a + (-c); }
inline Var operator-(double c, const Var& a) {
  return detail::unary(Op::kRsubC, a, c - a.value, -1.0, c);
}
inline Var operator*(const Var& a, double c) {
  return detail::unary(Op::kMulC, a, a.value * c, c, c);
}
inline Var operator*(double c, const Var& a) { return a * c; }
inline Var operator/(const Var& a, double c) {
  if (c == 0.0) throw std::domain_error("ad: division by zero");
  return a * (1.0 / c);
}
inline Var operator/(double c, const Var& a) {
  if (a.value == 0.0) throw std::domain_error("ad: division by zero");
  const double inv = 1.0 / a.value;
  return detail::unary(Op::kRdivC, a, c * inv, -c * inv * inv, c);
}

// -- transcendental -----------------------------------------------------

inline Var exp(const Var& a) {
  const double e = std::exp(a.value);
  return detail::unary(Op::kExp, a, e, e);
}
inline Var log(const Var& a) {
  if (a.value <= 0.0) throw std::domain_error("ad: log of non-positive value");
  return detail::unary(Op::kLog, a, std::log(a.value), 1.0 / a.value);
}
inline Var sqrt(const Var& a) {
  if (a.value < 0.0) throw std::domain_error("ad: sqrt of negative value");
  const double s = std::sqrt(a.value);
  // derivative left 0 at a == 0; kink handled like the other clipped ops
  return detail::unary(Op::kSqrt, a, s, s > 0.0 ? 0.5 / s : 0.0);
}
inline Var sin(const Var& a) {
  return detail::unary(Op::kSin, a, std::sin(a.value), std::cos(a.value));
}
inline Var cos(const Var& a) {
  return detail::unary(Op::kCos, a, std::cos(a.value), -std::sin(a.value));
}
inline Var tanh(const Var& a) {
  const double t = std::tanh(a.value);
  return detail::unary(Op::kTanh, a, t, 1.0 - t * t);
}
inline Var pow(const Var& a, const Var& b) {
  if (a.value <= 0.0) {
    throw std::domain_error("ad: pow with non-positive base and tape exponent");
  }
  const double v = std::pow(a.value, b.value);
  return detail::binary(Op::kPow, a, b, v, b.value * v / a.value,
                        v * std::log(a.value));
}
inline Var pow(const Var& a, double c) {
  const double v = std::pow(a.value, c);
  return detail::unary(Op::kPowC, a, v, c * std::pow(a.value, c - 1.0), c);
}

// -- piecewise ops (one-sided subgradient convention) --------------------
//
// max/min route the derivative to the first operand on ties; abs'(0) = 0;
// clamp' is 1 strictly inside the bounds and 0 at or beyond them.

inline Var max(const Var& a, const Var& b) {
  const bool first = a.value >= b.value;
  return detail::binary(Op::kMax, a, b, first ? a.value : b.value,
                        first ? 1.0 : 0.0, first ? 0.0 : 1.0);
}
inline Var min(const Var& a, const Var& b) {
  const bool first = a.value <= b.value;
  return detail::binary(Op::kMin, a, b, first ? a.value : b.value,
                        first ? 1.0 : 0.0, first ? 0.0 : 1.0);
}
inline Var max(const Var& a, double c) { return max(a, a.tape->constant(c)); }
inline Var max(double c, const Var& a) { return max(a.tape->constant(c), a); }
inline Var min(const Var& a, double c) { return min(a, a.tape->constant(c)); }
inline Var min(double c, const Var& a) { return min(a.tape->constant(c), a); }
inline Var abs(const Var& a) {
  double d = 0.0;
  if (a.value > 0.0) d = 1.0;
  if (a.value < 0.0) d = -1.0;
  return detail::unary(Op::kAbs, a, std::fabs(a.value), d);
}
inline Var clamp(const Var& a, double lo, double hi) {
  double v = a.value;
  double d = 1.0;
  if (v <= lo) {
    v = lo;
    d = 0.0;
  } else if (v >= hi) {
    v = hi;
    d = 0.0;
  }
  return detail::unary(Op::kClamp, a, v, d, lo, hi);
}

inline Var square(const Var& a) { return a * a; }
inline double square(double a) { return a * a; }

}  // namespace failprob::ad
