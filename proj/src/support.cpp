#include "meteor/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meteor {

namespace {

void require_size(std::span<const double> a, const Graph& g) {
  require(a.size() == static_cast<std::size_t>(g.vertex_count()), ErrorKind::invalid_parameter,
          "vector length does not match the graph");
}

}  // namespace

std::vector<double> op_T(std::span<const double> a, Vertex y, const Graph& g) {
  require_size(a, g);
  std::vector<double> b(a.begin(), a.end());
  const double moved = a[static_cast<std::size_t>(y)];
  if (moved == 0.0) return b;
  const double share = moved / g.degree(y);
  b[static_cast<std::size_t>(y)] = 0.0;
  for (Vertex x : g.neighbors(y)) b[static_cast<std::size_t>(x)] += share;
  return b;
}

std::vector<double> op_R(std::span<const double> a, Vertex y, const Graph& g) {
  require_size(a, g);
  std::vector<double> b(a.begin(), a.end());
  double m = std::numeric_limits<double>::infinity();
  for (Vertex x : g.neighbors(y)) m = std::min(m, a[static_cast<std::size_t>(x)]);
  if (m == 0.0) return b;
  b[static_cast<std::size_t>(y)] += g.degree(y) * m;
  for (Vertex x : g.neighbors(y)) b[static_cast<std::size_t>(x)] -= m;
  return b;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::invalid_parameter, "length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

bool in_U(std::span<const double> a, const Graph& g, double tolerance) {
  if (a.size() != static_cast<std::size_t>(g.vertex_count())) return false;
  bool zero = false;
  double sum = 0.0;
  for (double x : a) {
    if (x < 0.0) return false;
    zero |= x == 0.0;
    sum += x;
  }
  return zero && std::abs(sum - static_cast<double>(a.size())) <= tolerance * static_cast<double>(a.size());
}

bool in_U_star(std::span<const double> a, const Graph& g, double tolerance) {
  if (!in_U(a, g, tolerance)) return false;
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    for (Vertex y : g.neighbors(x))
      if (a[static_cast<std::size_t>(x)] + a[static_cast<std::size_t>(y)] == 0.0) return false;
  return true;
}

ReverseSequence::ReverseSequence(const Graph& g, std::span<const double> target, double eps1)
    : g_(&g), target_(target.begin(), target.end()), eps1_(eps1) {
  require(in_U_star(target, g), ErrorKind::invalid_target, "target is not in U*");
  double min_positive = std::numeric_limits<double>::infinity();
  for (double x : target)
    if (x > 0.0) min_positive = std::min(min_positive, x);
  require(eps1 > 0.0 && eps1 < min_positive / 2, ErrorKind::invalid_parameter,
          "eps1 must lie in (0, smallest positive coordinate / 2)");
  a_.assign(target.begin(), target.end());
  eps_ = eps1;
  zero_run_.assign(target.size(), 0);
  for (std::size_t i = 0; i < target.size(); ++i) zero_run_[i] = target[i] == 0.0 ? 1 : 0;
}

void ReverseSequence::extend_to(std::size_t n) {
  while (steps_.size() < n) advance();
}

void ReverseSequence::advance() {
  const Graph& g = *g_;
  const std::size_t j = steps_.size() + 1;
  const auto n = a_.size();

  std::vector<Vertex> zeros;
  for (std::size_t i = 0; i < n; ++i)
    if (a_[i] == 0) zeros.push_back(static_cast<Vertex>(i));
  require(!zeros.empty(), ErrorKind::invalid_state, "reverse state left U: no zero coordinate");
  // Longest current zero run first, i.e. smallest persistence index.
  std::stable_sort(zeros.begin(), zeros.end(), [&](Vertex p, Vertex q) {
    return zero_run_[static_cast<std::size_t>(p)] > zero_run_[static_cast<std::size_t>(q)];
  });

  ReverseStep step;
  step.x = zeros.front();
  step.zeros = static_cast<int>(zeros.size());
  step.epsilon = static_cast<double>(eps_);
  step.log2_epsilon = static_cast<double>(boost::multiprecision::log2(eps_));

  std::size_t donor = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (a_[i] > a_[donor]) donor = i;
  const WideReal budget = eps_ / boost::multiprecision::pow(WideReal(2), static_cast<long long>(j) + 1);
  const WideReal delta = std::min(budget, a_[donor] / 2);
  step.delta = static_cast<double>(delta);
  step.log2_delta = static_cast<double>(boost::multiprecision::log2(delta));
  require(delta < eps_ / boost::multiprecision::pow(WideReal(2), static_cast<long long>(j)),
          ErrorKind::invalid_state, "perturbation budget exceeded eps_j / 2^j");

  if (zeros.size() > 1) {
    step.donor = static_cast<Vertex>(donor);
    WideReal share = delta;
    WideReal paid = 0;
    for (std::size_t r = 1; r < zeros.size(); ++r) {
      share /= 2;
      a_[static_cast<std::size_t>(zeros[r])] = share;
      paid += share;
    }
    a_[donor] -= paid;
  }

  // op_R at the chosen zero, in wide arithmetic.
  const Vertex x = step.x;
  WideReal m = a_[static_cast<std::size_t>(g.neighbors(x)[0])];
  for (Vertex u : g.neighbors(x)) m = std::min(m, a_[static_cast<std::size_t>(u)]);
  require(m > 0, ErrorKind::invalid_state, "pulled-back vertex has an empty neighbour");
  a_[static_cast<std::size_t>(x)] += g.degree(x) * m;
  for (Vertex u : g.neighbors(x)) a_[static_cast<std::size_t>(u)] -= m;

  WideReal min_positive = -1;
  bool has_zero = false;
  for (std::size_t i = 0; i < n; ++i) {
    require(a_[i] >= 0, ErrorKind::invalid_state, "reverse state has a negative coordinate");
    if (a_[i] == 0) {
      has_zero = true;
      ++zero_run_[i];
    } else {
      zero_run_[i] = 0;
      if (min_positive < 0 || a_[i] < min_positive) min_positive = a_[i];
    }
  }
  require(has_zero, ErrorKind::invalid_state, "reverse state left U: no zero coordinate");
  eps_ = std::min(eps_, min_positive) / 4;
  steps_.push_back(step);
}

std::vector<Vertex> ReverseSequence::vertices() const {
  std::vector<Vertex> v;
  v.reserve(steps_.size());
  for (const auto& s : steps_) v.push_back(s.x);
  return v;
}

std::vector<double> ReverseSequence::endpoint() const {
  std::vector<double> out;
  out.reserve(a_.size());
  for (const auto& x : a_) out.push_back(static_cast<double>(x));
  return out;
}

std::vector<double> forward_replay(const Graph& g, std::span<const double> c, std::span<const Vertex> xseq) {
  require_size(c, g);
  std::vector<double> b(c.begin(), c.end());
  for (auto it = xseq.rbegin(); it != xseq.rend(); ++it) {
    const auto y = static_cast<std::size_t>(*it);
    const double moved = b[y];
    if (moved == 0.0) continue;
    const double share = moved / g.degree(*it);
    b[y] = 0.0;
    for (Vertex x : g.neighbors(*it)) b[static_cast<std::size_t>(x)] += share;
  }
  return b;
}

ReachResult reach_target(ReverseSequence& seq, std::span<const double> c, std::size_t initial,
                         std::size_t cap) {
  require(initial >= 1, ErrorKind::invalid_parameter, "initial length must be >= 1");
  require(in_U(c, seq.graph()), ErrorKind::invalid_parameter, "start must lie in U");
  ReachResult out;
  for (std::size_t n = std::min(initial, cap);; n = std::min(2 * n, cap)) {
    seq.extend_to(n);
    const auto xs = seq.vertices();
    out.steps = n;
    out.distance = l1_distance(forward_replay(seq.graph(), c, xs), seq.target());
    if (out.distance <= 2 * seq.eps1()) {
      out.reached = true;
      return out;
    }
    if (n == cap) return out;
  }
}

}  // namespace meteor
