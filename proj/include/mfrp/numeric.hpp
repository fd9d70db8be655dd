#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfrp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Marginals live in [eps, 1-eps] so entropy and logistic terms stay finite.
inline constexpr double kMarginalEps = 1e-12;

inline double clamp_marginal(double mu) {
  return std::clamp(mu, kMarginalEps, 1.0 - kMarginalEps);
}

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> vals) {
  double acc = kNegInf;
  for (double v : vals) acc = log_add(acc, v);
  return acc;
}

// Median with the middle pair averaged for even counts. Values may be -inf.
inline double median(std::vector<double> vals) {
  if (vals.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(vals.begin(), vals.end());
  const std::size_t h = vals.size() / 2;
  if (vals.size() % 2 == 1) return vals[h];
  return 0.5 * vals[h - 1] + 0.5 * vals[h];
}

inline double sigmoid(double c) {
  if (c >= 0.0) return 1.0 / (1.0 + std::exp(-c));
  const double e = std::exp(c);
  return e / (1.0 + e);
}

// Entropy of Bernoulli(mu) in nats, with the 0 log 0 = 0 convention.
inline double bernoulli_entropy(double mu) {
  if (mu <= 0.0 || mu >= 1.0) return 0.0;
  return -mu * std::log(mu) - (1.0 - mu) * std::log1p(-mu);
}

// Shortest-debuggable fixed rendering: 17 significant digits round-trips any
// double, so reports are reproducible byte for byte across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace mfrp
