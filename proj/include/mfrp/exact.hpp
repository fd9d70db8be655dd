#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfrp/gf2.hpp"
#include "mfrp/model.hpp"

namespace mfrp {

// Enumerations walk 2^(free variables) states; anything past the cap is
// refused with CapError rather than silently taking hours.
inline constexpr std::size_t kDefaultEnumerationCap = 25;

// log Z by full enumeration with a streaming log-sum-exp.
double exact_log_z(const PairwiseModel& model, std::size_t cap = kDefaultEnumerationCap);

// log Z(A, b): the partition mass restricted to solutions of cs. Returns -inf
// for inconsistent systems (empty domain).
double exact_constrained_log_z(const PairwiseModel& model, const ConstraintSystem& cs,
                               std::size_t cap = kDefaultEnumerationCap);

struct MapResult {
  BitVec x;      // maximizer; ties resolved to the smallest free assignment
  double value;  // theta . phi(x)
};

// max theta . phi over solutions of cs. Inconsistent systems have no
// maximizer and raise std::domain_error.
MapResult constrained_map(const PairwiseModel& model, const ConstraintSystem& cs,
                          std::size_t cap = kDefaultEnumerationCap);

// Exact per-variable marginals P(x_i = 1), by enumeration.
std::vector<double> exact_marginals(const PairwiseModel& model,
                                    std::size_t cap = kDefaultEnumerationCap);

// Randomized approximation of log Z that needs only constrained MAP calls:
// log sum_{i=0..n} exp(median over T trials of max theta.phi s.t. a random
// i-row parity system) * 2^(i-1). With T >= required_trials the result is a
// 32(n+1)-factor approximation with probability 1 - delta.
struct WishConfig {
  std::size_t trials = 1;  // T, medians are taken over this many draws per level
  double delta = 0.1;      // tolerated failure probability
  double alpha = 0.0042;   // concentration constant of the trial bound
  std::uint64_t seed = 0;
};

std::size_t wish_required_trials(std::size_t n, double delta, double alpha);

double wish_estimate(const PairwiseModel& model, const WishConfig& cfg,
                     std::size_t cap = kDefaultEnumerationCap);

}  // namespace mfrp
