#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfrp/model.hpp"

namespace mfrp {

struct SolveOptions {
  double tol = 1e-8;       // stop when a full sweep gains less than this
  int max_sweeps = 1000;
  double timeout_s = 0.0;  // wall-clock stop; 0 disables (keeps runs deterministic)
};

struct MfState {
  std::vector<double> mu;
  double elbo = 0.0;
  int iterations = 0;  // completed sweeps
  bool converged = false;
};

// Evidence lower bound of the fully factored family:
//   sum_i theta_i mu_i + sum_ij theta_ij mu_i mu_j + sum_i H(mu_i) + const.
// Always a lower bound on log Z for mu in [0,1]^n.
double elbo(const PairwiseModel& model, std::span<const double> mu);

// Exact maximizer of the bound in coordinate k with the rest held fixed:
// sigmoid(theta_k + sum_{j ~ k} theta_kj mu_j), clamped away from {0,1}.
double mf_update_coordinate(const PairwiseModel& model, std::span<const double> mu,
                            std::size_t k);

// Coordinate ascent from a given starting point. Each sweep updates all
// coordinates in index order; the bound never decreases.
MfState mf_ascent(const PairwiseModel& model, std::vector<double> init_mu,
                  const SolveOptions& opts = {});

// Best of `restarts` ascents from independent uniform starting points.
MfState mf_estimate(const PairwiseModel& model, std::size_t restarts,
                    const SolveOptions& opts, std::uint64_t seed);

}  // namespace mfrp
