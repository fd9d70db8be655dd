#include "mfrp/meanfield.hpp"

#include <chrono>
#include <stdexcept>

#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace mfrp {

namespace {

void check_marginals(const PairwiseModel& model, std::span<const double> mu) {
  if (mu.size() != model.num_vars())
    throw std::invalid_argument("marginal vector length mismatch");
  for (double v : mu)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("marginals must lie in [0,1]");
}

}  // namespace

double elbo(const PairwiseModel& model, std::span<const double> mu) {
  check_marginals(model, mu);
  double acc = model.const_offset();
  for (std::size_t i = 0; i < mu.size(); ++i) acc += model.unary(i) * mu[i];
  for (const Edge& e : model.edges()) acc += e.w * (mu[e.i] * mu[e.j]);
  for (double v : mu) acc += bernoulli_entropy(v);
  return acc;
}

double mf_update_coordinate(const PairwiseModel& model, std::span<const double> mu,
                            std::size_t k) {
  if (mu.size() != model.num_vars())
    throw std::invalid_argument("marginal vector length mismatch");
  if (k >= mu.size()) throw std::invalid_argument("coordinate out of range");
  double c = model.unary(k);
  for (const auto& [nb, w] : model.neighbors(k)) c += w * mu[nb];
  return clamp_marginal(sigmoid(c));
}

MfState mf_ascent(const PairwiseModel& model, std::vector<double> init_mu,
                  const SolveOptions& opts) {
  check_marginals(model, init_mu);
  if (opts.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (!(opts.tol >= 0.0)) throw std::invalid_argument("tol must be >= 0");

  MfState st;
  st.mu = std::move(init_mu);
  for (double& v : st.mu) v = clamp_marginal(v);

  const auto t0 = std::chrono::steady_clock::now();
  double prev = elbo(model, st.mu);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t k = 0; k < st.mu.size(); ++k)
      st.mu[k] = mf_update_coordinate(model, st.mu, k);
    const double cur = elbo(model, st.mu);
    ++st.iterations;
    if (cur - prev < opts.tol) {
      st.converged = true;
      prev = cur;
      break;
    }
    prev = cur;
    if (opts.timeout_s > 0.0) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > opts.timeout_s) break;
    }
  }
  st.elbo = prev;
  return st;
}

MfState mf_estimate(const PairwiseModel& model, std::size_t restarts,
                    const SolveOptions& opts, std::uint64_t seed) {
  if (restarts == 0) throw std::invalid_argument("mf_estimate: restarts must be >= 1");
  const std::size_t n = model.num_vars();
  MfState best;
  bool first = true;
  for (std::size_t j = 0; j < restarts; ++j) {
    auto eng = make_engine(derive_seed(seed, Stream::kInit, {0, j}));
    std::vector<double> init(n);
    for (double& v : init) v = uniform01(eng);
    MfState st = mf_ascent(model, std::move(init), opts);
    if (first || st.elbo > best.elbo) {
      best = std::move(st);
      first = false;
    }
  }
  return best;
}

}  // namespace mfrp
