#include "mfrp/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "mfrp/errors.hpp"
#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace mfrp {

namespace {

void ensure_within_cap(std::size_t n, std::size_t cap) {
  if (n > cap) throw CapError(n, cap);
}

// Walks every solution of cs in Gray-code order over the free slots, keeping
// theta . phi incrementally up to date: flipping free slot s toggles its own
// variable plus every pivot whose row contains s, and each single-variable
// toggle changes the objective by its unary weight plus the active incident
// edges. Visits f(x, free_bits, value) once per solution.
template <class F>
void enumerate_solutions(const PairwiseModel& model, const ConstraintSystem& cs, F&& f) {
  const std::size_t n = model.num_vars();
  const std::size_t nf = cs.free_count();
  if (nf >= 64) throw CapError(nf, 63);  // unreachable behind the public caps

  BitVec x(n, 0);
  // all-zero free assignment: pivots start at their parity bits
  for (std::size_t row = 0; row < cs.rank; ++row)
    x[cs.pivot_var(row)] = cs.b[row];
  BitVec free_bits(nf, 0);
  double value = theta_dot_phi(model, x);

  std::vector<std::vector<std::size_t>> toggles(nf);
  for (std::size_t s = 0; s < nf; ++s) {
    toggles[s].push_back(cs.free_var(s));
    for (std::size_t row = 0; row < cs.rank; ++row)
      if (cs.C.get(row, cs.rank + s)) toggles[s].push_back(cs.pivot_var(row));
  }

  auto toggle_var = [&](std::size_t v) {
    double d = model.unary(v);
    for (const auto& [nb, w] : model.neighbors(v))
      if (x[nb]) d += w;
    value += x[v] ? -d : d;
    x[v] ^= 1;
  };

  f(x, free_bits, value);
  const std::uint64_t total = std::uint64_t{1} << nf;
  for (std::uint64_t g = 1; g < total; ++g) {
    const std::size_t s = static_cast<std::size_t>(std::countr_zero(g));
    for (std::size_t v : toggles[s]) toggle_var(v);
    free_bits[s] ^= 1;
    f(x, free_bits, value);
  }
}

}  // namespace

double exact_log_z(const PairwiseModel& model, std::size_t cap) {
  ensure_within_cap(model.num_vars(), cap);
  double acc = kNegInf;
  enumerate_solutions(model, empty_system(model.num_vars()),
                      [&](const BitVec&, const BitVec&, double v) { acc = log_add(acc, v); });
  return acc;
}

double exact_constrained_log_z(const PairwiseModel& model, const ConstraintSystem& cs,
                               std::size_t cap) {
  if (cs.n != model.num_vars())
    throw std::invalid_argument("constrained log Z: system/model size mismatch");
  ensure_within_cap(model.num_vars(), cap);
  if (!cs.consistent) return kNegInf;
  double acc = kNegInf;
  enumerate_solutions(model, cs,
                      [&](const BitVec&, const BitVec&, double v) { acc = log_add(acc, v); });
  return acc;
}

MapResult constrained_map(const PairwiseModel& model, const ConstraintSystem& cs,
                          std::size_t cap) {
  if (cs.n != model.num_vars())
    throw std::invalid_argument("constrained MAP: system/model size mismatch");
  ensure_within_cap(model.num_vars(), cap);
  if (!cs.consistent) throw std::domain_error("constrained MAP: empty solution set");

  MapResult best;
  best.value = kNegInf;
  BitVec best_free;
  bool first = true;
  enumerate_solutions(model, cs, [&](const BitVec& x, const BitVec& free_bits, double v) {
    if (first || v > best.value ||
        (v == best.value && std::lexicographical_compare(free_bits.begin(), free_bits.end(),
                                                         best_free.begin(), best_free.end()))) {
      best.x = x;
      best.value = v;
      best_free = free_bits;
      first = false;
    }
  });
  return best;
}

std::vector<double> exact_marginals(const PairwiseModel& model, std::size_t cap) {
  const std::size_t n = model.num_vars();
  ensure_within_cap(n, cap);
  const ConstraintSystem cs = empty_system(n);

  // two passes: a max for stable exponentials, then plain accumulation
  double vmax = kNegInf;
  enumerate_solutions(model, cs, [&](const BitVec&, const BitVec&, double v) {
    if (v > vmax) vmax = v;
  });

  std::vector<double> mass(n, 0.0);
  double total = 0.0;
  enumerate_solutions(model, cs, [&](const BitVec& x, const BitVec&, double v) {
    const double w = std::exp(v - vmax);
    total += w;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i]) mass[i] += w;
  });
  for (double& m : mass) m /= total;
  return mass;
}

std::size_t wish_required_trials(std::size_t n, double delta, double alpha) {
  if (n == 0) throw std::invalid_argument("required trials: empty model");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (!(alpha > 0.0 && alpha <= 0.0042))
    throw std::invalid_argument("alpha must be in (0, 0.0042]");
  return static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(n) / delta) / alpha));
}

double wish_estimate(const PairwiseModel& model, const WishConfig& cfg, std::size_t cap) {
  const std::size_t n = model.num_vars();
  ensure_within_cap(n, cap);
  if (cfg.trials == 0) throw std::invalid_argument("wish_estimate: trials must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("wish_estimate: delta must be in (0,1)");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 0.0042))
    throw std::invalid_argument("wish_estimate: alpha must be in (0, 0.0042]");

  const std::size_t required = wish_required_trials(n, cfg.delta, cfg.alpha);
  if (cfg.trials < required)
    std::cerr << "wish_estimate: T=" << cfg.trials << " is below the " << required
              << " trials needed for the (delta=" << cfg.delta << ", alpha=" << cfg.alpha
              << ") guarantee\n";

  const double ln2 = std::numbers::ln2;
  double acc = kNegInf;
  std::vector<double> vals(cfg.trials);
  for (std::size_t level = 0; level <= n; ++level) {
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      auto eng = make_engine(derive_seed(cfg.seed, Stream::kWish, {level, t}));
      auto [a, b] = sample_projection(n, level, eng);
      const ConstraintSystem cs = rref_mod2(a, b);
      vals[t] = cs.consistent ? constrained_map(model, cs, cap).value : kNegInf;
    }
    const double med = median(vals);
    // level term: median * 2^(level - 1); level 0 contributes half its mass
    acc = log_add(acc, med + (static_cast<double>(level) - 1.0) * ln2);
  }
  return acc;
}

}  // namespace mfrp
