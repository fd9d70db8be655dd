#include "mfrp/mfrp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>

#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace mfrp {

MarginalState::MarginalState(std::shared_ptr<const ConstraintSystem> cs,
                             std::vector<double> mu_free)
    : cs_(std::move(cs)), mu_free_(std::move(mu_free)) {
  if (!cs_) throw std::invalid_argument("MarginalState: null constraint system");
  if (!cs_->consistent)
    throw std::domain_error("MarginalState: system has an empty solution set");
  if (mu_free_.size() != cs_->free_count())
    throw std::invalid_argument("MarginalState: free marginal count mismatch");
  for (double& v : mu_free_) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("MarginalState: marginals must lie in [0,1]");
    v = clamp_marginal(v);
  }

  const std::size_t n = cs_->n;
  const std::size_t r = cs_->rank;
  slot_of_.assign(n, -1);
  row_of_.assign(n, -1);
  for (std::size_t row = 0; row < r; ++row)
    row_of_[cs_->pivot_var(row)] = static_cast<std::int32_t>(row);
  for (std::size_t s = 0; s < cs_->free_count(); ++s)
    slot_of_[cs_->free_var(s)] = static_cast<std::int32_t>(s);

  row_support_.resize(r);
  col_rows_.resize(cs_->free_count());
  for (std::size_t row = 0; row < r; ++row) {
    cs_->C.for_each_set(row, [&](std::size_t col) {
      if (col >= r) {
        const std::size_t s = col - r;
        row_support_[row].push_back(static_cast<std::uint32_t>(s));
        col_rows_[s].push_back(static_cast<std::uint32_t>(row));
      }
    });
  }

  mu_pivot_.resize(r);
  row_prod_.resize(r);
  row_nonzero_.resize(r);
  row_zeros_.resize(r);
  row_ops_.resize(r);
  for (std::size_t row = 0; row < r; ++row) refresh_row(row);
  slot_pairs_.resize(cs_->free_count());
}

void MarginalState::refresh_row(std::size_t row) {
  double p = 1.0;
  std::uint32_t zeros = 0;
  for (std::uint32_t s : row_support_[row]) {
    const double f = 1.0 - 2.0 * mu_free_[s];
    if (f == 0.0)
      ++zeros;
    else
      p *= f;
  }
  row_nonzero_[row] = p;
  row_zeros_[row] = zeros;
  row_ops_[row] = 0;
  row_prod_[row] = zeros ? 0.0 : p;
  const double sgn = 1.0 - 2.0 * static_cast<double>(cs_->b[row]);
  mu_pivot_[row] = 0.5 * (1.0 - sgn * row_prod_[row]);
}

// O(1) cache maintenance when one member's factor changes. Rebuilds exactly
// every so often to keep rounding drift bounded, and immediately when the
// running product gets small enough to risk underflowing to a sticky zero.
void MarginalState::nudge_row(std::size_t row, double old_factor, double new_factor) {
  if (old_factor == 0.0)
    --row_zeros_[row];
  else
    row_nonzero_[row] /= old_factor;
  if (new_factor == 0.0)
    ++row_zeros_[row];
  else
    row_nonzero_[row] *= new_factor;
  if (++row_ops_[row] >= 4096 ||
      (row_zeros_[row] == 0 && std::abs(row_nonzero_[row]) < 1e-280)) {
    refresh_row(row);
    return;
  }
  row_prod_[row] = row_zeros_[row] ? 0.0 : row_nonzero_[row];
  const double sgn = 1.0 - 2.0 * static_cast<double>(cs_->b[row]);
  mu_pivot_[row] = 0.5 * (1.0 - sgn * row_prod_[row]);
}

double MarginalState::free_marginal(std::size_t slot) const {
  if (slot >= mu_free_.size()) throw std::invalid_argument("free slot out of range");
  return mu_free_[slot];
}

void MarginalState::set_free_marginal(std::size_t slot, double value) {
  if (slot >= mu_free_.size()) throw std::invalid_argument("free slot out of range");
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("marginals must lie in [0,1]");
  const double old_factor = 1.0 - 2.0 * mu_free_[slot];
  mu_free_[slot] = clamp_marginal(value);
  const double new_factor = 1.0 - 2.0 * mu_free_[slot];
  for (std::uint32_t row : col_rows_[slot]) nudge_row(row, old_factor, new_factor);
  for (std::uint32_t pi : slot_pairs_[slot]) {
    RowPair& pair = pairs_[pi];
    if (old_factor == 0.0)
      --pair.zeros;
    else
      pair.nonzero /= old_factor;
    if (new_factor == 0.0)
      ++pair.zeros;
    else
      pair.nonzero *= new_factor;
    if (++pair.ops >= 4096 || (pair.zeros == 0 && std::abs(pair.nonzero) < 1e-280))
      refresh_pair(pair);
  }
}

double MarginalState::pivot_marginal(std::size_t row) const {
  if (row >= mu_pivot_.size()) throw std::invalid_argument("pivot row out of range");
  return mu_pivot_[row];
}

double MarginalState::row_product(std::size_t row) const {
  if (row >= row_prod_.size()) throw std::invalid_argument("pivot row out of range");
  return row_prod_[row];
}

double MarginalState::row_nonzero_product(std::size_t row) const {
  if (row >= row_nonzero_.size()) throw std::invalid_argument("pivot row out of range");
  return row_nonzero_[row];
}

std::size_t MarginalState::row_zero_count(std::size_t row) const {
  if (row >= row_zeros_.size()) throw std::invalid_argument("pivot row out of range");
  return row_zeros_[row];
}

void MarginalState::refresh_pair(RowPair& pair) {
  double p = 1.0;
  std::uint32_t zeros = 0;
  for (std::uint32_t s : pair.sym) {
    const double f = 1.0 - 2.0 * mu_free_[s];
    if (f == 0.0)
      ++zeros;
    else
      p *= f;
  }
  pair.nonzero = p;
  pair.zeros = zeros;
  pair.ops = 0;
}

int MarginalState::pair_index(std::size_t row_a, std::size_t row_b) const {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(std::min(row_a, row_b)) << 32) | std::max(row_a, row_b);
  const auto it = std::lower_bound(
      pair_keys_.begin(), pair_keys_.end(), key,
      [](const std::pair<std::uint64_t, std::uint32_t>& e, std::uint64_t k) {
        return e.first < k;
      });
  if (it == pair_keys_.end() || it->first != key) return -1;
  return static_cast<int>(it->second);
}

void MarginalState::cache_row_pair(std::size_t row_a, std::size_t row_b) {
  if (row_a >= row_prod_.size() || row_b >= row_prod_.size())
    throw std::invalid_argument("pivot row out of range");
  if (row_a == row_b) throw std::invalid_argument("cache_row_pair: identical rows");
  if (pair_index(row_a, row_b) >= 0) return;

  RowPair pair;
  const auto& sa = row_support_[std::min(row_a, row_b)];
  const auto& sb = row_support_[std::max(row_a, row_b)];
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < sa.size() || ib < sb.size()) {
    if (ib == sb.size() || (ia < sa.size() && sa[ia] < sb[ib])) {
      pair.sym.push_back(sa[ia++]);
    } else if (ia == sa.size() || sb[ib] < sa[ia]) {
      pair.sym.push_back(sb[ib++]);
    } else {  // shared slot: squared factor integrates out
      ++ia;
      ++ib;
    }
  }
  refresh_pair(pair);

  const auto idx = static_cast<std::uint32_t>(pairs_.size());
  for (std::uint32_t s : pair.sym) slot_pairs_[s].push_back(idx);
  pairs_.push_back(std::move(pair));
  const std::uint64_t key =
      (static_cast<std::uint64_t>(std::min(row_a, row_b)) << 32) | std::max(row_a, row_b);
  const auto it = std::lower_bound(
      pair_keys_.begin(), pair_keys_.end(), key,
      [](const std::pair<std::uint64_t, std::uint32_t>& e, std::uint64_t k) {
        return e.first < k;
      });
  pair_keys_.insert(it, {key, idx});
}

double MarginalState::joint_row_product(std::size_t row_a, std::size_t row_b,
                                        std::size_t skip_slot) const {
  if (row_a >= row_prod_.size() || row_b >= row_prod_.size())
    throw std::invalid_argument("pivot row out of range");
  const int idx = pair_index(row_a, row_b);
  if (idx >= 0) {
    const RowPair& pair = pairs_[static_cast<std::size_t>(idx)];
    if (skip_slot == kNoSlot) return pair.zeros ? 0.0 : pair.nonzero;
    const double f = 1.0 - 2.0 * mu_free_[skip_slot];
    if (f == 0.0) return pair.zeros == 1 ? pair.nonzero : 0.0;
    return pair.zeros ? 0.0 : pair.nonzero / f;
  }
  // uncached: merge the supports directly (shared slots cancel)
  const auto& sa = row_support_[std::min(row_a, row_b)];
  const auto& sb = row_support_[std::max(row_a, row_b)];
  double p = 1.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < sa.size() || ib < sb.size()) {
    std::uint32_t s;
    if (ib == sb.size() || (ia < sa.size() && sa[ia] < sb[ib])) {
      s = sa[ia++];
    } else if (ia == sa.size() || sb[ib] < sa[ia]) {
      s = sb[ib++];
    } else {
      ++ia;
      ++ib;
      continue;
    }
    if (s != skip_slot) p *= 1.0 - 2.0 * mu_free_[s];
  }
  return p;
}

double MarginalState::marginal(std::size_t var) const {
  if (var >= cs_->n) throw std::invalid_argument("variable index out of range");
  const std::int32_t s = slot_of_[var];
  return s >= 0 ? mu_free_[static_cast<std::size_t>(s)]
                : mu_pivot_[static_cast<std::size_t>(row_of_[var])];
}

std::vector<double> MarginalState::marginals() const {
  std::vector<double> out(cs_->n);
  for (std::size_t v = 0; v < cs_->n; ++v) out[v] = marginal(v);
  return out;
}

int MarginalState::free_slot_of(std::size_t var) const {
  if (var >= cs_->n) throw std::invalid_argument("variable index out of range");
  return slot_of_[var];
}

int MarginalState::pivot_row_of(std::size_t var) const {
  if (var >= cs_->n) throw std::invalid_argument("variable index out of range");
  return row_of_[var];
}

const std::vector<std::uint32_t>& MarginalState::row_support(std::size_t row) const {
  if (row >= row_support_.size()) throw std::invalid_argument("pivot row out of range");
  return row_support_[row];
}

const std::vector<std::uint32_t>& MarginalState::rows_containing(std::size_t slot) const {
  if (slot >= col_rows_.size()) throw std::invalid_argument("free slot out of range");
  return col_rows_[slot];
}

namespace {

double row_sign(const MarginalState& state, std::size_t row) {
  return 1.0 - 2.0 * static_cast<double>(state.system().b[row]);
}

// prod over the row's support of (1 - 2 mu), skipping one slot, in O(1) off
// the row cache. Zero factors (mu = 1/2) are excluded from the cached product
// and tracked by count, so the skipped factor is divided out only when it is
// itself nonzero. The slot must belong to the row's support.
double residual_product(const MarginalState& state, std::size_t row, std::size_t skip) {
  const double f = 1.0 - 2.0 * state.free_marginal(skip);
  const std::size_t zeros = state.row_zero_count(row);
  if (f == 0.0) return zeros == 1 ? state.row_nonzero_product(row) : 0.0;
  return zeros ? 0.0 : state.row_nonzero_product(row) / f;
}

double residual_product2(const MarginalState& state, std::size_t row, std::size_t skip_a,
                         std::size_t skip_b) {
  const double fa = 1.0 - 2.0 * state.free_marginal(skip_a);
  const double fb = 1.0 - 2.0 * state.free_marginal(skip_b);
  std::size_t zeros = state.row_zero_count(row);
  double den = 1.0;
  if (fa == 0.0)
    --zeros;
  else
    den *= fa;
  if (fb == 0.0)
    --zeros;
  else
    den *= fb;
  return zeros ? 0.0 : state.row_nonzero_product(row) / den;
}

// E[x_k x_l] for two pivot rows:
// 1/4 (1 + s_a s_b J_ab - s_a P_a - s_b P_b), J over the support difference.
double pivot_pair_expectation(const MarginalState& state, std::size_t row_a,
                              std::size_t row_b) {
  const double sa = row_sign(state, row_a);
  const double sb = row_sign(state, row_b);
  return 0.25 * (1.0 + sa * sb * state.joint_row_product(row_a, row_b) -
                 sa * state.row_product(row_a) - sb * state.row_product(row_b));
}

// E[x_k x_l] with k free (slot) and l the pivot of `row`.
double mixed_pair_expectation(const MarginalState& state, std::size_t slot,
                              std::size_t row) {
  const double mu = state.free_marginal(slot);
  if (state.row_has(row, slot))
    return mu * 0.5 * (1.0 + row_sign(state, row) * residual_product(state, row, slot));
  return mu * state.pivot_marginal(row);
}

double pair_expectation(const MarginalState& state, std::size_t k, std::size_t l) {
  const int sk = state.free_slot_of(k);
  const int sl = state.free_slot_of(l);
  if (sk >= 0 && sl >= 0)
    return state.free_marginal(static_cast<std::size_t>(sk)) *
           state.free_marginal(static_cast<std::size_t>(sl));
  if (sk >= 0)
    return mixed_pair_expectation(state, static_cast<std::size_t>(sk),
                                  static_cast<std::size_t>(state.pivot_row_of(l)));
  if (sl >= 0)
    return mixed_pair_expectation(state, static_cast<std::size_t>(sl),
                                  static_cast<std::size_t>(state.pivot_row_of(k)));
  // canonical row order keeps the expectation exactly symmetric in (k, l)
  const auto ra = static_cast<std::size_t>(state.pivot_row_of(k));
  const auto rb = static_cast<std::size_t>(state.pivot_row_of(l));
  return pivot_pair_expectation(state, std::min(ra, rb), std::max(ra, rb));
}

}  // namespace

double constrained_singleton(const MarginalState& state, std::size_t var) {
  const int row = state.pivot_row_of(var);
  if (row < 0) throw std::invalid_argument("constrained_singleton: variable is free");
  return state.pivot_marginal(static_cast<std::size_t>(row));
}

double constrained_pairwise(const MarginalState& state, std::size_t k, std::size_t l) {
  if (k >= state.num_vars() || l >= state.num_vars())
    throw std::invalid_argument("constrained_pairwise: variable index out of range");
  if (k == l) throw std::invalid_argument("constrained_pairwise: identical variables");
  return pair_expectation(state, k, l);
}

double projected_elbo(const PairwiseModel& model, const MarginalState& state) {
  if (model.num_vars() != state.num_vars())
    throw std::invalid_argument("projected_elbo: model/state size mismatch");
  double acc = model.const_offset();
  for (std::size_t v = 0; v < state.num_vars(); ++v)
    acc += model.unary(v) * state.marginal(v);
  for (const Edge& e : model.edges()) acc += e.w * pair_expectation(state, e.i, e.j);
  for (std::size_t s = 0; s < state.free_count(); ++s)
    acc += bernoulli_entropy(state.free_marginal(s));
  return acc;
}

void coordinate_update(const PairwiseModel& model, MarginalState& state, std::size_t var) {
  if (model.num_vars() != state.num_vars())
    throw std::invalid_argument("coordinate_update: model/state size mismatch");
  const int slot_i = state.free_slot_of(var);
  if (slot_i < 0) throw std::invalid_argument("coordinate_update: variable is constrained");
  const std::size_t slot = static_cast<std::size_t>(slot_i);

  // d/d mu_k of the expected energy; the entropy part is folded into the
  // closing sigmoid, which maximizes the bound exactly in this coordinate.
  double c = model.unary(var);

  // contributions flowing through pivot rows whose parity involves var
  for (std::uint32_t row : state.rows_containing(slot)) {
    const double sgn = row_sign(state, row);
    const double res = residual_product(state, row, slot);
    const std::size_t pv = state.system().pivot_var(row);
    c += model.unary(pv) * sgn * res;
    for (const auto& [nb, w] : model.neighbors(pv)) {
      if (nb == var) {
        // edge between var and this pivot
        c += w * 0.5 * (1.0 + sgn * res);
      } else if (const int s2 = state.free_slot_of(nb); s2 >= 0) {
        // edge between this pivot and another free variable
        const std::size_t other = static_cast<std::size_t>(s2);
        if (state.row_has(row, other))
          c -= w * state.free_marginal(other) * sgn *
               residual_product2(state, row, slot, other);
        else
          c += w * state.free_marginal(other) * sgn * res;
      } else {
        // edge between two pivots; derivative of the pair expectation
        const std::size_t row2 = static_cast<std::size_t>(state.pivot_row_of(nb));
        if (state.row_has(row2, slot) && row2 < row) continue;  // done at the smaller row
        double d = 0.5 * sgn * res;
        if (state.row_has(row2, slot))
          d += 0.5 * row_sign(state, row2) * residual_product(state, row2, slot);
        else
          d -= 0.5 * sgn * row_sign(state, row2) * state.joint_row_product(row, row2, slot);
        c += w * d;
      }
    }
  }

  // edges incident to var itself
  for (const auto& [nb, w] : model.neighbors(var)) {
    if (const int s2 = state.free_slot_of(nb); s2 >= 0) {
      c += w * state.free_marginal(static_cast<std::size_t>(s2));
    } else {
      const std::size_t row = static_cast<std::size_t>(state.pivot_row_of(nb));
      // rows containing var were already handled above
      if (!state.row_has(row, slot)) c += w * state.pivot_marginal(row);
    }
  }

  state.set_free_marginal(slot, sigmoid(c));
}

namespace {

struct ProjectedSolve {
  MarginalState state;
  double objective;
  int sweeps;
  bool converged;
};

ProjectedSolve solve_projected(const PairwiseModel& model,
                               const std::shared_ptr<const ConstraintSystem>& cs,
                               const std::vector<double>& init_full,
                               const SolveOptions& opts) {
  std::vector<double> mu_free(cs->free_count());
  for (std::size_t s = 0; s < mu_free.size(); ++s) mu_free[s] = init_full[cs->free_var(s)];
  MarginalState state(cs, std::move(mu_free));

  // edges between two pivots query the same joint products every sweep
  for (const Edge& e : model.edges()) {
    const int ra = state.pivot_row_of(e.i);
    const int rb = state.pivot_row_of(e.j);
    if (ra >= 0 && rb >= 0)
      state.cache_row_pair(static_cast<std::size_t>(ra), static_cast<std::size_t>(rb));
  }

  const auto t0 = std::chrono::steady_clock::now();
  double prev = projected_elbo(model, state);
  int iterations = 0;
  bool converged = false;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t s = 0; s < state.free_count(); ++s)
      coordinate_update(model, state, cs->free_var(s));
    const double cur = projected_elbo(model, state);
    ++iterations;
    if (cur - prev < opts.tol) {
      converged = true;
      prev = cur;
      break;
    }
    prev = cur;
    if (opts.timeout_s > 0.0) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > opts.timeout_s) break;
    }
  }
  return {std::move(state), prev, iterations, converged};
}

std::size_t worker_count(std::size_t trials) {
  const char* env = std::getenv("MFRP_WORKERS");
  if (env == nullptr) return 1;
  const long v = std::atol(env);
  if (v <= 1) return 1;
  return std::min<std::size_t>(static_cast<std::size_t>(v), trials);
}

}  // namespace

MfrpResult mfrp_run(const PairwiseModel& model, std::size_t m, std::size_t trials,
                    std::size_t restarts, const SolveOptions& opts, std::uint64_t seed) {
  const std::size_t n = model.num_vars();
  if (m > n) throw std::invalid_argument("mfrp_run: more constraints than variables");
  if (trials == 0) throw std::invalid_argument("mfrp_run: trials must be >= 1");
  if (restarts == 0) throw std::invalid_argument("mfrp_run: restarts must be >= 1");
  if (opts.max_sweeps < 1) throw std::invalid_argument("mfrp_run: max_sweeps must be >= 1");

  const auto t_start = std::chrono::steady_clock::now();

  std::vector<double> log_gamma(trials, kNegInf);
  std::vector<std::size_t> ranks(trials, 0);
  std::vector<std::size_t> sweeps(trials, 0);
  std::vector<std::optional<MarginalState>> states(trials);

  auto run_trial = [&](std::size_t t) {
    auto proj_eng = make_engine(derive_seed(seed, Stream::kProjection, {t}));
    auto [a, b] = sample_projection(n, m, proj_eng);
    auto cs = std::make_shared<const ConstraintSystem>(rref_mod2(a, b));
    ranks[t] = cs->rank;
    if (!cs->consistent) return;  // empty domain: gamma_t stays 0

    std::optional<ProjectedSolve> best;
    for (std::size_t j = 0; j < restarts; ++j) {
      auto init_eng = make_engine(derive_seed(seed, Stream::kInit, {t, j}));
      std::vector<double> init(n);
      for (double& v : init) v = uniform01(init_eng);
      ProjectedSolve sol = solve_projected(model, cs, init, opts);
      sweeps[t] += static_cast<std::size_t>(sol.sweeps);
      if (!best || sol.objective > best->objective) best = std::move(sol);
    }
    log_gamma[t] = best->objective;
    states[t] = std::move(best->state);
  };

  const std::size_t workers = worker_count(trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= trials) return;
          try {
            run_trial(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  const double ln2 = std::numbers::ln2;
  std::vector<double> scaled(trials);
  for (std::size_t t = 0; t < trials; ++t)
    scaled[t] = log_gamma[t] + static_cast<double>(ranks[t]) * ln2;

  MfrpResult result;
  result.estimate.m = m;
  result.estimate.log_gamma = std::move(log_gamma);
  result.estimate.ranks = std::move(ranks);
  result.estimate.aggregate_log = median(scaled);
  result.estimate.mean_aggregate_log =
      log_sum_exp(scaled) - std::log(static_cast<double>(trials));
  for (std::size_t s : sweeps) result.estimate.total_sweeps += s;
  const std::chrono::duration<double, std::milli> dt =
      std::chrono::steady_clock::now() - t_start;
  result.estimate.wall_ms = dt.count();
  for (auto& st : states)
    if (st.has_value()) result.best_states.push_back(std::move(*st));
  return result;
}

SweepResult mfrp_sweep(const PairwiseModel& model, const std::vector<std::size_t>& levels,
                       std::size_t trials, std::size_t restarts, const SolveOptions& opts,
                       std::uint64_t seed) {
  if (levels.empty()) throw std::invalid_argument("mfrp_sweep: no constraint levels");
  SweepResult out;
  out.curve.reserve(levels.size());
  for (std::size_t m : levels)
    out.curve.push_back(mfrp_run(model, m, trials, restarts, opts, seed).estimate);
  for (std::size_t i = 1; i < out.curve.size(); ++i)
    if (out.curve[i].aggregate_log > out.curve[out.best_index].aggregate_log)
      out.best_index = i;
  return out;
}

std::vector<double> aggregate_marginals(const PairwiseModel& model,
                                        const std::vector<MarginalState>& runs,
                                        MarginalAggregate rule) {
  if (runs.empty()) throw std::invalid_argument("aggregate_marginals: no states");
  const std::size_t n = model.num_vars();
  for (const MarginalState& st : runs)
    if (st.num_vars() != n)
      throw std::invalid_argument("aggregate_marginals: state/model size mismatch");

  std::vector<double> out(n);
  if (rule == MarginalAggregate::kMean) {
    for (const MarginalState& st : runs)
      for (std::size_t v = 0; v < n; ++v) out[v] += st.marginal(v);
    for (double& v : out) v /= static_cast<double>(runs.size());
    return out;
  }
  std::vector<double> column(runs.size());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].marginal(v);
    out[v] = median(column);
  }
  return out;
}

}  // namespace mfrp
