#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "mfrp/gf2.hpp"
#include "mfrp/meanfield.hpp"
#include "mfrp/model.hpp"

namespace mfrp {

// Product-form marginals over the free variables of a parity system. The
// pivot (constrained) variables are deterministic given the free ones, and
// their exact marginals under the product law have closed forms driven by the
// per-row products P_row = prod_{s in row support} (1 - 2 mu_s); the state
// keeps those products and the pivot marginals in sync with every free-
// marginal write.
class MarginalState {
 public:
  MarginalState(std::shared_ptr<const ConstraintSystem> cs, std::vector<double> mu_free);

  const ConstraintSystem& system() const { return *cs_; }
  std::size_t num_vars() const { return cs_->n; }
  std::size_t free_count() const { return cs_->free_count(); }

  double free_marginal(std::size_t slot) const;
  void set_free_marginal(std::size_t slot, double value);

  double pivot_marginal(std::size_t row) const;  // exact P(x_pivot(row) = 1)
  double row_product(std::size_t row) const;

  // The row product is cached as (product of nonzero factors, zero count) so
  // that "product excluding a member" is O(1): zeros are handled by count and
  // division only ever sees a nonzero factor.
  double row_nonzero_product(std::size_t row) const;
  std::size_t row_zero_count(std::size_t row) const;

  static constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

  // prod of (1 - 2 mu) over the symmetric difference of the two rows'
  // supports (slots shared by both rows cancel), optionally skipping one
  // symmetric-difference slot. O(1) for pairs registered with
  // cache_row_pair, O(total support) otherwise.
  double joint_row_product(std::size_t row_a, std::size_t row_b,
                           std::size_t skip_slot = kNoSlot) const;

  // Registers a pivot-row pair whose joint product will be queried repeatedly
  // (say, once per sweep for an edge between two pivot variables), keeping it
  // maintained incrementally alongside the row caches. Idempotent.
  void cache_row_pair(std::size_t row_a, std::size_t row_b);

  // Marginal of any variable by its original index.
  double marginal(std::size_t var) const;
  std::vector<double> marginals() const;

  // -1 when the variable is on the other side of the pivot/free split.
  int free_slot_of(std::size_t var) const;
  int pivot_row_of(std::size_t var) const;

  bool row_has(std::size_t row, std::size_t slot) const {
    return cs_->C.get(row, cs_->rank + slot);
  }
  // Free slots appearing in a row / rows containing a slot, ascending.
  const std::vector<std::uint32_t>& row_support(std::size_t row) const;
  const std::vector<std::uint32_t>& rows_containing(std::size_t slot) const;

 private:
  struct RowPair {
    double nonzero = 1.0;
    std::uint32_t zeros = 0;
    std::uint32_t ops = 0;
    std::vector<std::uint32_t> sym;  // symmetric difference of the supports
  };

  void refresh_row(std::size_t row);
  void nudge_row(std::size_t row, double old_factor, double new_factor);
  void refresh_pair(RowPair& pair);
  int pair_index(std::size_t row_a, std::size_t row_b) const;

  std::shared_ptr<const ConstraintSystem> cs_;
  std::vector<double> mu_free_;
  std::vector<double> mu_pivot_;
  std::vector<double> row_prod_;
  std::vector<double> row_nonzero_;
  std::vector<std::uint32_t> row_zeros_;
  std::vector<std::uint32_t> row_ops_;  // nudges since the last exact rebuild
  std::vector<std::int32_t> slot_of_;
  std::vector<std::int32_t> row_of_;
  std::vector<std::vector<std::uint32_t>> row_support_;
  std::vector<std::vector<std::uint32_t>> col_rows_;
  std::vector<RowPair> pairs_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pair_keys_;  // sorted
  std::vector<std::vector<std::uint32_t>> slot_pairs_;
};

// Exact singleton marginal of a pivot variable (by original index) under the
// state's product law.
double constrained_singleton(const MarginalState& state, std::size_t var);

// Exact pairwise expectation E[x_k x_l] under the state's product law, for
// any two distinct variables (free-free, free-pivot, or pivot-pivot).
double constrained_pairwise(const MarginalState& state, std::size_t k, std::size_t l);

// Lower bound on log Z(A, b): expected energy under the constrained product
// law plus the entropy of the free coordinates.
double projected_elbo(const PairwiseModel& model, const MarginalState& state);

// Exact maximization of the projected bound in one free coordinate, holding
// the others fixed; the bound never decreases.
void coordinate_update(const PairwiseModel& model, MarginalState& state, std::size_t var);

// One constraint level: T independent parity draws, each solved with J
// restarts of coordinate ascent; gamma_t is exp of the best bound found.
struct ProjectionEstimate {
  std::size_t m = 0;                // requested constraint count
  std::vector<double> log_gamma;    // per trial; -inf marks an empty domain
  std::vector<std::size_t> ranks;   // effective rank per trial
  double aggregate_log = 0.0;       // median_t(log_gamma_t + rank_t log 2)
  double mean_aggregate_log = 0.0;  // log mean_t exp(...); the quantity whose
                                    // expectation is bounded by Z
  double wall_ms = 0.0;             // measured; reports zero it unless asked
  std::size_t total_sweeps = 0;     // coordinate sweeps across all solves
};

struct MfrpResult {
  ProjectionEstimate estimate;
  // Best state per consistent trial, in trial order (empty-domain trials
  // contribute nothing).
  std::vector<MarginalState> best_states;
};

// Honors MFRP_WORKERS for fan-out across trials; results are identical at any
// worker count because every (trial, restart) has its own derived seed.
MfrpResult mfrp_run(const PairwiseModel& model, std::size_t m, std::size_t trials,
                    std::size_t restarts, const SolveOptions& opts, std::uint64_t seed);

struct SweepResult {
  std::vector<ProjectionEstimate> curve;  // one entry per requested level
  std::size_t best_index = 0;             // argmax of aggregate_log
};

// Runs the level estimate for each m in levels (same master seed, so a level
// repeated alone reproduces its sweep entry) and reports the best aggregate.
SweepResult mfrp_sweep(const PairwiseModel& model, const std::vector<std::size_t>& levels,
                       std::size_t trials, std::size_t restarts, const SolveOptions& opts,
                       std::uint64_t seed);

enum class MarginalAggregate { kMean, kMedian };

// Combines per-trial marginal vectors (original variable order).
std::vector<double> aggregate_marginals(const PairwiseModel& model,
                                        const std::vector<MarginalState>& runs,
                                        MarginalAggregate rule = MarginalAggregate::kMean);

}  // namespace mfrp
