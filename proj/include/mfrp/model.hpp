#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mfrp/gf2.hpp"

namespace mfrp {

struct Edge {
  std::size_t i;  // i < j always
  std::size_t j;
  double w;
};

// Binary pairwise exponential-family model over x in {0,1}^n:
//   p(x) = exp(theta . phi(x)) / Z
// with phi made of per-variable indicators x_i and per-edge products x_i x_j,
// plus a constant offset absorbed from reparameterizations. All weights are
// finite; edges are simple (no self loops, no duplicates).
class PairwiseModel {
 public:
  PairwiseModel() = default;
  explicit PairwiseModel(std::size_t n) : unary_(n, 0.0), adjacency_(n) {}

  std::size_t num_vars() const { return unary_.size(); }

  double unary(std::size_t i) const;
  void set_unary(std::size_t i, double w);
  void add_unary(std::size_t i, double w);

  // Accepts endpoints in either order and stores them normalized.
  void add_edge(std::size_t i, std::size_t j, double w);

  double const_offset() const { return const_offset_; }
  void set_const_offset(double c);
  void add_const_offset(double c);

  const std::vector<Edge>& edges() const { return edges_; }

  // (neighbor, edge weight) pairs in edge insertion order.
  const std::vector<std::pair<std::size_t, double>>& neighbors(std::size_t i) const;

  friend bool operator==(const PairwiseModel& a, const PairwiseModel& b);

 private:
  std::vector<double> unary_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
  std::unordered_set<std::uint64_t> edge_keys_;
  double const_offset_ = 0.0;
};

// theta . phi(x) including the constant offset.
double theta_dot_phi(const PairwiseModel& model, const BitVec& x);

// Random Ising spin glass on a rows x cols grid with couplings w ~ U[w_lo,
// w_hi] and per-edge fields f ~ U[f_lo, f_hi] on both endpoints, converted
// from spins s in {-1,+1} to the {0,1} parameterization (s = 2x - 1). The
// conversion lands entirely in the unary/pairwise/constant terms, so
// theta_dot_phi(x) reproduces the spin energy exactly.
PairwiseModel ising_grid(std::size_t rows, std::size_t cols, double w_lo, double w_hi,
                         double f_lo, double f_hi, std::mt19937_64& rng);

// Restricted Boltzmann machine P(v, h) prop. exp(b'v + c'h + h'Wv).
struct RbmParams {
  std::size_t n_visible = 0;
  std::size_t n_hidden = 0;
  std::vector<double> weights;       // n_hidden x n_visible, row-major
  std::vector<double> visible_bias;  // length n_visible
  std::vector<double> hidden_bias;   // length n_hidden

  double weight(std::size_t h, std::size_t v) const { return weights[h * n_visible + v]; }
};

// Flattens an RBM into a pairwise model: visible unit j -> variable j, hidden
// unit i -> variable n_visible + i, one edge per nonzero weight.
PairwiseModel rbm_to_model(const RbmParams& p);

PairwiseModel load_model(const std::string& path);
void save_model(const PairwiseModel& model, const std::string& path);
RbmParams load_rbm(const std::string& path);

// Dispatches on the header tag: "n ..." pairwise, "rbm ..." RBM (converted).
PairwiseModel load_any_model(const std::string& path);

}  // namespace mfrp
