#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mfrp {

// Binary assignment / bit string; entries are 0 or 1.
using BitVec = std::vector<std::uint8_t>;

// Dense matrix over GF(2), rows packed into 64-bit words.
class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), bits_(rows * wpr_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (bits_[r * wpr_ + c / 64] >> (c % 64)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = bits_[r * wpr_ + c / 64];
    const std::uint64_t mask = std::uint64_t{1} << (c % 64);
    w = v ? (w | mask) : (w & ~mask);
  }

  void xor_rows(std::size_t dst, std::size_t src);  // row dst ^= row src
  void swap_rows(std::size_t a, std::size_t b);
  bool row_zero(std::size_t r) const;

  // Calls f(col) for every set bit of row r, in ascending column order.
  template <class F>
  void for_each_set(std::size_t r, F&& f) const {
    const std::uint64_t* w = &bits_[r * wpr_];
    for (std::size_t k = 0; k < wpr_; ++k) {
      std::uint64_t word = w[k];
      while (word != 0) {
        f(k * 64 + static_cast<std::size_t>(std::countr_zero(word)));
        word &= word - 1;
      }
    }
  }

  friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) = default;

  // Raw word access for bulk fills; unused high bits of the last word per row
  // must stay zero.
  std::size_t words_per_row() const { return wpr_; }
  std::uint64_t* row_words(std::size_t r) { return &bits_[r * wpr_]; }
  const std::uint64_t* row_words(std::size_t r) const { return &bits_[r * wpr_]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t wpr_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Parity system Ax = b (mod 2) brought to reduced echelon form C = [I_r | A']
// over permuted columns. perm maps reduced column -> original variable; the
// first `rank` permuted columns are the pivot (constrained) variables and the
// remaining n - rank are free. Redundant zero rows are dropped; `consistent`
// is false when elimination exposes a contradiction (0 = 1), in which case the
// solution set is empty and C/b still describe the reduced nontrivial rows.
struct ConstraintSystem {
  std::size_t m = 0;  // constraint count as sampled, before rank reduction
  std::size_t n = 0;
  Gf2Matrix C;  // rank x n, columns in permuted order
  BitVec b;     // length rank
  std::vector<std::size_t> perm;
  std::size_t rank = 0;
  bool consistent = true;

  std::size_t free_count() const { return n - rank; }
  std::size_t pivot_var(std::size_t row) const { return perm[row]; }
  std::size_t free_var(std::size_t slot) const { return perm[rank + slot]; }
};

// Draws b then A, entrywise fair coins from the engine's raw words.
std::pair<Gf2Matrix, BitVec> sample_projection(std::size_t n, std::size_t m,
                                               std::mt19937_64& rng);

ConstraintSystem rref_mod2(const Gf2Matrix& a, const BitVec& b);

// The unconstrained system over n variables (rank 0, identity perm).
ConstraintSystem empty_system(std::size_t n);

// Does x satisfy every constraint? x is indexed by original variable.
bool member(const ConstraintSystem& cs, const BitVec& x);

// 2^(n - rank), or 0 for inconsistent systems. Refuses counts that do not fit
// in 64 bits.
std::uint64_t count_solutions(const ConstraintSystem& cs);

}  // namespace mfrp
