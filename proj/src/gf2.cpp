#include "mfrp/gf2.hpp"

#include <algorithm>
#include <stdexcept>

namespace mfrp {

void Gf2Matrix::xor_rows(std::size_t dst, std::size_t src) {
  std::uint64_t* d = &bits_[dst * wpr_];
  const std::uint64_t* s = &bits_[src * wpr_];
  for (std::size_t k = 0; k < wpr_; ++k) d[k] ^= s[k];
}

void Gf2Matrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap_ranges(&bits_[a * wpr_], &bits_[a * wpr_] + wpr_, &bits_[b * wpr_]);
}

bool Gf2Matrix::row_zero(std::size_t r) const {
  const std::uint64_t* w = &bits_[r * wpr_];
  for (std::size_t k = 0; k < wpr_; ++k)
    if (w[k] != 0) return false;
  return true;
}

std::pair<Gf2Matrix, BitVec> sample_projection(std::size_t n, std::size_t m,
                                               std::mt19937_64& rng) {
  if (m > n) throw std::invalid_argument("sample_projection: more constraints than variables");
  BitVec b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = static_cast<std::uint8_t>(rng() & 1U);
  Gf2Matrix a(m, n);
  if (n == 0) return {a, b};
  const std::size_t wpr = a.words_per_row();
  const std::size_t tail_bits = n % 64;
  const std::uint64_t tail_mask = tail_bits == 0 ? ~std::uint64_t{0}
                                                 : ((std::uint64_t{1} << tail_bits) - 1);
  for (std::size_t r = 0; r < m; ++r) {
    std::uint64_t* words = a.row_words(r);
    for (std::size_t k = 0; k < wpr; ++k) words[k] = rng();
    words[wpr - 1] &= tail_mask;
  }
  return {a, b};
}

ConstraintSystem rref_mod2(const Gf2Matrix& a, const BitVec& b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw std::invalid_argument("rref_mod2: rhs length mismatch");

  Gf2Matrix r = a;
  BitVec rhs = b;
  std::vector<std::size_t> pivot_cols;
  pivot_cols.reserve(std::min(m, n));

  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t p = rank;
    while (p < m && !r.get(p, col)) ++p;
    if (p == m) continue;
    r.swap_rows(p, rank);
    std::swap(rhs[p], rhs[rank]);
    for (std::size_t q = 0; q < m; ++q) {
      if (q != rank && r.get(q, col)) {
        r.xor_rows(q, rank);
        rhs[q] ^= rhs[rank];
      }
    }
    pivot_cols.push_back(col);
    ++rank;
  }

  ConstraintSystem cs;
  cs.m = m;
  cs.n = n;
  cs.rank = rank;
  cs.consistent = true;
  for (std::size_t q = rank; q < m; ++q) {
    // rows past the rank are fully eliminated; a surviving rhs bit means 0 = 1
    if (rhs[q]) cs.consistent = false;
  }

  cs.perm.reserve(n);
  cs.perm.assign(pivot_cols.begin(), pivot_cols.end());
  std::vector<char> is_pivot(n, 0);
  for (std::size_t col : pivot_cols) is_pivot[col] = 1;
  for (std::size_t col = 0; col < n; ++col)
    if (!is_pivot[col]) cs.perm.push_back(col);

  cs.C = Gf2Matrix(rank, n);
  for (std::size_t row = 0; row < rank; ++row)
    for (std::size_t j = 0; j < n; ++j)
      if (r.get(row, cs.perm[j])) cs.C.set(row, j, true);
  cs.b.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(rank));
  return cs;
}

ConstraintSystem empty_system(std::size_t n) {
  ConstraintSystem cs;
  cs.m = 0;
  cs.n = n;
  cs.rank = 0;
  cs.C = Gf2Matrix(0, n);
  cs.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) cs.perm[i] = i;
  return cs;
}

bool member(const ConstraintSystem& cs, const BitVec& x) {
  if (x.size() != cs.n) throw std::invalid_argument("member: assignment length mismatch");
  if (!cs.consistent) throw std::domain_error("member: system has an empty solution set");
  for (std::size_t row = 0; row < cs.rank; ++row) {
    std::uint8_t acc = 0;
    cs.C.for_each_set(row, [&](std::size_t j) { acc ^= x[cs.perm[j]]; });
    if (acc != cs.b[row]) return false;
  }
  return true;
}

std::uint64_t count_solutions(const ConstraintSystem& cs) {
  if (!cs.consistent) return 0;
  const std::size_t free = cs.free_count();
  if (free >= 64) throw std::overflow_error("count_solutions: count exceeds 64 bits");
  return std::uint64_t{1} << free;
}

}  // namespace mfrp
