#include "mfrp/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mfrp/errors.hpp"
#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace mfrp {

namespace {

void check_finite(double w, const char* what) {
  if (!std::isfinite(w)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double PairwiseModel::unary(std::size_t i) const {
  if (i >= unary_.size()) throw std::invalid_argument("variable index out of range");
  return unary_[i];
}

void PairwiseModel::set_unary(std::size_t i, double w) {
  if (i >= unary_.size()) throw std::invalid_argument("variable index out of range");
  check_finite(w, "unary weight");
  unary_[i] = w;
}

void PairwiseModel::add_unary(std::size_t i, double w) {
  if (i >= unary_.size()) throw std::invalid_argument("variable index out of range");
  check_finite(w, "unary weight");
  unary_[i] += w;
}

void PairwiseModel::add_edge(std::size_t i, std::size_t j, double w) {
  if (i >= unary_.size() || j >= unary_.size())
    throw std::invalid_argument("edge endpoint out of range");
  if (i == j) throw std::invalid_argument("self-loop edge");
  check_finite(w, "edge weight");
  if (j < i) std::swap(i, j);
  const std::uint64_t key =
      static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(unary_.size()) + j;
  if (!edge_keys_.insert(key).second) throw std::invalid_argument("duplicate edge");
  edges_.push_back({i, j, w});
  adjacency_[i].emplace_back(j, w);
  adjacency_[j].emplace_back(i, w);
}

void PairwiseModel::set_const_offset(double c) {
  check_finite(c, "constant offset");
  const_offset_ = c;
}

void PairwiseModel::add_const_offset(double c) {
  check_finite(c, "constant offset");
  const_offset_ += c;
}

const std::vector<std::pair<std::size_t, double>>& PairwiseModel::neighbors(
    std::size_t i) const {
  if (i >= adjacency_.size()) throw std::invalid_argument("variable index out of range");
  return adjacency_[i];
}

bool operator==(const PairwiseModel& a, const PairwiseModel& b) {
  if (a.unary_ != b.unary_ || a.const_offset_ != b.const_offset_) return false;
  if (a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t k = 0; k < a.edges_.size(); ++k) {
    const Edge& ea = a.edges_[k];
    const Edge& eb = b.edges_[k];
    if (ea.i != eb.i || ea.j != eb.j || ea.w != eb.w) return false;
  }
  return true;
}

double theta_dot_phi(const PairwiseModel& model, const BitVec& x) {
  if (x.size() != model.num_vars())
    throw std::invalid_argument("theta_dot_phi: assignment length mismatch");
  double acc = model.const_offset();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) acc += model.unary(i);
  for (const Edge& e : model.edges())
    if (x[e.i] && x[e.j]) acc += e.w;
  return acc;
}

PairwiseModel ising_grid(std::size_t rows, std::size_t cols, double w_lo, double w_hi,
                         double f_lo, double f_hi, std::mt19937_64& rng) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("ising_grid: empty grid");
  if (w_lo > w_hi) throw std::invalid_argument("ising_grid: coupling range is empty");
  if (f_lo > f_hi) throw std::invalid_argument("ising_grid: field range is empty");
  check_finite(w_lo, "coupling bound");
  check_finite(w_hi, "coupling bound");
  check_finite(f_lo, "field bound");
  check_finite(f_hi, "field bound");

  const std::size_t n = rows * cols;
  PairwiseModel model(n);

  std::vector<double> field(n);
  for (std::size_t v = 0; v < n; ++v) field[v] = uniform_in(rng, f_lo, f_hi);

  // Spin-form energy per edge: w s_i s_j + f_i s_i + f_j s_j. Substituting
  // s = 2x - 1 gives 4w x_i x_j + (2f_i - 2w) x_i + (2f_j - 2w) x_j
  // + (w - f_i - f_j).
  auto add_spin_edge = [&](std::size_t i, std::size_t j, double w) {
    model.add_edge(i, j, 4.0 * w);
    model.add_unary(i, 2.0 * field[i] - 2.0 * w);
    model.add_unary(j, 2.0 * field[j] - 2.0 * w);
    model.add_const_offset(w - field[i] - field[j]);
  };

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) add_spin_edge(v, v + 1, uniform_in(rng, w_lo, w_hi));
      if (r + 1 < rows) add_spin_edge(v, v + cols, uniform_in(rng, w_lo, w_hi));
    }
  }
  return model;
}

PairwiseModel rbm_to_model(const RbmParams& p) {
  if (p.n_visible == 0 || p.n_hidden == 0)
    throw std::invalid_argument("rbm_to_model: empty layer");
  if (p.visible_bias.size() != p.n_visible || p.hidden_bias.size() != p.n_hidden ||
      p.weights.size() != p.n_visible * p.n_hidden)
    throw std::invalid_argument("rbm_to_model: parameter shape mismatch");

  PairwiseModel model(p.n_visible + p.n_hidden);
  for (std::size_t v = 0; v < p.n_visible; ++v) model.set_unary(v, p.visible_bias[v]);
  for (std::size_t h = 0; h < p.n_hidden; ++h)
    model.set_unary(p.n_visible + h, p.hidden_bias[h]);
  for (std::size_t h = 0; h < p.n_hidden; ++h) {
    for (std::size_t v = 0; v < p.n_visible; ++v) {
      const double w = p.weight(h, v);
      check_finite(w, "rbm weight");
      if (w != 0.0) model.add_edge(v, p.n_visible + h, w);
    }
  }
  return model;
}

namespace {

// Tokenized line of a model file with its 1-based number; comments stripped.
struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Line> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

double parse_double(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + tok + "'", line);
  }
}

std::size_t parse_index(const std::string& tok, std::size_t n, int line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ParseError("bad index '" + tok + "'", line);
  }
  if (v >= n) throw ParseError("index " + tok + " out of range (n=" + std::to_string(n) + ")",
                               line);
  return static_cast<std::size_t>(v);
}

std::size_t parse_count(const std::string& tok, int line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ParseError("bad count '" + tok + "'", line);
  }
  return static_cast<std::size_t>(v);
}

void expect_tokens(const Line& line, std::size_t want) {
  if (line.tokens.size() != want)
    throw ParseError("expected " + std::to_string(want) + " fields, got " +
                         std::to_string(line.tokens.size()),
                     line.number);
}

}  // namespace

PairwiseModel load_model(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("missing 'n' header", 1);

  PairwiseModel model;
  std::vector<char> unary_seen;
  bool have_n = false;
  bool have_const = false;

  for (const Line& line : lines) {
    const std::string& tag = line.tokens[0];
    if (tag == "n") {
      if (have_n) throw ParseError("duplicate 'n' header", line.number);
      expect_tokens(line, 2);
      const std::size_t n = parse_count(line.tokens[1], line.number);
      if (n == 0) throw ParseError("model must have at least one variable", line.number);
      model = PairwiseModel(n);
      unary_seen.assign(n, 0);
      have_n = true;
      continue;
    }
    if (!have_n) throw ParseError("'" + tag + "' record before 'n' header", line.number);
    if (tag == "u") {
      expect_tokens(line, 3);
      const std::size_t i = parse_index(line.tokens[1], model.num_vars(), line.number);
      if (unary_seen[i]) throw ParseError("duplicate unary weight for variable " +
                                              std::to_string(i),
                                          line.number);
      unary_seen[i] = 1;
      const double w = parse_double(line.tokens[2], line.number);
      try {
        model.set_unary(i, w);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line.number);
      }
    } else if (tag == "e") {
      expect_tokens(line, 4);
      const std::size_t i = parse_index(line.tokens[1], model.num_vars(), line.number);
      const std::size_t j = parse_index(line.tokens[2], model.num_vars(), line.number);
      const double w = parse_double(line.tokens[3], line.number);
      try {
        model.add_edge(i, j, w);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line.number);
      }
    } else if (tag == "k") {
      if (have_const) throw ParseError("duplicate constant offset", line.number);
      have_const = true;
      expect_tokens(line, 2);
      const double c = parse_double(line.tokens[1], line.number);
      try {
        model.set_const_offset(c);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line.number);
      }
    } else {
      throw ParseError("unknown record '" + tag + "'", line.number);
    }
  }
  if (!have_n) throw ParseError("missing 'n' header", 1);
  return model;
}

void save_model(const PairwiseModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "n " << model.num_vars() << "\n";
  for (std::size_t i = 0; i < model.num_vars(); ++i)
    out << "u " << i << " " << format_double(model.unary(i)) << "\n";
  for (const Edge& e : model.edges())
    out << "e " << e.i << " " << e.j << " " << format_double(e.w) << "\n";
  out << "k " << format_double(model.const_offset()) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

RbmParams load_rbm(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("missing 'rbm' header", 1);

  RbmParams p;
  bool have_header = false;
  std::vector<char> b_seen, c_seen, w_seen;

  for (const Line& line : lines) {
    const std::string& tag = line.tokens[0];
    if (tag == "rbm") {
      if (have_header) throw ParseError("duplicate 'rbm' header", line.number);
      expect_tokens(line, 3);
      p.n_visible = parse_count(line.tokens[1], line.number);
      p.n_hidden = parse_count(line.tokens[2], line.number);
      if (p.n_visible == 0 || p.n_hidden == 0)
        throw ParseError("rbm layers must be nonempty", line.number);
      p.visible_bias.assign(p.n_visible, 0.0);
      p.hidden_bias.assign(p.n_hidden, 0.0);
      p.weights.assign(p.n_visible * p.n_hidden, 0.0);
      b_seen.assign(p.n_visible, 0);
      c_seen.assign(p.n_hidden, 0);
      w_seen.assign(p.n_visible * p.n_hidden, 0);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("'" + tag + "' record before 'rbm' header", line.number);
    if (tag == "b") {
      expect_tokens(line, 3);
      const std::size_t j = parse_index(line.tokens[1], p.n_visible, line.number);
      if (b_seen[j]) throw ParseError("duplicate visible bias " + std::to_string(j), line.number);
      b_seen[j] = 1;
      p.visible_bias[j] = parse_double(line.tokens[2], line.number);
    } else if (tag == "c") {
      expect_tokens(line, 3);
      const std::size_t i = parse_index(line.tokens[1], p.n_hidden, line.number);
      if (c_seen[i]) throw ParseError("duplicate hidden bias " + std::to_string(i), line.number);
      c_seen[i] = 1;
      p.hidden_bias[i] = parse_double(line.tokens[2], line.number);
    } else if (tag == "w") {
      expect_tokens(line, 4);
      const std::size_t i = parse_index(line.tokens[1], p.n_hidden, line.number);
      const std::size_t j = parse_index(line.tokens[2], p.n_visible, line.number);
      if (w_seen[i * p.n_visible + j])
        throw ParseError("duplicate weight (" + std::to_string(i) + "," + std::to_string(j) + ")",
                         line.number);
      w_seen[i * p.n_visible + j] = 1;
      p.weights[i * p.n_visible + j] = parse_double(line.tokens[3], line.number);
    } else {
      throw ParseError("unknown record '" + tag + "'", line.number);
    }
  }
  return p;
}

PairwiseModel load_any_model(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty model file", 1);
  const std::string& tag = lines[0].tokens[0];
  if (tag == "rbm") return rbm_to_model(load_rbm(path));
  if (tag == "n") return load_model(path);
  throw ParseError("unrecognized header '" + tag + "' (expected 'n' or 'rbm')",
                   lines[0].number);
}

}  // namespace mfrp
