#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "mfrp/errors.hpp"
#include "mfrp/model.hpp"
#include "mfrp/rng.hpp"
#include "testutil.hpp"

using namespace mfrp;

namespace {

// Unique temp path per test run; cleaned up by the fixture guard below.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& body) const {
    std::ofstream out(path);
    out << body;
  }
};

}  // namespace

TEST_CASE("theta_dot_phi on a hand-built model") {
  PairwiseModel model(3);
  model.set_unary(0, 1.0);
  model.set_unary(2, -2.0);
  model.add_edge(0, 1, 0.5);
  model.add_edge(2, 1, 3.0);  // normalized to (1,2)
  model.set_const_offset(0.25);

  CHECK(theta_dot_phi(model, testutil::bits({0, 0, 0})) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(theta_dot_phi(model, testutil::bits({1, 1, 0})) ==
        doctest::Approx(0.25 + 1.0 + 0.5).epsilon(1e-15));
  CHECK(theta_dot_phi(model, testutil::bits({1, 1, 1})) ==
        doctest::Approx(0.25 + 1.0 - 2.0 + 0.5 + 3.0).epsilon(1e-15));
  CHECK(model.edges()[1].i == 1);
  CHECK(model.edges()[1].j == 2);
}

TEST_CASE("theta_dot_phi matches the pedestrian evaluation") {
  auto rng = make_engine(21);
  for (int round = 0; round < 10; ++round) {
    const PairwiseModel model = testutil::random_model(6, rng);
    for (std::uint64_t i = 0; i < 64; ++i) {
      const BitVec x = testutil::nth_assignment(i, 6);
      CHECK(theta_dot_phi(model, x) ==
            doctest::Approx(testutil::energy_of(model, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("model validation") {
  PairwiseModel model(3);
  CHECK_THROWS_AS(model.set_unary(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(model.set_unary(0, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_THROWS_AS(model.add_edge(1, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(model.add_edge(0, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(model.add_edge(0, 1, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  model.add_edge(0, 1, 1.0);
  CHECK_THROWS_AS(model.add_edge(1, 0, 2.0), std::invalid_argument);  // either order
  CHECK_THROWS_AS(theta_dot_phi(model, testutil::bits({0, 1})), std::invalid_argument);
}

TEST_CASE("grid shape and edge count") {
  auto rng = make_engine(5);
  const PairwiseModel g33 = ising_grid(3, 3, -1, 1, -1, 1, rng);
  CHECK(g33.num_vars() == 9);
  CHECK(g33.edges().size() == 12);
  const PairwiseModel g11 = ising_grid(1, 1, -1, 1, -1, 1, rng);
  CHECK(g11.num_vars() == 1);
  CHECK(g11.edges().empty());
  CHECK_THROWS_AS(ising_grid(0, 3, -1, 1, -1, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(ising_grid(2, 2, 1, -1, -1, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(ising_grid(2, 2, -1, 1, 1, -1, rng), std::invalid_argument);
}

TEST_CASE("grid generation is deterministic in the seed") {
  auto rng1 = make_engine(77);
  auto rng2 = make_engine(77);
  CHECK(ising_grid(3, 4, -2, 2, -1, 1, rng1) == ising_grid(3, 4, -2, 2, -1, 1, rng2));
}

TEST_CASE("degenerate ranges pin the spin parameters") {
  // with w and f forced to constants the conversion is checkable by hand:
  // theta_ij = 4w, theta_i = 2 f deg(i) - 2 w deg(i), const = E (w - 2f)
  auto rng = make_engine(3);
  const double w = 2.0;
  const double f = 0.5;
  const PairwiseModel grid = ising_grid(2, 2, w, w, f, f, rng);
  CHECK(grid.edges().size() == 4);
  for (const Edge& e : grid.edges()) CHECK(e.w == doctest::Approx(4.0 * w));
  for (std::size_t v = 0; v < 4; ++v)
    CHECK(grid.unary(v) == doctest::Approx(2.0 * f * 2 - 2.0 * w * 2));
  CHECK(grid.const_offset() == doctest::Approx(4.0 * (w - 2.0 * f)));
}

TEST_CASE("grid energies equal the spin-form energies") {
  auto rng = make_engine(31);
  const double w = -1.25;
  const double f = 0.75;
  const std::size_t rows = 3;
  const std::size_t cols = 3;
  const PairwiseModel grid = ising_grid(rows, cols, w, w, f, f, rng);
  const std::size_t n = rows * cols;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
    const BitVec x = testutil::nth_assignment(i, n);
    auto spin = [&](std::size_t v) { return 2.0 * x[v] - 1.0; };
    double energy = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t v = r * cols + c;
        if (c + 1 < cols) energy += w * spin(v) * spin(v + 1) + f * spin(v) + f * spin(v + 1);
        if (r + 1 < rows)
          energy += w * spin(v) * spin(v + cols) + f * spin(v) + f * spin(v + cols);
      }
    }
    CHECK(theta_dot_phi(grid, x) == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("1x2 grid with unit coupling has the textbook partition value") {
  auto rng = make_engine(8);
  const PairwiseModel grid = ising_grid(1, 2, 1, 1, 0, 0, rng);
  // Z = 2 e^w + 2 e^-w for a single coupled pair without fields
  CHECK(testutil::brute_log_z(grid) ==
        doctest::Approx(std::log(2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("rbm flattening") {
  RbmParams p;
  p.n_visible = 2;
  p.n_hidden = 3;
  p.visible_bias = {0.0, 0.0};
  p.hidden_bias = {0.0, 0.0, 0.0};
  p.weights.assign(6, 0.0);
  // fully decoupled: log Z = (n_v + n_h) log 2
  CHECK(testutil::brute_log_z(rbm_to_model(p)) ==
        doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-12));

  p.weights[0 * 2 + 1] = 2.5;  // hidden 0 -- visible 1
  const PairwiseModel m = rbm_to_model(p);
  CHECK(m.num_vars() == 5);
  CHECK(m.edges().size() == 1);
  CHECK(m.edges()[0].i == 1);
  CHECK(m.edges()[0].j == 2);  // hidden 0 lives at n_visible + 0
  CHECK(m.edges()[0].w == 2.5);
}

TEST_CASE("rbm partition mass matches a bipartite enumeration") {
  auto rng = make_engine(17);
  RbmParams p;
  p.n_visible = 4;
  p.n_hidden = 3;
  for (std::size_t v = 0; v < p.n_visible; ++v)
    p.visible_bias.push_back(uniform_in(rng, -1, 1));
  for (std::size_t h = 0; h < p.n_hidden; ++h)
    p.hidden_bias.push_back(uniform_in(rng, -1, 1));
  for (std::size_t k = 0; k < p.n_visible * p.n_hidden; ++k)
    p.weights.push_back(uniform_in(rng, -1, 1));

  double acc = kNegInf;
  for (std::uint64_t vi = 0; vi < 16; ++vi) {
    for (std::uint64_t hi = 0; hi < 8; ++hi) {
      double e = 0.0;
      for (std::size_t v = 0; v < 4; ++v)
        if ((vi >> v) & 1) e += p.visible_bias[v];
      for (std::size_t h = 0; h < 3; ++h)
        if ((hi >> h) & 1) e += p.hidden_bias[h];
      for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t v = 0; v < 4; ++v)
          if (((hi >> h) & 1) && ((vi >> v) & 1)) e += p.weight(h, v);
      acc = log_add(acc, e);
    }
  }
  CHECK(testutil::brute_log_z(rbm_to_model(p)) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("rbm shape validation") {
  RbmParams p;
  p.n_visible = 2;
  p.n_hidden = 1;
  p.visible_bias = {0.0, 0.0};
  p.hidden_bias = {0.0};
  p.weights = {0.0};  // should be 2 entries
  CHECK_THROWS_AS(rbm_to_model(p), std::invalid_argument);
  p.weights = {0.0, 0.0};
  p.n_hidden = 0;
  CHECK_THROWS_AS(rbm_to_model(p), std::invalid_argument);
}

TEST_CASE("model files round-trip exactly") {
  auto rng = make_engine(41);
  const PairwiseModel model = testutil::random_model(7, rng);
  const TempFile file("mfrp_test_roundtrip.model");
  save_model(model, file.path);
  const PairwiseModel loaded = load_model(file.path);
  CHECK(model == loaded);

  // saving the loaded model reproduces the bytes
  const TempFile file2("mfrp_test_roundtrip2.model");
  save_model(loaded, file2.path);
  std::ifstream a(file.path), b(file2.path);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("model file parsing accepts comments and blank lines") {
  const TempFile file("mfrp_test_comments.model");
  file.write("# a model\n\nn 3\nu 0 1.5 # trailing comment\ne 0 2 -1\nk 0.25\n");
  const PairwiseModel m = load_any_model(file.path);
  CHECK(m.num_vars() == 3);
  CHECK(m.unary(0) == 1.5);
  CHECK(m.unary(1) == 0.0);
  CHECK(m.edges().size() == 1);
  CHECK(m.const_offset() == 0.25);
}

TEST_CASE("model file parse errors carry line numbers") {
  const TempFile file("mfrp_test_bad.model");
  auto load = [&] { load_model(file.path); };

  file.write("u 0 1\nn 2\n");
  CHECK(testutil::throws_with<ParseError>(load, "line 1"));

  file.write("n 2\nu 0 abc\n");
  CHECK(testutil::throws_with<ParseError>(load, "line 2"));

  file.write("n 2\ne 0 0 1\n");
  CHECK(testutil::throws_with<ParseError>(load, "self-loop"));

  file.write("n 2\ne 0 1 1\ne 1 0 2\n");
  CHECK(testutil::throws_with<ParseError>(load, "duplicate edge"));

  file.write("n 2\nu 1 7\nu 1 7\n");
  CHECK(testutil::throws_with<ParseError>(load, "duplicate unary"));

  file.write("n 2\nq 1\n");
  CHECK(testutil::throws_with<ParseError>(load, "unknown record"));

  file.write("n 2\nu 5 1\n");
  CHECK(testutil::throws_with<ParseError>(load, "out of range"));

  file.write("# nothing\n");
  CHECK_THROWS_AS(load_model(file.path), ParseError);

  CHECK_THROWS_AS(load_model("/nonexistent/path.model"), std::runtime_error);
}

TEST_CASE("rbm files load and dispatch") {
  const TempFile file("mfrp_test_rbm.model");
  file.write(
      "# tiny rbm\n"
      "rbm 2 2\n"
      "b 0 0.5\n"
      "c 1 -0.25\n"
      "w 0 0 1.5\n"
      "w 1 1 -2\n");
  const RbmParams p = load_rbm(file.path);
  CHECK(p.n_visible == 2);
  CHECK(p.n_hidden == 2);
  CHECK(p.visible_bias[0] == 0.5);
  CHECK(p.visible_bias[1] == 0.0);
  CHECK(p.hidden_bias[1] == -0.25);
  CHECK(p.weight(0, 0) == 1.5);
  CHECK(p.weight(1, 1) == -2.0);

  const PairwiseModel m = load_any_model(file.path);
  CHECK(m.num_vars() == 4);
  CHECK(m.edges().size() == 2);
  CHECK(m.unary(2) == 0.0);  // hidden 0 bias defaulted

  file.write("rbm 2 2\nw 0 0 1\nw 0 0 2\n");
  CHECK(testutil::throws_with<ParseError>([&] { load_rbm(file.path); }, "duplicate weight"));

  file.write("rbm 0 2\n");
  CHECK_THROWS_AS(load_rbm(file.path), ParseError);

  file.write("bogus 1 2\n");
  CHECK(testutil::throws_with<ParseError>([&] { load_any_model(file.path); },
                                          "unrecognized header"));
}
