#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfrp/exact.hpp"
#include "mfrp/meanfield.hpp"
#include "mfrp/mfrp.hpp"
#include "mfrp/model.hpp"

namespace mfrp {

enum class Mode { kMf, kMfrp, kExact, kWish, kSweep, kCompare };
enum class ReportFormat { kCsv, kJson };

struct GridSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double w_lo = -10.0;
  double w_hi = 10.0;
  double f_lo = -1.0;
  double f_hi = 1.0;
};

struct ExperimentConfig {
  Mode mode = Mode::kMf;
  std::string model_path;        // pairwise or RBM text file ...
  std::optional<GridSpec> grid;  // ... or a generated Ising grid (exactly one)

  std::size_t m = 0;                 // constraint count (mfrp) / lowest level (sweep)
  std::optional<std::size_t> m_max;  // highest sweep level; defaults to n
  std::size_t trials = 5;            // T
  std::size_t restarts = 10;         // J
  bool trials_explicit = false;      // wish: T given by the user vs. derived
  SolveOptions solve;
  double delta = 0.1;     // wish failure probability
  double alpha = 0.0042;  // wish concentration constant
  std::uint64_t seed = 0;
  bool seed_set = false;  // runs refuse to start without an explicit seed
  std::size_t cap = kDefaultEnumerationCap;
  std::string out_path;  // empty or "-" writes to stdout
  ReportFormat format = ReportFormat::kCsv;
  bool timing = false;  // fill wall_ms with measured times (breaks byte-reproducibility)
};

struct ReportRow {
  std::string model_id;
  std::string method;
  std::optional<long long> m;
  std::optional<long long> trials;
  std::optional<long long> restarts;
  double estimate = 0.0;
  std::optional<double> exact_log_z;
  std::optional<double> log_ratio_vs_mf;  // estimate - MF baseline, when one exists
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
};

std::vector<ReportRow> run(const ExperimentConfig& cfg);

std::string render_csv(const std::vector<ReportRow>& rows);
std::string render_json(const std::vector<ReportRow>& rows);

// path empty or "-" writes to stdout.
void write_report(const std::vector<ReportRow>& rows, const std::string& path,
                  ReportFormat format);

}  // namespace mfrp
