#include "mfrp/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace mfrp {

namespace {

struct NamedModel {
  PairwiseModel model;
  std::string id;
};

NamedModel resolve_model(const ExperimentConfig& cfg) {
  const bool from_file = !cfg.model_path.empty();
  const bool from_grid = cfg.grid.has_value();
  if (from_file == from_grid)
    throw std::invalid_argument("exactly one model source (file or grid) is required");
  if (from_file)
    return {load_any_model(cfg.model_path),
            std::filesystem::path(cfg.model_path).stem().string()};
  const GridSpec& g = *cfg.grid;
  auto eng = make_engine(derive_seed(cfg.seed, Stream::kModel));
  return {ising_grid(g.rows, g.cols, g.w_lo, g.w_hi, g.f_lo, g.f_hi, eng),
          "ising" + std::to_string(g.rows) + "x" + std::to_string(g.cols)};
}

// Measures f() when timing is on; reports 0 otherwise so report files stay
// byte-reproducible.
template <class F>
auto timed(bool timing, double& wall_ms, F&& f) {
  if (!timing) {
    wall_ms = 0.0;
    return f();
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto result = f();
  const std::chrono::duration<double, std::milli> dt =
      std::chrono::steady_clock::now() - t0;
  wall_ms = dt.count();
  return result;
}

ReportRow base_row(const ExperimentConfig& cfg, const std::string& model_id,
                   const std::string& method) {
  ReportRow row;
  row.model_id = model_id;
  row.method = method;
  row.seed = cfg.seed;
  return row;
}

std::vector<std::size_t> sweep_levels(const ExperimentConfig& cfg, std::size_t n,
                                      std::size_t lo) {
  const std::size_t hi = cfg.m_max.value_or(n);
  if (hi > n)
    throw std::invalid_argument("sweep: highest constraint level exceeds variable count");
  if (lo > hi) throw std::invalid_argument("sweep: empty constraint level range");
  std::vector<std::size_t> levels;
  levels.reserve(hi - lo + 1);
  for (std::size_t m = lo; m <= hi; ++m) levels.push_back(m);
  return levels;
}

void fill_ratio(std::vector<ReportRow>& rows, const std::optional<double>& mf_baseline) {
  if (!mf_baseline.has_value()) return;
  for (ReportRow& row : rows) row.log_ratio_vs_mf = row.estimate - *mf_baseline;
}

std::vector<ReportRow> run_sweep_like(const ExperimentConfig& cfg, const NamedModel& nm,
                                      bool compare) {
  const std::size_t n = nm.model.num_vars();
  const std::vector<std::size_t> levels = sweep_levels(cfg, n, compare ? 0 : cfg.m);

  double wall = 0.0;
  SweepResult sweep = timed(cfg.timing, wall, [&] {
    return mfrp_sweep(nm.model, levels, cfg.trials, cfg.restarts, cfg.solve, cfg.seed);
  });

  std::optional<double> baseline;
  if (levels.front() == 0) baseline = sweep.curve.front().aggregate_log;

  std::vector<ReportRow> rows;
  if (compare) {
    // the MF baseline is the m=0 entry of the very same sweep (same seeds)
    ReportRow mf = base_row(cfg, nm.id, "mf");
    mf.m = 0;
    mf.trials = static_cast<long long>(cfg.trials);
    mf.restarts = static_cast<long long>(cfg.restarts);
    mf.estimate = sweep.curve.front().aggregate_log;
    mf.wall_ms = cfg.timing ? sweep.curve.front().wall_ms : 0.0;
    rows.push_back(std::move(mf));
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ReportRow row = base_row(cfg, nm.id, "mfrp");
    row.m = static_cast<long long>(levels[i]);
    row.trials = static_cast<long long>(cfg.trials);
    row.restarts = static_cast<long long>(cfg.restarts);
    row.estimate = sweep.curve[i].aggregate_log;
    row.wall_ms = cfg.timing ? sweep.curve[i].wall_ms : 0.0;
    rows.push_back(std::move(row));
  }
  {
    ReportRow best = base_row(cfg, nm.id, "mfrp_sweep");
    best.m = static_cast<long long>(levels[sweep.best_index]);
    best.trials = static_cast<long long>(cfg.trials);
    best.restarts = static_cast<long long>(cfg.restarts);
    best.estimate = sweep.curve[sweep.best_index].aggregate_log;
    best.wall_ms = cfg.timing ? wall : 0.0;
    rows.push_back(std::move(best));
  }

  if (compare && n <= cfg.cap) {
    double exact_wall = 0.0;
    const double exact = timed(cfg.timing, exact_wall,
                               [&] { return exact_log_z(nm.model, cfg.cap); });
    for (ReportRow& row : rows) row.exact_log_z = exact;
    ReportRow ex = base_row(cfg, nm.id, "exact");
    ex.estimate = exact;
    ex.exact_log_z = exact;
    ex.wall_ms = exact_wall;
    rows.push_back(std::move(ex));
  }
  fill_ratio(rows, baseline);
  return rows;
}

}  // namespace

std::vector<ReportRow> run(const ExperimentConfig& cfg) {
  if (!cfg.seed_set) throw std::invalid_argument("a seed is required for reproducible runs");
  const NamedModel nm = resolve_model(cfg);
  const std::size_t n = nm.model.num_vars();

  switch (cfg.mode) {
    case Mode::kExact: {
      ReportRow row = base_row(cfg, nm.id, "exact");
      row.estimate = timed(cfg.timing, row.wall_ms,
                           [&] { return exact_log_z(nm.model, cfg.cap); });
      row.exact_log_z = row.estimate;
      return {row};
    }
    case Mode::kMf: {
      ReportRow row = base_row(cfg, nm.id, "mf");
      row.m = 0;
      row.trials = 1;
      row.restarts = static_cast<long long>(cfg.restarts);
      row.estimate = timed(cfg.timing, row.wall_ms, [&] {
                       return mf_estimate(nm.model, cfg.restarts, cfg.solve, cfg.seed);
                     }).elbo;
      return {row};
    }
    case Mode::kMfrp: {
      double wall = 0.0;
      const MfrpResult res = timed(cfg.timing, wall, [&] {
        return mfrp_run(nm.model, cfg.m, cfg.trials, cfg.restarts, cfg.solve, cfg.seed);
      });
      ReportRow row = base_row(cfg, nm.id, "mfrp");
      row.m = static_cast<long long>(cfg.m);
      row.trials = static_cast<long long>(cfg.trials);
      row.restarts = static_cast<long long>(cfg.restarts);
      row.estimate = res.estimate.aggregate_log;
      row.wall_ms = wall;
      ReportRow mean = row;
      mean.method = "mfrp_mean";
      mean.estimate = res.estimate.mean_aggregate_log;
      mean.wall_ms = 0.0;
      return {row, mean};
    }
    case Mode::kWish: {
      WishConfig wc;
      wc.trials = cfg.trials_explicit ? cfg.trials
                                      : wish_required_trials(n, cfg.delta, cfg.alpha);
      wc.delta = cfg.delta;
      wc.alpha = cfg.alpha;
      wc.seed = cfg.seed;
      ReportRow row = base_row(cfg, nm.id, "wish");
      row.trials = static_cast<long long>(wc.trials);
      row.estimate = timed(cfg.timing, row.wall_ms,
                           [&] { return wish_estimate(nm.model, wc, cfg.cap); });
      return {row};
    }
    case Mode::kSweep:
      return run_sweep_like(cfg, nm, /*compare=*/false);
    case Mode::kCompare:
      return run_sweep_like(cfg, nm, /*compare=*/true);
  }
  throw std::logic_error("unreachable mode");
}

namespace {

std::string csv_double(double v) { return format_double(v); }

std::string csv_opt_ll(const std::optional<long long>& v) {
  return v.has_value() ? std::to_string(*v) : std::string();
}

std::string csv_opt_double(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

nlohmann::ordered_json json_double(double v) {
  // JSON numbers cannot carry infinities; keep them readable as strings
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

nlohmann::ordered_json json_opt_double(const std::optional<double>& v) {
  if (!v.has_value()) return nullptr;
  return json_double(*v);
}

nlohmann::ordered_json json_opt_ll(const std::optional<long long>& v) {
  if (!v.has_value()) return nullptr;
  return *v;
}

}  // namespace

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out = "model,method,m,T,J,estimate,exact,log_ratio_vs_mf,wall_ms,seed\n";
  for (const ReportRow& r : rows) {
    out += r.model_id;
    out += ',';
    out += r.method;
    out += ',';
    out += csv_opt_ll(r.m);
    out += ',';
    out += csv_opt_ll(r.trials);
    out += ',';
    out += csv_opt_ll(r.restarts);
    out += ',';
    out += csv_double(r.estimate);
    out += ',';
    out += csv_opt_double(r.exact_log_z);
    out += ',';
    out += csv_opt_double(r.log_ratio_vs_mf);
    out += ',';
    out += csv_double(r.wall_ms);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::string render_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json obj;
    obj["model"] = r.model_id;
    obj["method"] = r.method;
    obj["m"] = json_opt_ll(r.m);
    obj["T"] = json_opt_ll(r.trials);
    obj["J"] = json_opt_ll(r.restarts);
    obj["estimate"] = json_double(r.estimate);
    obj["exact"] = json_opt_double(r.exact_log_z);
    obj["log_ratio_vs_mf"] = json_opt_double(r.log_ratio_vs_mf);
    obj["wall_ms"] = r.wall_ms;
    obj["seed"] = r.seed;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void write_report(const std::vector<ReportRow>& rows, const std::string& path,
                  ReportFormat format) {
  const std::string body = format == ReportFormat::kCsv ? render_csv(rows)
                                                        : render_json(rows);
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace mfrp
