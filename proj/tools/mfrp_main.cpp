#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "mfrp/errors.hpp"
#include "mfrp/harness.hpp"

namespace {

// "RxC" -> (rows, cols)
mfrp::GridSpec parse_grid(const std::string& text) {
  const std::size_t x = text.find_first_of("xX");
  if (x == std::string::npos || x == 0 || x + 1 >= text.size())
    throw CLI::ValidationError("--grid", "expected ROWSxCOLS, e.g. 6x6");
  mfrp::GridSpec g;
  try {
    std::size_t used = 0;
    g.rows = std::stoull(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    g.cols = std::stoull(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "expected ROWSxCOLS, e.g. 6x6");
  }
  return g;
}

// "lo,hi" -> pair of doubles
std::pair<double, double> parse_range(const std::string& flag, const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError(flag, "expected LO,HI, e.g. -10,10");
  try {
    std::size_t used = 0;
    const double lo = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    const double hi = std::stod(text.substr(comma + 1), &used);
    if (used != text.size() - comma - 1) throw std::invalid_argument("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "expected LO,HI, e.g. -10,10");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lower bounds on log partition functions of pairwise binary models:\n"
      "mean field sharpened by random parity projections, plus exact and\n"
      "projection-based reference estimators."};

  std::string mode_text;
  std::string model_path;
  std::string grid_text;
  std::string w_range = "-10,10";
  std::string f_range = "-1,1";
  std::string format_text = "csv";
  mfrp::ExperimentConfig cfg;
  long long m = 0;
  long long m_max = -1;
  long long trials = 5;
  long long restarts = 10;
  long long max_sweeps = 1000;
  long long cap = static_cast<long long>(mfrp::kDefaultEnumerationCap);

  app.add_option("--mode", mode_text, "mf | mfrp | exact | wish | sweep | compare")
      ->required();
  app.add_option("--model", model_path, "model file (pairwise 'n ...' or 'rbm ...' format)");
  app.add_option("--grid", grid_text, "generate a random Ising grid, ROWSxCOLS");
  app.add_option("--w-range", w_range, "grid coupling range LO,HI (default -10,10)");
  app.add_option("--f-range", f_range, "grid field range LO,HI (default -1,1)");
  app.add_option("--m", m, "parity constraint count (mfrp), or lowest level (sweep)");
  app.add_option("--m-max", m_max, "highest sweep level (default: number of variables)");
  auto* trials_opt = app.add_option("--T", trials, "trials per constraint level (default 5)");
  app.add_option("--J", restarts, "restarts per solve (default 10)");
  app.add_option("--tol", cfg.solve.tol, "per-sweep convergence threshold (default 1e-8)");
  app.add_option("--max-sweeps", max_sweeps, "sweep budget per solve (default 1000)");
  app.add_option("--timeout", cfg.solve.timeout_s,
                 "wall-clock budget per solve in seconds (0 = off)");
  app.add_option("--seed", cfg.seed, "master seed (required)")->required();
  app.add_option("--out", cfg.out_path, "output path ('-' or empty for stdout)");
  app.add_option("--format", format_text, "csv | json (default csv)");
  app.add_option("--delta", cfg.delta, "wish failure probability (default 0.1)");
  app.add_option("--alpha", cfg.alpha, "wish concentration constant (default 0.0042)");
  app.add_option("--cap", cap, "enumeration refusal cap in variables (default 25)");
  app.add_flag("--timing", cfg.timing,
               "record measured wall times (reports stop being byte-reproducible)");

  try {
    app.parse(argc, argv);

    static const std::map<std::string, mfrp::Mode> modes = {
        {"mf", mfrp::Mode::kMf},       {"mfrp", mfrp::Mode::kMfrp},
        {"exact", mfrp::Mode::kExact}, {"wish", mfrp::Mode::kWish},
        {"sweep", mfrp::Mode::kSweep}, {"compare", mfrp::Mode::kCompare}};
    const auto mode_it = modes.find(mode_text);
    if (mode_it == modes.end())
      throw CLI::ValidationError("--mode", "unknown mode '" + mode_text + "'");
    cfg.mode = mode_it->second;

    if (!grid_text.empty()) {
      mfrp::GridSpec g = parse_grid(grid_text);
      std::tie(g.w_lo, g.w_hi) = parse_range("--w-range", w_range);
      std::tie(g.f_lo, g.f_hi) = parse_range("--f-range", f_range);
      cfg.grid = g;
    }
    cfg.model_path = model_path;

    if (m < 0 || trials < 1 || restarts < 1 || max_sweeps < 1 || cap < 0)
      throw CLI::ValidationError("flags", "m/T/J/max-sweeps/cap out of range");
    cfg.m = static_cast<std::size_t>(m);
    if (m_max >= 0) cfg.m_max = static_cast<std::size_t>(m_max);
    cfg.trials = static_cast<std::size_t>(trials);
    cfg.trials_explicit = trials_opt->count() > 0;
    cfg.restarts = static_cast<std::size_t>(restarts);
    cfg.solve.max_sweeps = static_cast<int>(max_sweeps);
    cfg.cap = static_cast<std::size_t>(cap);
    cfg.seed_set = true;

    if (format_text == "csv") {
      cfg.format = mfrp::ReportFormat::kCsv;
    } else if (format_text == "json") {
      cfg.format = mfrp::ReportFormat::kJson;
    } else {
      throw CLI::ValidationError("--format", "expected csv or json");
    }

    const auto rows = mfrp::run(cfg);
    mfrp::write_report(rows, cfg.out_path, cfg.format);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mfrp::CapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
