#ifndef SDEC_BENCH_HPP_
#define SDEC_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sdec/metrics.hpp"
#include "sdec/simulate.hpp"
#include "sdec/solver.hpp"

namespace sdec {

/// Log-spaced hyperparameter search grid.
struct CGrid {
  double log10_min = -6.0;
  double log10_max = 2.0;
  int count = 17;

  double value(int i) const;
};

// ---------------------------------------------------------------------------
// Non-blind strategy benchmark (Table-1 shape): the final S-update is run
// with the true mixing matrix and a per-strategy optimal hyperparameter;
// strategy #4 gets the oracle spectra of the best-resolution ground truth.
// ---------------------------------------------------------------------------

struct NonBlindOutcome {
  double best_nmse_db = 0.0;
  double best_c = 0.0;
};

/// Best NMSE over the c grid for one scene and one strategy kind.
NonBlindOutcome nonblind_best(const Scene& scene, RegKind kind, const CGrid& grid);

struct BenchAxisPoint {
  std::string axis;
  double value = 0.0;
};

struct BenchRow {
  std::string axis;
  double axis_value = 0.0;
  RegKind strategy = RegKind::Naive;
  double mean_nmse_db = 0.0;
  double degradation_db = 0.0;  // vs strategy #4; 0 for #4 itself
};

struct StrategyBenchConfig {
  SceneConfig base;
  std::vector<std::uint64_t> seeds;
  CGrid c_grid;
  std::vector<BenchAxisPoint> points;  // defaults cover snr / n_channels / cond / min_resolution
};

std::vector<BenchAxisPoint> default_bench_points(const SceneConfig& base);
std::vector<BenchRow> bench_strategies(const StrategyBenchConfig& cfg);

// ---------------------------------------------------------------------------
// (c_wu, c_ref) sensitivity grid (Table-2 shape), as decade multiples of the
// grid-searched non-blind optima.
// ---------------------------------------------------------------------------

struct GridBenchConfig {
  SceneConfig scene;
  SolverConfig solver;
  std::vector<std::uint64_t> seeds;
  std::vector<double> wu_exps = {0.5, 1.0, 1.5};   // c_wu decays from 10^e to 10^(e-1) times opt
  std::vector<double> ref_exps = {-1.0, -0.5, 0.0, 0.5, 1.0};
  CGrid c_grid;
};

struct GridCell {
  double wu_exp = 0.0;
  double ref_exp = 0.0;
  double c_wu_start = 0.0;
  double c_wu_end = 0.0;
  double c_ref = 0.0;
  double mean_nmse_db = 0.0;
  double mean_ca_db = 0.0;
};

struct GridBenchResult {
  double c_wu_opt = 0.0;   // geometric mean over seeds of the non-blind #3 optimum
  double c_ref_opt = 0.0;  // same for #4
  std::vector<GridCell> cells;
};

GridBenchResult run_grid(const GridBenchConfig& cfg);

// ---------------------------------------------------------------------------
// Single solver run + metrics (one metrics CSV row).
// ---------------------------------------------------------------------------

enum class RunMode { SDec, Gmca };

struct RunOptions {
  SolverConfig solver;
  RunMode mode = RunMode::SDec;
  bool stamp_timing = false;  // off: wallclock_s written as 0 so outputs are bit-stable
};

struct RunOutcome {
  std::uint64_t seed = 0;
  std::string strategy;
  double c_wu = 0.0;
  double c_ref = 0.0;
  double nmse_best_db = 0.0;   // NaN when the mode cannot deconvolve
  double nmse_worse_db = 0.0;
  double ca_db_value = 0.0;
  int iters = 0;
  double wallclock_s = 0.0;
  SolverState state;
};

RunOutcome run_scene(const Scene& scene, const RunOptions& options);

// CSV writers (schema-versioned; see schema_check).
void write_metrics_csv(const std::string& path, const std::vector<RunOutcome>& rows);
void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);
void write_grid_csv(const std::string& path, const GridBenchResult& result);

/// Validates the first schema line, header row and field count/types of a
/// CSV produced by this project. kind: metrics | history | bench | grid.
/// Returns an empty string when valid, else a description of the problem.
std::string schema_check(const std::string& path, const std::string& kind);

}  // namespace sdec

#endif  // SDEC_BENCH_HPP_
