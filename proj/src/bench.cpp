#include "sdec/bench.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdec/errors.hpp"
#include "sdec/parallel.hpp"

namespace sdec {

double CGrid::value(int i) const {
  if (count <= 1) return std::pow(10.0, log10_min);
  const double t = static_cast<double>(i) / (count - 1);
  return std::pow(10.0, log10_min + t * (log10_max - log10_min));
}

namespace {

/// Identity alignment for the non-blind problem (sources keep their slots).
Alignment identity_alignment(int ns) {
  Alignment al;
  al.perm.resize(ns);
  al.signs.assign(ns, 1.0);
  for (int n = 0; n < ns; ++n) al.perm[n] = n;
  return al;
}

std::vector<PowerSpectrum> oracle_spectra(const std::vector<Alm>& truth_ref) {
  std::vector<PowerSpectrum> spectra;
  spectra.reserve(truth_ref.size());
  for (const Alm& t : truth_ref) {
    PowerSpectrum ps = power_spectrum(t);
    double peak = 0.0;
    for (double v : ps.c) peak = std::max(peak, v);
    for (double& v : ps.c) v = std::max(v, 1e-12 * peak);
    spectra.push_back(std::move(ps));
  }
  return spectra;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

NonBlindOutcome nonblind_best(const Scene& scene, RegKind kind, const CGrid& grid) {
  const std::vector<Beam> norm_beams = normalize_to_best_channel(scene.beams);
  const Beam& best_beam = scene.beams.back();

  std::vector<Alm> truth_ref;
  truth_ref.reserve(scene.sources.size());
  for (const Alm& s : scene.sources) truth_ref.push_back(convolve(s, best_beam));

  const Alignment al = identity_alignment(static_cast<int>(scene.sources.size()));
  const std::vector<PowerSpectrum> spectra = oracle_spectra(truth_ref);
  const double noise_var = std::max(scene.noise_sigma * scene.noise_sigma, 1e-300);

  NonBlindOutcome out;
  out.best_nmse_db = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.count; ++i) {
    const double c = grid.value(i);
    RegStrategy strategy;
    strategy.kind = kind;
    strategy.c = c;
    if (kind == RegKind::Snr) {
      strategy.source_spectra = spectra;
      strategy.noise_variance = noise_var;
    }
    std::vector<Alm> s_hat;
    try {
      s_hat = update_s_tikhonov(scene.channels, scene.mixing, norm_beams, strategy);
    } catch (const SingularError&) {
      continue;  // c too small for this configuration
    }
    const double nmse = nmse_db(s_hat, scene.sources, best_beam, al);
    if (nmse > out.best_nmse_db) {
      out.best_nmse_db = nmse;
      out.best_c = c;
    }
  }
  if (!std::isfinite(out.best_nmse_db))
    throw SingularError("nonblind_best: no hyperparameter in the grid was solvable");
  return out;
}

std::vector<BenchAxisPoint> default_bench_points(const SceneConfig& base) {
  std::vector<BenchAxisPoint> points;
  for (double v : {0.0, 10.0, 20.0}) points.push_back({"snr", v});
  for (double v : {4.0, 8.0, 16.0}) points.push_back({"n_channels", v});
  for (double v : {1.5, 2.0, 5.0}) points.push_back({"cond", v});
  const double lm = base.lmax;
  for (double v : {lm / 16.0, lm / 8.0, lm / 4.0}) points.push_back({"min_resolution", v});
  return points;
}

namespace {

SceneConfig apply_axis(const SceneConfig& base, const BenchAxisPoint& point) {
  SceneConfig cfg = base;
  if (point.axis == "snr") {
    cfg.snr_db = point.value;
  } else if (point.axis == "n_channels") {
    cfg.n_channels = static_cast<int>(point.value);
  } else if (point.axis == "cond") {
    cfg.cond_target = point.value;
  } else if (point.axis == "min_resolution") {
    cfg.beam_lmin = static_cast<int>(point.value);
  } else {
    throw ConfigError("unknown benchmark axis: " + point.axis);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<BenchRow> bench_strategies(const StrategyBenchConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("bench_strategies: no seeds");
  const std::vector<BenchAxisPoint> points =
      cfg.points.empty() ? default_bench_points(cfg.base) : cfg.points;
  static constexpr RegKind kKinds[] = {RegKind::Naive, RegKind::EigMax, RegKind::EigFloor,
                                       RegKind::Snr};

  const int npoints = static_cast<int>(points.size());
  const int nseeds = static_cast<int>(cfg.seeds.size());
  // nmse[point][seed][strategy]
  std::vector<std::vector<std::array<double, 4>>> nmse(
      npoints, std::vector<std::array<double, 4>>(nseeds));

  parallel_for(npoints * nseeds, [&](int task) {
    const int p = task / nseeds;
    const int s = task % nseeds;
    SceneConfig scfg = apply_axis(cfg.base, points[p]);
    scfg.seed = cfg.seeds[s];
    const Scene scene = make_scene(scfg);
    for (int k = 0; k < 4; ++k)
      nmse[p][s][k] = nonblind_best(scene, kKinds[k], cfg.c_grid).best_nmse_db;
  });

  std::vector<BenchRow> rows;
  for (int p = 0; p < npoints; ++p) {
    std::array<double, 4> mean{};
    for (int s = 0; s < nseeds; ++s)
      for (int k = 0; k < 4; ++k) mean[k] += nmse[p][s][k];
    for (int k = 0; k < 4; ++k) mean[k] /= nseeds;
    for (int k = 0; k < 4; ++k) {
      BenchRow row;
      row.axis = points[p].axis;
      row.axis_value = points[p].value;
      row.strategy = kKinds[k];
      row.mean_nmse_db = mean[k];
      row.degradation_db = mean[k] - mean[3];  // vs strategy #4
      rows.push_back(row);
    }
  }
  return rows;
}

GridBenchResult run_grid(const GridBenchConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("run_grid: no seeds");
  const int nseeds = static_cast<int>(cfg.seeds.size());

  // Non-blind optima per seed, then geometric mean (the grid is log-spaced).
  std::vector<double> wu_opt(nseeds), ref_opt(nseeds);
  std::vector<Scene> scenes(nseeds);
  parallel_for(nseeds, [&](int s) {
    SceneConfig scfg = cfg.scene;
    scfg.seed = cfg.seeds[s];
    scenes[s] = make_scene(scfg);
    wu_opt[s] = nonblind_best(scenes[s], RegKind::EigFloor, cfg.c_grid).best_c;
    ref_opt[s] = nonblind_best(scenes[s], RegKind::Snr, cfg.c_grid).best_c;
  });
  double lw = 0.0, lr = 0.0;
  for (int s = 0; s < nseeds; ++s) {
    lw += std::log10(wu_opt[s]);
    lr += std::log10(ref_opt[s]);
  }
  GridBenchResult result;
  result.c_wu_opt = std::pow(10.0, lw / nseeds);
  result.c_ref_opt = std::pow(10.0, lr / nseeds);

  const int nwu = static_cast<int>(cfg.wu_exps.size());
  const int nref = static_cast<int>(cfg.ref_exps.size());
  std::vector<std::vector<double>> cell_nmse(nwu * nref, std::vector<double>(nseeds));
  std::vector<std::vector<double>> cell_ca(nwu * nref, std::vector<double>(nseeds));

  parallel_for(nwu * nref * nseeds, [&](int task) {
    const int cell = task / nseeds;
    const int s = task % nseeds;
    const double wu_exp = cfg.wu_exps[cell / nref];
    const double ref_exp = cfg.ref_exps[cell % nref];

    SolverConfig sv = cfg.solver;
    sv.n_sources = cfg.scene.n_sources;
    sv.c_wu_start = std::pow(10.0, wu_exp) * result.c_wu_opt;
    sv.c_wu_end = std::pow(10.0, wu_exp - 1.0) * result.c_wu_opt;
    sv.c_ref = std::pow(10.0, ref_exp) * result.c_ref_opt;

    const Scene& scene = scenes[s];
    const std::vector<Beam> norm_beams = normalize_to_best_channel(scene.beams);
    const SolverState state = solve(scene.channels, norm_beams, sv, scene.noise_sigma);
    const Alignment al = align(state.a, scene.mixing);
    cell_nmse[cell][s] = nmse_db(state.s, scene.sources, scene.beams.back(), al);
    cell_ca[cell][s] = ca_db(state.a, scene.mixing);
  });

  for (int cell = 0; cell < nwu * nref; ++cell) {
    GridCell c;
    c.wu_exp = cfg.wu_exps[cell / nref];
    c.ref_exp = cfg.ref_exps[cell % nref];
    c.c_wu_start = std::pow(10.0, c.wu_exp) * result.c_wu_opt;
    c.c_wu_end = std::pow(10.0, c.wu_exp - 1.0) * result.c_wu_opt;
    c.c_ref = std::pow(10.0, c.ref_exp) * result.c_ref_opt;
    for (int s = 0; s < nseeds; ++s) {
      c.mean_nmse_db += cell_nmse[cell][s];
      c.mean_ca_db += cell_ca[cell][s];
    }
    c.mean_nmse_db /= nseeds;
    c.mean_ca_db /= nseeds;
    result.cells.push_back(c);
  }
  return result;
}

RunOutcome run_scene(const Scene& scene, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();

  RunOutcome out;
  out.seed = scene.config.seed;
  out.c_wu = options.solver.c_wu_start;
  out.c_ref = options.solver.c_ref;

  if (options.mode == RunMode::SDec) {
    out.strategy = to_string(options.solver.warmup_kind) + "->" +
                   to_string(options.solver.refinement_kind);
    const std::vector<Beam> norm_beams = normalize_to_best_channel(scene.beams);
    out.state = solve(scene.channels, norm_beams, options.solver, scene.noise_sigma);
    const Alignment al = align(out.state.a, scene.mixing);
    out.nmse_best_db = nmse_db(out.state.s, scene.sources, scene.beams.back(), al);
    const std::vector<Alm> degraded = degrade_to_worst(out.state.s, scene.beams);
    out.nmse_worse_db = nmse_db(degraded, scene.sources, scene.beams.front(), al);
  } else {
    out.strategy = "gmca";
    // Deteriorate every channel to the common worst resolution beforehand.
    const int lmax = scene.channels.front().lmax();
    std::vector<Alm> degraded_channels;
    degraded_channels.reserve(scene.channels.size());
    for (std::size_t nu = 0; nu < scene.channels.size(); ++nu) {
      Beam ratio(lmax);
      for (int l = 0; l <= lmax; ++l) {
        if (!(scene.beams[nu].h[l] > 0.0))
          throw ConfigError("gmca degradation: channel beam vanishes");
        ratio.h[l] = scene.beams.front().h[l] / scene.beams[nu].h[l];
      }
      degraded_channels.push_back(convolve(scene.channels[nu], ratio));
    }
    out.state = gmca_baseline(degraded_channels, options.solver, scene.noise_sigma);
    const Alignment al = align(out.state.a, scene.mixing);
    out.nmse_best_db = std::numeric_limits<double>::quiet_NaN();  // no deconvolution
    out.nmse_worse_db = nmse_db(out.state.s, scene.sources, scene.beams.front(), al);
  }
  out.ca_db_value = ca_db(out.state.a, scene.mixing);
  out.iters = out.state.iter;

  if (options.stamp_timing) {
    out.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output + schema validation
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMetricsHeader =
    "seed,strategy,c_wu,c_ref,nmse_best_db,nmse_worse_db,ca_db,iters,wallclock_s";
constexpr const char* kHistoryHeader =
    "iter,phase,objective,rel_change,c_effective,mean_epsilon";
constexpr const char* kBenchHeader = "axis,axis_value,strategy,mean_nmse_db,degradation_db";
constexpr const char* kGridHeader =
    "c_wu_exp,c_ref_exp,c_wu_start,c_wu_end,c_ref,mean_nmse_db,mean_ca_db";

std::ofstream open_csv(const std::string& path, const std::string& kind,
                       const char* header) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path);
  f << "# schema: " << kind << "/v1\n" << header << "\n";
  return f;
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<RunOutcome>& rows) {
  auto f = open_csv(path, "metrics", kMetricsHeader);
  for (const RunOutcome& r : rows) {
    f << r.seed << "," << r.strategy << "," << fmt(r.c_wu) << "," << fmt(r.c_ref) << ","
      << fmt(r.nmse_best_db) << "," << fmt(r.nmse_worse_db) << "," << fmt(r.ca_db_value)
      << "," << r.iters << "," << fmt(r.wallclock_s) << "\n";
  }
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  auto f = open_csv(path, "bench", kBenchHeader);
  for (const BenchRow& r : rows) {
    f << r.axis << "," << fmt(r.axis_value) << "," << to_string(r.strategy) << ","
      << fmt(r.mean_nmse_db) << "," << fmt(r.degradation_db) << "\n";
  }
}

void write_grid_csv(const std::string& path, const GridBenchResult& result) {
  auto f = open_csv(path, "grid", kGridHeader);
  for (const GridCell& c : result.cells) {
    f << fmt(c.wu_exp) << "," << fmt(c.ref_exp) << "," << fmt(c.c_wu_start) << ","
      << fmt(c.c_wu_end) << "," << fmt(c.c_ref) << "," << fmt(c.mean_nmse_db) << ","
      << fmt(c.mean_ca_db) << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream in(line);
  while (std::getline(in, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parses_as_double(const std::string& s) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    (void)std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string schema_check(const std::string& path, const std::string& kind) {
  const char* header = nullptr;
  // Column indices that must parse as numbers (the rest are free-form).
  std::vector<int> numeric;
  if (kind == "metrics") {
    header = kMetricsHeader;
    numeric = {0, 2, 3, 4, 5, 6, 7, 8};
  } else if (kind == "history") {
    header = kHistoryHeader;
    numeric = {0, 2, 3, 4, 5};
  } else if (kind == "bench") {
    header = kBenchHeader;
    numeric = {1, 3, 4};
  } else if (kind == "grid") {
    header = kGridHeader;
    numeric = {0, 1, 2, 3, 4, 5, 6};
  } else {
    return "unknown schema kind: " + kind;
  }

  std::ifstream f(path);
  if (!f) return "cannot open " + path;
  std::string line;
  if (!std::getline(f, line)) return "empty file";
  if (line != "# schema: " + kind + "/v1")
    return "schema line mismatch: got '" + line + "'";
  if (!std::getline(f, line)) return "missing header row";
  if (line != header) return "header mismatch: got '" + line + "'";
  const std::size_t ncols = split_csv(header).size();

  int rowno = 2;
  while (std::getline(f, line)) {
    ++rowno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != ncols)
      return "row " + std::to_string(rowno) + ": expected " + std::to_string(ncols) +
             " fields, got " + std::to_string(fields.size());
    for (int idx : numeric)
      if (!parses_as_double(fields[idx]))
        return "row " + std::to_string(rowno) + ": field " + std::to_string(idx + 1) +
               " is not numeric: '" + fields[idx] + "'";
  }
  return "";
}

}  // namespace sdec
