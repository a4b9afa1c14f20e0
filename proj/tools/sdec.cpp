// sdec: scene simulation, solver runs, strategy benchmarks, hyperparameter
// grids and map rendering for sphere-sampled joint deconvolution + BSS.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdec/bench.hpp"
#include "sdec/config.hpp"
#include "sdec/errors.hpp"
#include "sdec/io.hpp"
#include "sdec/metrics.hpp"
#include "sdec/parallel.hpp"
#include "sdec/simulate.hpp"
#include "sdec/solver.hpp"

namespace fs = std::filesystem;

namespace {

sdec::KvConfig load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  sdec::KvConfig cfg;
  if (!config_path.empty()) cfg = sdec::KvConfig::parse_file(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw sdec::ConfigError("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides,
                 int seed_flag, const std::string& out_dir) {
  sdec::KvConfig cfg = load_config(config_path, overrides);
  if (seed_flag >= 0) cfg.set("scene.seed", std::to_string(seed_flag));
  sdec::SceneConfig scene_cfg = sdec::scene_from_config(cfg);
  const sdec::Scene scene = sdec::make_scene(scene_cfg);
  sdec::save_scene(out_dir, scene);
  std::cout << "scene written to " << out_dir << " (seed " << scene_cfg.seed << ", "
            << scene_cfg.n_sources << " sources, " << scene_cfg.n_channels
            << " channels)\n";
  if (!scene.mixing_converged)
    std::cerr << "warning: mixing-matrix conditioning did not converge to target\n";
  return 0;
}

int cmd_run(const std::string& scene_dir, const std::string& config_path,
            const std::vector<std::string>& overrides, const std::string& out_dir,
            const std::string& baseline, const std::string& strategy, bool stamp_timing) {
  sdec::KvConfig cfg = load_config(config_path, overrides);
  if (!strategy.empty()) cfg.set("solver.strategy", strategy);

  std::vector<sdec::Scene> scenes;
  if (!scene_dir.empty()) {
    scenes.push_back(sdec::load_scene(scene_dir));
  } else {
    const sdec::SceneConfig base = sdec::scene_from_config(cfg);
    const auto seeds = sdec::seeds_from_config(cfg);
    scenes.resize(seeds.size());
    sdec::parallel_for(static_cast<int>(seeds.size()), [&](int i) {
      sdec::SceneConfig sc = base;
      sc.seed = seeds[i];
      scenes[i] = sdec::make_scene(sc);
    });
  }

  sdec::RunOptions options;
  options.solver = sdec::solver_from_config(cfg, scenes.front().config.n_sources);
  options.stamp_timing = stamp_timing;
  if (!baseline.empty()) {
    if (baseline != "gmca")
      throw sdec::ConfigError("unknown --baseline (only 'gmca' is supported)");
    options.mode = sdec::RunMode::Gmca;
  }

  fs::create_directories(out_dir);
  std::vector<sdec::RunOutcome> rows(scenes.size());
  sdec::parallel_for(static_cast<int>(scenes.size()),
                     [&](int i) { rows[i] = sdec::run_scene(scenes[i], options); });

  sdec::write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), rows);
  for (const sdec::RunOutcome& row : rows) {
    const std::string tag = std::to_string(row.seed);
    sdec::write_history_csv(fs::path(out_dir) / ("history_" + tag + ".csv"),
                            row.state.history);
    sdec::save_state(fs::path(out_dir) / ("checkpoint_" + tag), row.state);
  }
  std::cout << "wrote " << rows.size() << " run(s) to " << out_dir << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_csv, const std::string& axis,
              const std::string& axis_values) {
  sdec::KvConfig cfg = load_config(config_path, overrides);
  sdec::StrategyBenchConfig bench;
  bench.base = sdec::scene_from_config(cfg);
  bench.seeds = sdec::seeds_from_config(cfg);
  bench.c_grid.log10_min = cfg.get_double("bench.c_log10_min", bench.c_grid.log10_min);
  bench.c_grid.log10_max = cfg.get_double("bench.c_log10_max", bench.c_grid.log10_max);
  bench.c_grid.count = cfg.get_int("bench.c_count", bench.c_grid.count);
  if (!axis.empty()) {
    if (axis_values.empty())
      throw sdec::ConfigError("--axis requires --axis-values (comma list)");
    sdec::KvConfig tmp;
    tmp.set("v", axis_values);
    for (double v : tmp.get_doubles("v", {})) bench.points.push_back({axis, v});
  }
  const auto rows = sdec::bench_strategies(bench);
  sdec::write_bench_csv(out_csv, rows);
  std::cout << "wrote " << rows.size() << " benchmark rows to " << out_csv << "\n";
  return 0;
}

int cmd_grid(const std::string& config_path, const std::vector<std::string>& overrides,
             const std::string& out_csv) {
  sdec::KvConfig cfg = load_config(config_path, overrides);
  sdec::GridBenchConfig grid;
  grid.scene = sdec::scene_from_config(cfg);
  grid.solver = sdec::solver_from_config(cfg, grid.scene.n_sources);
  grid.seeds = sdec::seeds_from_config(cfg);
  grid.wu_exps = cfg.get_doubles("grid.wu_exps", grid.wu_exps);
  grid.ref_exps = cfg.get_doubles("grid.ref_exps", grid.ref_exps);
  grid.c_grid.log10_min = cfg.get_double("grid.c_log10_min", grid.c_grid.log10_min);
  grid.c_grid.log10_max = cfg.get_double("grid.c_log10_max", grid.c_grid.log10_max);
  grid.c_grid.count = cfg.get_int("grid.c_count", grid.c_grid.count);
  const auto result = sdec::run_grid(grid);
  sdec::write_grid_csv(out_csv, result);
  std::cout << "c_wu_opt = " << result.c_wu_opt << ", c_ref_opt = " << result.c_ref_opt
            << "; wrote " << result.cells.size() << " cells to " << out_csv << "\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& out_png, bool log_scale) {
  sdec::SphereMap map;
  {
    std::ifstream probe(input, std::ios::binary);
    if (!probe) throw sdec::ConfigError("cannot open " + input);
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    if (std::string(magic, 4) == "SALM") {
      const sdec::Alm alm = sdec::read_alm(input);
      map = sdec::synthesis(alm, sdec::GridSpec::for_lmax(alm.lmax()));
    } else {
      map = sdec::read_map(input);
    }
  }

  std::vector<double> display(map.values.size());
  if (log_scale) {
    double peak = 0.0;
    for (double v : map.values) peak = std::max(peak, std::abs(v));
    const double floor = (peak > 0.0) ? peak * 1e-8 : 1.0;
    for (std::size_t i = 0; i < display.size(); ++i)
      display[i] = std::log10(std::max(std::abs(map.values[i]), floor));
  } else {
    display = map.values;
  }

  double lo = display.front(), hi = display.front();
  for (double v : display) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<std::uint8_t> pixels(display.size());
  for (std::size_t i = 0; i < display.size(); ++i)
    pixels[i] = (hi > lo)
                    ? static_cast<std::uint8_t>(std::lround(255.0 * (display[i] - lo) / (hi - lo)))
                    : static_cast<std::uint8_t>(128);
  sdec::write_png_gray8(out_png, map.grid.nlon, map.grid.nlat, pixels);

  std::ofstream sidecar(out_png + ".txt", std::ios::trunc);
  sidecar.precision(17);
  sidecar << "min " << lo << "\nmax " << hi << "\nlog_scale " << (log_scale ? 1 : 0)
          << "\n";
  std::cout << "wrote " << out_png << " (" << map.grid.nlon << "x" << map.grid.nlat
            << ")\n";
  return 0;
}

int cmd_schema_check(const std::string& csv, const std::string& kind) {
  const std::string problem = sdec::schema_check(csv, kind);
  if (problem.empty()) {
    std::cout << csv << ": valid " << kind << "/v1\n";
    return 0;
  }
  std::cerr << csv << ": " << problem << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint deconvolution and blind source separation on the sphere"};
  app.require_subcommand(1);

  std::string config_path, out_path, scene_dir, baseline, strategy, axis, axis_values;
  std::string csv_path, kind, input;
  std::vector<std::string> overrides;
  int seed_flag = -1;
  bool log_scale = false, stamp_timing = false;

  auto* sim = app.add_subcommand("simulate", "generate a scene directory");
  sim->add_option("--config", config_path, "key=value config file");
  sim->add_option("--set", overrides, "override config entries (section.key=value)");
  sim->add_option("--seed", seed_flag, "scene seed override");
  sim->add_option("--out", out_path, "output directory")->required();

  auto* run = app.add_subcommand("run", "solve scenes and write metrics");
  run->add_option("--scene", scene_dir, "scene directory (else scenes come from config seeds)");
  run->add_option("--config", config_path, "key=value config file");
  run->add_option("--set", overrides, "override config entries");
  run->add_option("--baseline", baseline, "run a non-deconvolving baseline: gmca");
  run->add_option("--strategy", strategy,
                  "refinement strategy: naive, eig_max, eig_floor, snr");
  run->add_flag("--stamp-timing", stamp_timing,
                "record wallclock seconds (off by default; outputs stay bit-stable)");
  run->add_option("--out", out_path, "output directory")->required();

  auto* bench = app.add_subcommand("bench-strategies",
                                   "non-blind regularization strategy benchmark");
  bench->add_option("--config", config_path, "key=value config file");
  bench->add_option("--set", overrides, "override config entries");
  bench->add_option("--axis", axis, "restrict to one axis (snr, n_channels, cond, min_resolution)");
  bench->add_option("--axis-values", axis_values, "comma list of axis values");
  bench->add_option("--out", out_path, "output CSV")->required();

  auto* grid = app.add_subcommand("grid", "(c_wu, c_ref) sensitivity grid");
  grid->add_option("--config", config_path, "key=value config file");
  grid->add_option("--set", overrides, "override config entries");
  grid->add_option("--out", out_path, "output CSV")->required();

  auto* render = app.add_subcommand("render", "render a map (SMAP or SALM) to PNG");
  render->add_option("--map", input, "input file")->required();
  render->add_flag("--log", log_scale, "display log10(|value|)");
  render->add_option("--out", out_path, "output PNG path")->required();

  auto* check = app.add_subcommand("schema-check", "validate a CSV against its schema");
  check->add_option("--csv", csv_path, "CSV file")->required();
  check->add_option("--kind", kind, "metrics, history, bench or grid")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return (code == 0) ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, overrides, seed_flag, out_path);
    if (run->parsed())
      return cmd_run(scene_dir, config_path, overrides, out_path, baseline, strategy,
                     stamp_timing);
    if (bench->parsed()) return cmd_bench(config_path, overrides, out_path, axis, axis_values);
    if (grid->parsed()) return cmd_grid(config_path, overrides, out_path);
    if (render->parsed()) return cmd_render(input, out_path, log_scale);
    if (check->parsed()) return cmd_schema_check(csv_path, kind);
  } catch (const sdec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sdec::SingularError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
