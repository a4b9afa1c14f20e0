#include "sdec/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdec/errors.hpp"

namespace sdec {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KvConfig KvConfig::parse_string(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

KvConfig KvConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_string(buf.str());
}

void KvConfig::set(const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ConfigError("empty config key");
  values_[dotted_key] = value;
}

bool KvConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return (it == values_.end()) ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + it->second);
  }
}

int KvConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + it->second);
}

std::vector<double> KvConfig::get_doubles(const std::string& key,
                                          const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number list: " + it->second);
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

SceneConfig scene_from_config(const KvConfig& cfg) {
  const int lmax = cfg.get_int("scene.lmax", 64);
  SceneConfig sc = SceneConfig::desk_default(lmax);
  sc.n_sources = cfg.get_int("scene.n_sources", sc.n_sources);
  sc.n_channels = cfg.get_int("scene.n_channels", sc.n_channels);
  sc.cond_target = cfg.get_double("scene.cond", sc.cond_target);
  sc.source_band_limit = cfg.get_int("scene.source_band_limit", sc.source_band_limit);
  sc.beam_lmin = cfg.get_int("scene.beam_lmin", sc.beam_lmin);
  sc.beam_lmax = cfg.get_int("scene.beam_lmax", sc.beam_lmax);
  sc.snr_db = cfg.get_double("scene.snr_db", sc.snr_db);
  sc.sparsity_count = cfg.get_int("scene.sparsity_count", sc.sparsity_count);
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("scene.seed", static_cast<int>(sc.seed)));
  sc.validate();
  return sc;
}

SolverConfig solver_from_config(const KvConfig& cfg, int n_sources) {
  SolverConfig sv;
  sv.n_sources = n_sources;
  sv.c_wu_start = cfg.get_double("solver.c_wu_start", sv.c_wu_start);
  sv.c_wu_end = cfg.get_double("solver.c_wu_end", sv.c_wu_end);
  sv.c_ref = cfg.get_double("solver.c_ref", sv.c_ref);
  sv.k_mad = cfg.get_double("solver.k_mad", sv.k_mad);
  sv.max_iters = cfg.get_int("solver.max_iters", sv.max_iters);
  sv.min_warmup_iters = cfg.get_int("solver.min_warmup_iters", sv.min_warmup_iters);
  sv.warmup_tol = cfg.get_double("solver.warmup_tol", sv.warmup_tol);
  sv.final_tol = cfg.get_double("solver.final_tol", sv.final_tol);
  sv.reweight = cfg.get_bool("solver.reweight", sv.reweight);
  sv.nscales = cfg.get_int("solver.nscales", sv.nscales);
  sv.warmup_kind = reg_kind_from_string(cfg.get_string("solver.warmup_strategy", "eig_floor"));
  sv.refinement_kind = reg_kind_from_string(cfg.get_string("solver.strategy", "snr"));
  sv.validate();
  return sv;
}

std::vector<std::uint64_t> seeds_from_config(const KvConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  if (cfg.has("run.seeds")) {
    for (double v : cfg.get_doubles("run.seeds", {}))
      seeds.push_back(static_cast<std::uint64_t>(v));
  } else {
    const int count = cfg.get_int("run.seed_count", 20);
    if (count < 1) throw ConfigError("run.seed_count must be >= 1 (at least one seed)");
    for (int i = 1; i <= count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
  }
  if (seeds.empty()) throw ConfigError("no seeds configured (at least one seed required)");
  return seeds;
}

}  // namespace sdec
