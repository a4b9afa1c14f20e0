#ifndef SDEC_CONFIG_HPP_
#define SDEC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdec/simulate.hpp"
#include "sdec/solver.hpp"

namespace sdec {

/// key = value configuration with [section] headers; keys are addressed as
/// "section.key". Lines starting with # are comments. CLI flags override
/// file values through set().
class KvConfig {
 public:
  static KvConfig parse_file(const std::filesystem::path& path);
  static KvConfig parse_string(const std::string& text);

  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& dotted_key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// [scene] section -> SceneConfig; unspecified fields follow the reference
/// experiment's geometry ratios at the configured lmax.
SceneConfig scene_from_config(const KvConfig& cfg);

/// [solver] section -> SolverConfig.
SolverConfig solver_from_config(const KvConfig& cfg, int n_sources);

/// [run] seeds = comma list, or seed_count = N (seeds 1..N).
std::vector<std::uint64_t> seeds_from_config(const KvConfig& cfg);

}  // namespace sdec

#endif  // SDEC_CONFIG_HPP_
