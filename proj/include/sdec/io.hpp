#ifndef SDEC_IO_HPP_
#define SDEC_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sdec/simulate.hpp"
#include "sdec/solver.hpp"

namespace sdec {

// Binary map format: magic "SMAP", u32 version=1, u32 nlat, u32 nlon,
// nlat*nlon float64 row-major (latitude-major). Little-endian.
void write_map(const std::filesystem::path& path, const SphereMap& map);
SphereMap read_map(const std::filesystem::path& path);

// Binary coefficient format: magic "SALM", u32 version=1, u32 lmax,
// (lmax+1)(lmax+2)/2 complex128 in m-major, l-ascending order.
void write_alm(const std::filesystem::path& path, const Alm& alm);
Alm read_alm(const std::filesystem::path& path);

// Two-column CSV: l, h.
void write_beam_csv(const std::filesystem::path& path, const Beam& beam);
Beam read_beam_csv(const std::filesystem::path& path);

// Scene directory: scene.json + source_<n>.salm, channel_<nu>.salm,
// beam_<nu>.csv.
void save_scene(const std::filesystem::path& dir, const Scene& scene);
Scene load_scene(const std::filesystem::path& dir);

// Solver checkpoint: state.json (A, phase, iter, history) + per-source SALM.
void save_state(const std::filesystem::path& dir, const SolverState& state);

// History CSV: iter, phase, objective, rel_change, c_effective, mean_epsilon.
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterRecord>& history);

/// 8-bit grayscale PNG (store-only deflate; byte-deterministic).
void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& pixels);

}  // namespace sdec

#endif  // SDEC_IO_HPP_
