#include "sdec/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sdec/errors.hpp"

namespace sdec {

namespace {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

void write_bytes(std::ofstream& f, const void* data, std::size_t n) {
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& f, void* data, std::size_t n) {
  f.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw ConfigError("truncated file");
}

void write_u32(std::ofstream& f, std::uint32_t v) { write_bytes(f, &v, 4); }

std::uint32_t read_u32(std::ifstream& f) {
  std::uint32_t v = 0;
  read_bytes(f, &v, 4);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for reading: " + path.string());
  return f;
}

void expect_magic(std::ifstream& f, const char magic[4], const std::string& what) {
  char buf[4];
  read_bytes(f, buf, 4);
  if (std::memcmp(buf, magic, 4) != 0) throw ConfigError("bad magic in " + what);
}

}  // namespace

void write_map(const std::filesystem::path& path, const SphereMap& map) {
  auto f = open_out(path);
  write_bytes(f, "SMAP", 4);
  write_u32(f, 1);
  write_u32(f, static_cast<std::uint32_t>(map.grid.nlat));
  write_u32(f, static_cast<std::uint32_t>(map.grid.nlon));
  write_bytes(f, map.values.data(), map.values.size() * sizeof(double));
}

SphereMap read_map(const std::filesystem::path& path) {
  auto f = open_in(path);
  expect_magic(f, "SMAP", path.string());
  if (read_u32(f) != 1) throw ConfigError("unsupported SMAP version in " + path.string());
  const int nlat = static_cast<int>(read_u32(f));
  const int nlon = static_cast<int>(read_u32(f));
  // lmax implied by the minimal exact grid convention.
  GridSpec grid{std::min(nlat - 1, (nlon - 1) / 2), nlat, nlon};
  SphereMap map(grid);
  read_bytes(f, map.values.data(), map.values.size() * sizeof(double));
  return map;
}

void write_alm(const std::filesystem::path& path, const Alm& alm) {
  auto f = open_out(path);
  write_bytes(f, "SALM", 4);
  write_u32(f, 1);
  write_u32(f, static_cast<std::uint32_t>(alm.lmax()));
  write_bytes(f, alm.coeffs().data(), alm.coeffs().size() * sizeof(std::complex<double>));
}

Alm read_alm(const std::filesystem::path& path) {
  auto f = open_in(path);
  expect_magic(f, "SALM", path.string());
  if (read_u32(f) != 1) throw ConfigError("unsupported SALM version in " + path.string());
  Alm alm(static_cast<int>(read_u32(f)));
  read_bytes(f, alm.coeffs().data(), alm.coeffs().size() * sizeof(std::complex<double>));
  return alm;
}

void write_beam_csv(const std::filesystem::path& path, const Beam& beam) {
  auto f = open_out(path);
  f << "l,h\n";
  f.precision(17);
  for (int l = 0; l <= beam.lmax; ++l) f << l << "," << beam.h[l] << "\n";
}

Beam read_beam_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<double> h;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed beam CSV: " + path.string());
    h.push_back(std::stod(line.substr(comma + 1)));
  }
  if (h.empty()) throw ConfigError("empty beam CSV: " + path.string());
  Beam beam(static_cast<int>(h.size()) - 1);
  beam.h = std::move(h);
  return beam;
}

namespace {

nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

}  // namespace

void save_scene(const std::filesystem::path& dir, const Scene& scene) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  const SceneConfig& c = scene.config;
  j["config"] = {{"lmax", c.lmax},
                 {"n_sources", c.n_sources},
                 {"n_channels", c.n_channels},
                 {"cond_target", c.cond_target},
                 {"source_band_limit", c.source_band_limit},
                 {"beam_lmin", c.beam_lmin},
                 {"beam_lmax", c.beam_lmax},
                 {"snr_db", std::isinf(c.snr_db) ? 1e308 : c.snr_db},
                 {"sparsity_count", c.sparsity_count},
                 {"seed", c.seed}};
  j["noise_sigma"] = scene.noise_sigma;
  j["resolutions"] = scene.resolutions;
  j["mixing"] = mat_to_json(scene.mixing.a);
  j["mixing_converged"] = scene.mixing_converged;

  std::ofstream f(dir / "scene.json", std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + (dir / "scene.json").string());
  f << j.dump(2) << "\n";

  for (std::size_t n = 0; n < scene.sources.size(); ++n)
    write_alm(dir / ("source_" + std::to_string(n) + ".salm"), scene.sources[n]);
  for (std::size_t nu = 0; nu < scene.channels.size(); ++nu)
    write_alm(dir / ("channel_" + std::to_string(nu) + ".salm"), scene.channels[nu]);
  for (std::size_t nu = 0; nu < scene.beams.size(); ++nu)
    write_beam_csv(dir / ("beam_" + std::to_string(nu) + ".csv"), scene.beams[nu]);
}

Scene load_scene(const std::filesystem::path& dir) {
  std::ifstream f(dir / "scene.json");
  if (!f) throw ConfigError("cannot read " + (dir / "scene.json").string());
  nlohmann::json j;
  f >> j;

  Scene scene;
  const auto& jc = j.at("config");
  SceneConfig& c = scene.config;
  c.lmax = jc.at("lmax").get<int>();
  c.n_sources = jc.at("n_sources").get<int>();
  c.n_channels = jc.at("n_channels").get<int>();
  c.cond_target = jc.at("cond_target").get<double>();
  c.source_band_limit = jc.at("source_band_limit").get<int>();
  c.beam_lmin = jc.at("beam_lmin").get<int>();
  c.beam_lmax = jc.at("beam_lmax").get<int>();
  c.snr_db = jc.at("snr_db").get<double>();
  if (c.snr_db >= 1e308) c.snr_db = std::numeric_limits<double>::infinity();
  c.sparsity_count = jc.at("sparsity_count").get<int>();
  c.seed = jc.at("seed").get<std::uint64_t>();
  scene.noise_sigma = j.at("noise_sigma").get<double>();
  scene.resolutions = j.at("resolutions").get<std::vector<double>>();
  scene.mixing.a = mat_from_json(j.at("mixing"));
  scene.mixing_converged = j.value("mixing_converged", true);

  for (int n = 0; n < c.n_sources; ++n)
    scene.sources.push_back(read_alm(dir / ("source_" + std::to_string(n) + ".salm")));
  for (int nu = 0; nu < c.n_channels; ++nu) {
    scene.channels.push_back(read_alm(dir / ("channel_" + std::to_string(nu) + ".salm")));
    scene.beams.push_back(read_beam_csv(dir / ("beam_" + std::to_string(nu) + ".csv")));
  }
  return scene;
}

void save_state(const std::filesystem::path& dir, const SolverState& state) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["mixing"] = mat_to_json(state.a.a);
  j["phase"] = (state.phase == Phase::WarmUp) ? "warmup" : "refinement";
  j["iter"] = state.iter;
  j["fallback_warning"] = state.fallback_warning;
  nlohmann::json hist = nlohmann::json::array();
  for (const IterRecord& r : state.history)
    hist.push_back({{"iter", r.iter},
                    {"phase", (r.phase == Phase::WarmUp) ? "warmup" : "refinement"},
                    {"objective", r.objective},
                    {"rel_change", std::isfinite(r.rel_change) ? r.rel_change : 1e308},
                    {"c_effective", r.c_effective},
                    {"mean_epsilon", r.mean_epsilon}});
  j["history"] = std::move(hist);

  std::ofstream f(dir / "state.json", std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + (dir / "state.json").string());
  f << j.dump(2) << "\n";

  for (std::size_t n = 0; n < state.s.size(); ++n)
    write_alm(dir / ("estimated_source_" + std::to_string(n) + ".salm"), state.s[n]);
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterRecord>& history) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << "# schema: history/v1\n";
  f << "iter,phase,objective,rel_change,c_effective,mean_epsilon\n";
  f.precision(17);
  for (const IterRecord& r : history) {
    f << r.iter << "," << ((r.phase == Phase::WarmUp) ? "warmup" : "refinement") << ","
      << r.objective << "," << (std::isfinite(r.rel_change) ? r.rel_change : -1.0) << ","
      << r.c_effective << "," << r.mean_epsilon << "\n";
  }
}

// ---------------------------------------------------------------------------
// Minimal PNG writer: 8-bit grayscale, zlib stream with stored deflate
// blocks. No compression, fully deterministic output.
// ---------------------------------------------------------------------------

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const std::uint8_t* data, std::size_t n) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc;
}

void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  std::vector<std::uint8_t> body(type, type + 4);
  body.insert(body.end(), payload.begin(), payload.end());
  out.insert(out.end(), body.begin(), body.end());
  put_be32(out, crc32_update(0xFFFFFFFFu, body.data(), body.size()) ^ 0xFFFFFFFFu);
}

}  // namespace

void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& pixels) {
  if (width <= 0 || height <= 0 ||
      pixels.size() != static_cast<std::size_t>(width) * height)
    throw ConfigError("write_png_gray8: pixel buffer does not match dimensions");

  // Raw image stream: one filter byte (0 = none) per scanline.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(y) * width,
               pixels.begin() + static_cast<std::size_t>(y + 1) * width);
  }

  // zlib wrapper with stored (uncompressed) deflate blocks.
  std::vector<std::uint8_t> z;
  z.push_back(0x78);
  z.push_back(0x01);
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const std::size_t n = std::min<std::size_t>(raw.size() - pos, 65535);
    const bool final = (pos + n == raw.size());
    z.push_back(final ? 1 : 0);
    z.push_back(static_cast<std::uint8_t>(n & 0xFF));
    z.push_back(static_cast<std::uint8_t>(n >> 8));
    z.push_back(static_cast<std::uint8_t>(~n & 0xFF));
    z.push_back(static_cast<std::uint8_t>((~n >> 8) & 0xFF));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + n);
    pos += n;
  }
  std::uint32_t s1 = 1, s2 = 0;
  for (std::uint8_t b : raw) {
    s1 = (s1 + b) % 65521;
    s2 = (s2 + s1) % 65521;
  }
  put_be32(z, (s2 << 16) | s1);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});

  auto f = open_out(path);
  write_bytes(f, out.data(), out.size());
}

}  // namespace sdec
