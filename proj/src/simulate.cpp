#include "sdec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdec/errors.hpp"
#include "sdec/rng.hpp"
#include "sdec/starlet.hpp"

namespace sdec {

void MixingMatrix::project_oblique() {
  for (int c = 0; c < a.cols; ++c) {
    double norm = 0.0;
    for (int r = 0; r < a.rows; ++r) norm += a(r, c) * a(r, c);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (int r = 0; r < a.rows; ++r) a(r, c) /= norm;
  }
}

double MixingMatrix::oblique_deviation() const {
  double dev = 0.0;
  for (int c = 0; c < a.cols; ++c) {
    double norm = 0.0;
    for (int r = 0; r < a.rows; ++r) norm += a(r, c) * a(r, c);
    dev = std::max(dev, std::abs(std::sqrt(norm) - 1.0));
  }
  return dev;
}

void SceneConfig::validate() const {
  if (lmax < 2) throw ConfigError("SceneConfig: lmax must be >= 2");
  if (n_sources < 1) throw ConfigError("SceneConfig: n_sources must be >= 1");
  if (n_sources > n_channels)
    throw ConfigError("SceneConfig: Ns <= Nc violated (n_sources = " +
                      std::to_string(n_sources) + " > n_channels = " +
                      std::to_string(n_channels) + ")");
  if (source_band_limit < 1 || source_band_limit > lmax)
    throw ConfigError("SceneConfig: source_band_limit <= lmax violated");
  if (!(beam_lmin < beam_lmax) || beam_lmax > lmax)
    throw ConfigError("SceneConfig: beam_lmin < beam_lmax <= lmax violated");
  if (cond_target < 1.0) throw ConfigError("SceneConfig: cond_target must be >= 1");
  if (sparsity_count < 1) throw ConfigError("SceneConfig: sparsity_count must be >= 1");
}

SceneConfig SceneConfig::desk_default(int lmax) {
  SceneConfig cfg;
  cfg.lmax = lmax;
  cfg.source_band_limit = std::max(2, lmax / 6);
  cfg.beam_lmin = std::max(2, lmax / 8);
  cfg.beam_lmax = lmax;
  return cfg;
}

std::vector<Alm> make_sources(const SceneConfig& cfg) {
  cfg.validate();
  const GridSpec grid = GridSpec::for_lmax(cfg.lmax);
  auto plan = ShtPlan::get(grid);

  // Smooth low-pass that is exactly 0 above the band limit. Flat through
  // 85% of the band, then a B3 taper: keeps the blobs as compact as the
  // band limit allows without the ringing of a hard cut.
  Beam lowpass(cfg.lmax, 0.0);
  for (int l = 0; l <= cfg.lmax; ++l) {
    if (l > cfg.source_band_limit) continue;
    const double x = static_cast<double>(l) / (cfg.source_band_limit + 1);
    lowpass.h[l] = (x <= 0.85) ? 1.0 : starlet_profile(0.5 + 0.5 * (x - 0.85) / 0.15);
  }

  std::vector<Alm> sources;
  sources.reserve(cfg.n_sources);
  for (int n = 0; n < cfg.n_sources; ++n) {
    Rng rng = Rng::derive(cfg.seed, 0x501 + static_cast<std::uint64_t>(n));
    SphereMap impulses(grid);
    for (int i = 0; i < cfg.sparsity_count; ++i) {
      // Area-uniform placement: draw mu uniformly and snap to the nearest
      // quadrature row (per-pixel sampling would pile impulses at the poles).
      const double mu = 2.0 * rng.uniform() - 1.0;
      int row = 0;
      double best = 2.0;
      for (int j = 0; j < grid.nlat; ++j) {
        const double d = std::abs(plan->gl_nodes()[j] - mu);
        if (d < best) {
          best = d;
          row = j;
        }
      }
      const int col = static_cast<int>(rng.uniform_int(grid.nlon));
      impulses.at(row, col) += std::abs(rng.normal());
    }
    Alm alm = convolve(analysis(impulses), lowpass);
    const double norm = norm_weighted(alm);
    if (norm > 0.0)
      for (auto& c : alm.coeffs()) c /= norm;
    sources.push_back(std::move(alm));
  }
  return sources;
}

std::vector<Beam> make_beams(const SceneConfig& cfg) {
  cfg.validate();
  std::vector<Beam> beams;
  beams.reserve(cfg.n_channels);
  for (int nu = 0; nu < cfg.n_channels; ++nu) {
    const double l_res =
        (cfg.n_channels == 1)
            ? static_cast<double>(cfg.beam_lmax)
            : cfg.beam_lmin + (cfg.beam_lmax - cfg.beam_lmin) *
                                  static_cast<double>(nu) / (cfg.n_channels - 1);
    beams.push_back(Beam::gaussian(cfg.lmax, l_res));
  }
  return beams;
}

MixingResult make_mixing(const SceneConfig& cfg) {
  cfg.validate();
  const int nc = cfg.n_channels, ns = cfg.n_sources;
  Rng rng = Rng::derive(cfg.seed, 0xA17);

  Mat a(nc, ns);
  for (double& v : a.d) v = rng.normal();

  MixingResult out;
  for (int pass = 0; pass < 50; ++pass) {
    // SVD through the Gram matrix (Ns <= 32, conditioning loss acceptable).
    SymEig eig = sym_eig(matmul(transpose(a), a));
    std::vector<double> sv(ns);
    for (int i = 0; i < ns; ++i) sv[i] = std::sqrt(std::max(eig.values[i], 0.0));
    // Left singular vectors U = A V / sigma.
    Mat u(nc, ns);
    for (int i = 0; i < nc; ++i)
      for (int e = 0; e < ns; ++e) {
        double s = 0.0;
        for (int k = 0; k < ns; ++k) s += a(i, k) * eig.vectors(k, e);
        u(i, e) = (sv[e] > 0.0) ? s / sv[e] : 0.0;
      }
    // Linear singular-value ramp from cond_target down to 1.
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < ns; ++j) {
        double s = 0.0;
        for (int e = 0; e < ns; ++e) {
          const double ramp =
              (ns == 1) ? 1.0
                        : cfg.cond_target +
                              (1.0 - cfg.cond_target) * static_cast<double>(e) / (ns - 1);
          s += u(i, e) * ramp * eig.vectors(j, e);
        }
        a(i, j) = s;
      }
    MixingMatrix mm{a};
    mm.project_oblique();
    a = mm.a;
    if (std::abs(cond(a) - cfg.cond_target) < 0.05 * cfg.cond_target) {
      out.mixing.a = a;
      out.converged = true;
      return out;
    }
  }
  out.mixing.a = a;
  out.converged = false;
  return out;
}

std::vector<Alm> forward(const std::vector<Alm>& sources, const MixingMatrix& mixing,
                         const std::vector<Beam>& beams) {
  const int ns = static_cast<int>(sources.size());
  const int nc = static_cast<int>(beams.size());
  if (ns == 0 || nc == 0) throw ConfigError("forward: empty sources or beams");
  if (mixing.a.rows != nc || mixing.a.cols != ns)
    throw ConfigError("forward: mixing matrix shape does not match sources/beams");
  const int lmax = sources.front().lmax();
  for (const Alm& s : sources)
    if (s.lmax() != lmax) throw ConfigError("forward: sources have mixed lmax");

  std::vector<Alm> channels;
  channels.reserve(nc);
  for (int nu = 0; nu < nc; ++nu) {
    if (beams[nu].lmax != lmax) throw ConfigError("forward: beam lmax mismatch");
    Alm y(lmax);
    auto yc = y.coeffs();
    for (int n = 0; n < ns; ++n) {
      const double w = mixing.a(nu, n);
      auto sc = sources[n].coeffs();
      for (std::size_t i = 0; i < yc.size(); ++i) yc[i] += w * sc[i];
    }
    for (int m = 0; m <= lmax; ++m) {
      const std::size_t off = Alm::block_offset(lmax, m);
      for (int l = m; l <= lmax; ++l) yc[off + (l - m)] *= beams[nu].h[l];
    }
    channels.push_back(std::move(y));
  }
  return channels;
}

NoiseResult add_noise(const std::vector<Alm>& channels, double snr_db, std::uint64_t seed) {
  NoiseResult out;
  out.channels = channels;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    out.sigma_harmonic = 0.0;
    return out;
  }
  const double signal_norm = norm_weighted(std::span<const Alm>(channels));
  if (signal_norm == 0.0) throw ConfigError("add_noise: zero-signal input");

  const int lmax = channels.front().lmax();
  std::vector<Alm> noise;
  noise.reserve(channels.size());
  for (std::size_t nu = 0; nu < channels.size(); ++nu)
    noise.push_back(white_noise_alm(lmax, 1.0, seed ^ (0xC0FFEEULL + nu)));

  const double noise_norm = norm_weighted(std::span<const Alm>(noise));
  // Scale the realized noise so ||N|| / ||X|| = 10^(-snr/20) exactly.
  const double sigma = std::pow(10.0, -snr_db / 20.0) * signal_norm / noise_norm;
  for (std::size_t nu = 0; nu < channels.size(); ++nu) {
    auto yc = out.channels[nu].coeffs();
    auto nc = noise[nu].coeffs();
    for (std::size_t i = 0; i < yc.size(); ++i) yc[i] += sigma * nc[i];
  }
  out.sigma_harmonic = sigma;
  return out;
}

std::vector<Beam> normalize_to_best_channel(const std::vector<Beam>& beams) {
  if (beams.empty()) throw ConfigError("normalize_to_best_channel: no beams");
  const Beam& best = beams.back();
  for (double h : best.h)
    if (!(h > 0.0))
      throw ConfigError("normalize_to_best_channel: best beam vanishes at some degree");
  std::vector<Beam> out = beams;
  for (Beam& b : out)
    for (int l = 0; l <= b.lmax; ++l) b.h[l] /= best.h[l];
  return out;
}

Scene make_scene(const SceneConfig& cfg) {
  cfg.validate();
  Scene scene;
  scene.config = cfg;
  scene.sources = make_sources(cfg);
  scene.beams = make_beams(cfg);
  for (int nu = 0; nu < cfg.n_channels; ++nu)
    scene.resolutions.push_back(
        (cfg.n_channels == 1)
            ? static_cast<double>(cfg.beam_lmax)
            : cfg.beam_lmin + (cfg.beam_lmax - cfg.beam_lmin) *
                                  static_cast<double>(nu) / (cfg.n_channels - 1));
  MixingResult mix = make_mixing(cfg);
  scene.mixing = mix.mixing;
  scene.mixing_converged = mix.converged;
  NoiseResult noisy = add_noise(forward(scene.sources, scene.mixing, scene.beams),
                                cfg.snr_db, cfg.seed ^ 0x90158EULL);
  scene.channels = std::move(noisy.channels);
  scene.noise_sigma = noisy.sigma_harmonic;
  return scene;
}

}  // namespace sdec
