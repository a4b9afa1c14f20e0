#ifndef SDEC_SIMULATE_HPP_
#define SDEC_SIMULATE_HPP_

#include <cstdint>
#include <vector>

#include "sdec/linalg.hpp"
#include "sdec/sphere.hpp"

namespace sdec {

/// Nc x Ns mixing weights with unit-l2-norm columns (the oblique ensemble).
struct MixingMatrix {
  Mat a;

  int n_channels() const { return a.rows; }
  int n_sources() const { return a.cols; }

  /// Normalize every column to unit l2 norm.
  void project_oblique();
  /// Max deviation of any column norm from 1.
  double oblique_deviation() const;
};

struct SceneConfig {
  int lmax = 64;
  int n_sources = 4;
  int n_channels = 8;
  double cond_target = 2.0;
  int source_band_limit = 10;  // ~ lmax/6
  int beam_lmin = 8;           // ~ lmax/8
  int beam_lmax = 64;          // = lmax
  double snr_db = 10.0;        // +infinity = noiseless
  int sparsity_count = 6;      // impulses per source; keep low enough that the
                               // blobs stay sparse relative to the band limit
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError naming the violated invariant

  /// Reference experiment geometry at any band limit: source band limit lmax/6,
  /// beam resolution ladder [lmax/8, lmax].
  static SceneConfig desk_default(int lmax);
};

struct Scene {
  std::vector<Alm> sources;    // ground truth S*, unit weighted Frobenius norm each
  MixingMatrix mixing;         // A*
  std::vector<Beam> beams;     // original (un-normalized) channel beams
  std::vector<Alm> channels;   // noisy observations
  std::vector<double> resolutions;
  double noise_sigma = 0.0;    // harmonic noise level handed to the solver
  bool mixing_converged = true;
  SceneConfig config;
};

/// Sparse band-limited sources: random point impulses, low-pass cut exactly
/// at the band limit, unit weighted-Frobenius normalization.
std::vector<Alm> make_sources(const SceneConfig& cfg);

/// Gaussian beams with resolutions evenly spaced on [beam_lmin, beam_lmax]
/// (ascending; the last channel is best resolved).
std::vector<Beam> make_beams(const SceneConfig& cfg);

struct MixingResult {
  MixingMatrix mixing;
  bool converged = true;
};

/// Random matrix with prescribed condition number and unit-norm columns,
/// via alternating spectrum rescaling and column normalization.
MixingResult make_mixing(const SceneConfig& cfg);

/// Noiseless forward model Y_nu[l,m] = H_nu[l] sum_n A[nu,n] S_n[l,m].
std::vector<Alm> forward(const std::vector<Alm>& sources, const MixingMatrix& mixing,
                         const std::vector<Beam>& beams);

struct NoiseResult {
  std::vector<Alm> channels;
  double sigma_harmonic = 0.0;
};

/// Adds white harmonic noise with one sigma across channels, scaled so the
/// realized 20*log10(||X||_F / ||N||_F) equals snr_db exactly.
NoiseResult add_noise(const std::vector<Alm>& channels, double snr_db, std::uint64_t seed);

/// Divides every beam by the best-resolved channel's beam; the best channel
/// becomes the identity and sources are then estimated at its resolution.
std::vector<Beam> normalize_to_best_channel(const std::vector<Beam>& beams);

/// Full scene: sources, mixing, beams, mixed noisy channels.
Scene make_scene(const SceneConfig& cfg);

}  // namespace sdec

#endif  // SDEC_SIMULATE_HPP_
