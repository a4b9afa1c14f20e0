#ifndef SDEC_SOLVER_HPP_
#define SDEC_SOLVER_HPP_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdec/simulate.hpp"
#include "sdec/starlet.hpp"

namespace sdec {

/// The four Tikhonov regularization rules for the per-degree S-update.
enum class RegKind { Naive, EigMax, EigFloor, Snr };

RegKind reg_kind_from_string(const std::string& name);
std::string to_string(RegKind kind);

/// eps_{n,l} selection: a kind, the hyperparameter c, and (for Snr) the
/// source spectra and noise level it divides by.
struct RegStrategy {
  RegKind kind = RegKind::Naive;
  double c = 0.0;
  std::vector<PowerSpectrum> source_spectra;  // required iff kind == Snr
  double noise_variance = 0.0;                // sigma^2 of the white harmonic noise

  static RegStrategy naive(double c) { return {RegKind::Naive, c, {}, 0.0}; }
  static RegStrategy eig_max(double c) { return {RegKind::EigMax, c, {}, 0.0}; }
  static RegStrategy eig_floor(double c) { return {RegKind::EigFloor, c, {}, 0.0}; }
  static RegStrategy snr(double c, std::vector<PowerSpectrum> spectra, double noise_variance);

  void validate(int n_sources) const;
};

/// Regularization coefficients for one degree l, one entry per source.
/// m_l = A^T diag(H^l)^2 A. Kinds 1-3 return the same value for every
/// source; Snr adapts per source. A zero source spectrum is capped at
/// 1e12 * c instead of infinity.
std::vector<double> epsilon(const RegStrategy& strategy, const Mat& m_l,
                            const MixingMatrix& a, int l);

struct SolverConfig {
  int n_sources = 4;
  double c_wu_start = 10.0;   // warm-up hyperparameter decay endpoints
  double c_wu_end = 1.0;
  double c_ref = 1.0;
  double k_mad = 3.0;         // threshold scale (k * MAD)
  int max_iters = 200;
  int min_warmup_iters = 10;
  double warmup_tol = 1e-2;
  double final_tol = 1e-4;
  bool reweight = true;
  int nscales = 0;            // 0 = default rule from the band limit
  RegKind warmup_kind = RegKind::EigFloor;
  RegKind refinement_kind = RegKind::Snr;

  void validate() const;
};

enum class Phase { WarmUp, Refinement };

struct IterRecord {
  int iter = 0;
  Phase phase = Phase::WarmUp;
  double objective = 0.0;
  double rel_change = 0.0;
  double c_effective = 0.0;
  double mean_epsilon = 0.0;
};

struct SolverState {
  MixingMatrix a;
  std::vector<Alm> s;
  Phase phase = Phase::WarmUp;
  int iter = 0;
  std::vector<IterRecord> history;
  bool fallback_warning = false;  // a degenerate source column was reinitialized
  double max_oblique_deviation = 0.0;  // worst column-norm deviation seen after any iteration
  double min_epsilon_seen = std::numeric_limits<double>::infinity();
};

/// Per-degree Tikhonov-regularized least-squares update of the sources:
/// S[l,m] = (M[l] + diag(eps))^{-1} A^T diag(H^l) Y[l,m], one factorization
/// per degree applied to every order m. Throws SingularError (raise c) when
/// the regularized system is singular.
std::vector<Alm> update_s_tikhonov(const std::vector<Alm>& channels, const MixingMatrix& a,
                                   const std::vector<Beam>& beams,
                                   const RegStrategy& strategy);

struct ThresholdResult {
  std::vector<Alm> s;
  std::vector<StarletCoeffs> coeffs;  // thresholded coefficients, for reweighting
  std::vector<std::vector<double>> lambda;  // base threshold per source per wavelet scale
};

/// Per-source, per-scale soft-thresholding in the starlet domain. Thresholds
/// are k_mad * 1.4826 * MAD of each wavelet scale; the coarse scale is never
/// thresholded. With prev coefficients, applies one-step l1 reweighting
/// lambda_i = lambda / (1 + |prev_i| / lambda). With self_reweight (and no
/// prev), the weights come from the scale's own current values, which keeps
/// strong coefficients nearly unbiased without carrying support decisions
/// from one iteration into the next.
ThresholdResult threshold_sources(const std::vector<Alm>& s, const StarletBank& bank,
                                  double k_mad,
                                  const std::vector<StarletCoeffs>* prev = nullptr,
                                  bool self_reweight = false);

/// Per-source, per-scale noise standard deviation of the Tikhonov estimate:
/// the S-update is linear, so white harmonic noise of level noise_sigma maps
/// to per-degree source variances sigma^2 [(M+eps)^-1 M (M+eps)^-1]_nn and
/// each starlet band integrates them over degrees. solve() thresholds at
/// k_mad times these values; unlike a MAD of the scale itself, they are not
/// inflated when the scale is signal-dominated.
std::vector<std::vector<double>> threshold_stds(const MixingMatrix& a,
                                                const std::vector<Beam>& beams,
                                                const RegStrategy& strategy,
                                                const StarletBank& bank,
                                                double noise_sigma);

/// Soft-threshold with externally supplied per-source, per-scale lambdas.
/// high_frac in [0, 1] lifts each threshold toward the scale's largest
/// coefficient; the warm-up starts near 1 (keep only the strongest peaks,
/// which is what makes the alternation lock onto distinct sources) and
/// decays to 0.
ThresholdResult threshold_sources_fixed(const std::vector<Alm>& s, const StarletBank& bank,
                                        const std::vector<std::vector<double>>& lambda,
                                        bool self_reweight, double high_frac = 0.0);

/// Row-wise least-squares update of the mixing matrix followed by oblique
/// projection. If the source Gram matrix is singular (a source collapsed to
/// zero), the offending columns are reinitialized from the residual's
/// principal component and *warning is set.
MixingMatrix update_a(const std::vector<Alm>& channels, const std::vector<Alm>& s,
                      const std::vector<Beam>& beams, bool* warning = nullptr);

/// First n_sources principal directions of the channel covariance, columns
/// unit-norm with the largest-magnitude entry positive.
MixingMatrix pca_init(const std::vector<Alm>& channels, int n_sources);

/// Value of the penalized objective: 0.5 * sum_{l,m} ||Y - diag(H) A S||^2
/// (m-weighted) plus sum of lambda-weighted l1 norms of the wavelet scales.
/// lambda[n][j] is the threshold of source n, wavelet scale j (0-based).
double objective_value(const std::vector<Alm>& channels, const MixingMatrix& a,
                       const std::vector<Alm>& s, const std::vector<Beam>& beams,
                       const std::vector<std::vector<double>>& lambda);

/// Full pALS loop: PCA init, warm-up with decaying c and the warm-up
/// strategy, switch to the refinement strategy (spectra recomputed from the
/// latest estimate each iteration) once S stabilizes, stop at final_tol or
/// max_iters.
SolverState solve(const std::vector<Alm>& channels, const std::vector<Beam>& beams,
                  const SolverConfig& cfg, double noise_sigma,
                  const std::optional<MixingMatrix>& init_a = std::nullopt);

/// Non-deconvolving baseline: solve() with identity beams. The caller is
/// expected to have degraded all channels to a common resolution.
SolverState gmca_baseline(const std::vector<Alm>& channels, const SolverConfig& cfg,
                          double noise_sigma);

}  // namespace sdec

#endif  // SDEC_SOLVER_HPP_
