#ifndef SDEC_SPHERE_HPP_
#define SDEC_SPHERE_HPP_

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sdec {

/// Gauss-Legendre latitude x uniform longitude sampling of the sphere.
/// nlat >= lmax+1 and nlon >= 2*lmax+1 make the quadrature exact for
/// products of band-limited fields.
struct GridSpec {
  int lmax = 0;
  int nlat = 0;
  int nlon = 0;

  /// Minimal exact grid: nlat = lmax+1, nlon = 2*lmax+2.
  static GridSpec for_lmax(int lmax);

  bool can_hold(int l) const { return nlat >= l + 1 && nlon >= 2 * l + 1; }
  std::size_t npix() const { return static_cast<std::size_t>(nlat) * nlon; }
  void validate() const;  // throws ConfigError

  bool operator==(const GridSpec&) const = default;
};

/// Real field sampled on a GridSpec, row-major latitude-major
/// (row 0 = northernmost Gauss-Legendre node).
struct SphereMap {
  GridSpec grid;
  std::vector<double> values;

  SphereMap() = default;
  explicit SphereMap(const GridSpec& g) : grid(g), values(g.npix(), 0.0) {}

  double& at(int j, int k) { return values[static_cast<std::size_t>(j) * grid.nlon + k]; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(j) * grid.nlon + k]; }
};

/// Spherical harmonic coefficients of a real band-limited field, m >= 0 only.
/// Full set implied by a_{l,-m} = (-1)^m conj(a_{l,m}).
/// Storage is m-major with l ascending inside each m block, matching the
/// SALM file layout.
class Alm {
 public:
  Alm() = default;
  explicit Alm(int lmax)
      : lmax_(lmax), c_(static_cast<std::size_t>(lmax + 1) * (lmax + 2) / 2) {}

  int lmax() const { return lmax_; }
  std::size_t size() const { return c_.size(); }

  static std::size_t block_offset(int lmax, int m) {
    return static_cast<std::size_t>(m) * (lmax + 1) - static_cast<std::size_t>(m) * (m - 1) / 2;
  }
  std::size_t index(int l, int m) const { return block_offset(lmax_, m) + (l - m); }

  std::complex<double>& at(int l, int m) { return c_[index(l, m)]; }
  std::complex<double> at(int l, int m) const { return c_[index(l, m)]; }

  std::span<std::complex<double>> coeffs() { return c_; }
  std::span<const std::complex<double>> coeffs() const { return c_; }

 private:
  int lmax_ = -1;
  std::vector<std::complex<double>> c_;
};

/// Isotropic transfer function: one real value per degree l.
struct Beam {
  int lmax = -1;
  std::vector<double> h;

  Beam() = default;
  explicit Beam(int lm, double fill = 1.0) : lmax(lm), h(lm + 1, fill) {}
  static Beam identity(int lmax) { return Beam(lmax, 1.0); }
  static Beam gaussian(int lmax, double l_res);
};

/// Angular power spectrum, c[l] >= 0.
struct PowerSpectrum {
  int lmax = -1;
  std::vector<double> c;

  PowerSpectrum() = default;
  explicit PowerSpectrum(int lm) : lmax(lm), c(lm + 1, 0.0) {}
};

// ---------------------------------------------------------------------------
// Weighted harmonic inner products. A real field stores m >= 0 only, so all
// sums over coefficients weight m = 0 once and m > 0 twice.
// ---------------------------------------------------------------------------

/// sum_{l,m} w_m Re(a conj(b)), w_0 = 1, w_{m>0} = 2.
double dot_weighted(const Alm& a, const Alm& b);
double norm_weighted(const Alm& a);
/// Stacked Frobenius norm over a set of coefficient arrays.
double norm_weighted(std::span<const Alm> set);

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// Precomputed quadrature nodes, trigonometric and associated-Legendre tables
/// for one grid. Plans are cached per GridSpec and shared; all methods are
/// const and thread-safe.
class ShtPlan {
 public:
  static std::shared_ptr<const ShtPlan> get(const GridSpec& grid);

  Alm analysis(const SphereMap& map) const;
  SphereMap synthesis(const Alm& alm) const;

  const GridSpec& grid() const { return grid_; }
  std::span<const double> gl_nodes() const { return mu_; }
  std::span<const double> gl_weights() const { return weight_; }

 private:
  explicit ShtPlan(const GridSpec& grid);

  // Normalized-Legendre row for latitude j into scratch (only used when the
  // table is too large to keep in memory).
  void plm_row(int j, std::span<double> row) const;
  const double* plm_data(int j, std::vector<double>& scratch) const;

  GridSpec grid_;
  std::vector<double> mu_, weight_, sin_theta_;
  std::vector<double> cosm_, sinm_;       // [k * (lmax+1) + m]
  std::vector<double> rec_a_, rec_b_;     // recurrence coefficients per (l,m)
  bool tabulated_ = false;
  std::vector<double> plm_;               // [j * nalm + idx(l,m)] when tabulated
};

/// Coefficients of the unique band-limited interpolant of the sampled field.
/// Throws ConfigError if the grid is too small for its stated lmax.
Alm analysis(const SphereMap& map);

/// Inverse transform onto the given grid. Throws ConfigError if the grid
/// cannot hold alm.lmax.
SphereMap synthesis(const Alm& alm, const GridSpec& grid);

/// Diagonal action of an isotropic kernel: out[l,m] = h[l] * alm[l,m].
Alm convolve(const Alm& alm, const Beam& beam);

/// c[l] = (1/(2l+1)) (|a_{l,0}|^2 + 2 sum_{m>0} |a_{l,m}|^2).
PowerSpectrum power_spectrum(const Alm& alm);

/// White harmonic noise: E[c[l]] = sigma_harmonic^2 for every l.
/// Deterministic for a given seed.
Alm white_noise_alm(int lmax, double sigma_harmonic, std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature and normalized associated Legendre functions
// (exposed for tests and for the pixel-domain convolution oracle).
// ---------------------------------------------------------------------------

/// Nodes (descending, i.e. north to south as colatitude increases) and
/// weights of n-point Gauss-Legendre quadrature on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Fills row[idx(l,m)] with spherical-harmonic-normalized associated Legendre
/// values at x = cos(theta), s = sin(theta), for all 0 <= m <= l <= lmax,
/// in the Alm m-major layout. Includes the Condon-Shortley phase and the
/// 1/sqrt(4 pi) factor, so Y_l^m = row[idx(l,m)] * exp(i m phi).
/// rec_a/rec_b are the recurrence coefficient tables from
/// legendre_recurrence_coeffs. Stable up to lmax = 512 via on-the-fly
/// rescaling of the sectoral seed.
void normalized_plm_row(int lmax, double x, double s,
                        std::span<const double> rec_a, std::span<const double> rec_b,
                        std::span<double> row);

void legendre_recurrence_coeffs(int lmax, std::vector<double>& rec_a,
                                std::vector<double>& rec_b);

}  // namespace sdec

#endif  // SDEC_SPHERE_HPP_
