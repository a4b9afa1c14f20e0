#include "sdec/sphere.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "sdec/errors.hpp"
#include "sdec/rng.hpp"

namespace sdec {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrt4Pi = 0.2820947917738781434740397257803862929;
}  // namespace

GridSpec GridSpec::for_lmax(int lmax) {
  return GridSpec{lmax, lmax + 1, 2 * lmax + 2};
}

void GridSpec::validate() const {
  if (lmax < 0) throw ConfigError("GridSpec: lmax must be >= 0");
  if (nlat < lmax + 1)
    throw ConfigError("GridSpec: nlat = " + std::to_string(nlat) +
                      " too small for lmax = " + std::to_string(lmax) +
                      " (need nlat >= lmax+1)");
  if (nlon < 2 * lmax + 1)
    throw ConfigError("GridSpec: nlon = " + std::to_string(nlon) +
                      " too small for lmax = " + std::to_string(lmax) +
                      " (need nlon >= 2*lmax+1)");
}

Beam Beam::gaussian(int lmax, double l_res) {
  Beam b(lmax);
  for (int l = 0; l <= lmax; ++l)
    b.h[l] = std::exp(-static_cast<double>(l) * (l + 1) / (2.0 * l_res * l_res));
  return b;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature (Newton refinement of Chebyshev initial guesses)
// ---------------------------------------------------------------------------

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[i] = z;  // descending: node 0 is closest to the north pole
    nodes[n - 1 - i] = -z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

// ---------------------------------------------------------------------------
// Normalized associated Legendre functions
// ---------------------------------------------------------------------------

void legendre_recurrence_coeffs(int lmax, std::vector<double>& rec_a,
                                std::vector<double>& rec_b) {
  const std::size_t nalm = static_cast<std::size_t>(lmax + 1) * (lmax + 2) / 2;
  rec_a.assign(nalm, 0.0);
  rec_b.assign(nalm, 0.0);
  for (int m = 0; m <= lmax; ++m) {
    const std::size_t off = Alm::block_offset(lmax, m);
    if (m > 0)  // sectoral step P_{m-1,m-1} -> P_{m,m} (the sign carries the CS phase)
      rec_a[off] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    if (m < lmax)  // first subdiagonal P_{m,m} -> P_{m+1,m}
      rec_a[off + 1] = std::sqrt(2.0 * m + 3.0);
    for (int l = m + 2; l <= lmax; ++l) {
      const double num = 4.0 * l * l - 1.0;
      const double den = static_cast<double>(l) * l - static_cast<double>(m) * m;
      rec_a[off + (l - m)] = std::sqrt(num / den);
      rec_b[off + (l - m)] = std::sqrt((2.0 * l + 1.0) *
                                       (static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                       ((2.0 * l - 3.0) * den));
    }
  }
}

namespace {

// Power-of-two rescaling keeps the sectoral seed representable at high m
// (P_mm ~ sin^m theta underflows near the poles above l ~ 150).
constexpr double kRescale = 0x1.0p-960;
constexpr double kInvRescale = 0x1.0p+960;
constexpr double kSmallTrigger = 0x1.0p-480;
constexpr double kBigTrigger = 0x1.0p+480;

inline double descale(double v, int scale) {
  while (scale-- > 0) v *= kRescale;  // underflow to 0 is the correct limit
  return v;
}

}  // namespace

void normalized_plm_row(int lmax, double x, double s,
                        std::span<const double> rec_a, std::span<const double> rec_b,
                        std::span<double> row) {
  double sect = kInvSqrt4Pi;
  int sect_scale = 0;
  for (int m = 0; m <= lmax; ++m) {
    const std::size_t off = Alm::block_offset(lmax, m);
    if (m > 0) {
      sect *= -rec_a[off] * s;
      if (std::abs(sect) < kSmallTrigger) {
        sect *= kInvRescale;
        ++sect_scale;
      }
    }
    double p_prev = sect;  // P_{m,m} in the scaled frame
    int scale = sect_scale;
    row[off] = descale(p_prev, scale);
    if (m == lmax) break;
    double p = rec_a[off + 1] * x * p_prev;  // P_{m+1,m}
    row[off + 1] = descale(p, scale);
    for (int l = m + 2; l <= lmax; ++l) {
      const std::size_t i = off + (l - m);
      const double p_next = rec_a[i] * x * p - rec_b[i] * p_prev;
      p_prev = p;
      p = p_next;
      if (scale > 0 && std::abs(p) > kBigTrigger) {
        p *= kRescale;
        p_prev *= kRescale;
        --scale;
      }
      row[i] = descale(p, scale);
    }
  }
}

// ---------------------------------------------------------------------------
// ShtPlan
// ---------------------------------------------------------------------------

ShtPlan::ShtPlan(const GridSpec& grid) : grid_(grid) {
  grid.validate();
  const int lmax = grid.lmax, nlat = grid.nlat, nlon = grid.nlon;

  gauss_legendre(nlat, mu_, weight_);
  sin_theta_.resize(nlat);
  for (int j = 0; j < nlat; ++j) sin_theta_[j] = std::sqrt(1.0 - mu_[j] * mu_[j]);

  cosm_.resize(static_cast<std::size_t>(lmax + 1) * nlon);
  sinm_.resize(static_cast<std::size_t>(lmax + 1) * nlon);
  for (int m = 0; m <= lmax; ++m) {
    for (int k = 0; k < nlon; ++k) {
      const double phi = 2.0 * kPi * k / nlon;
      cosm_[static_cast<std::size_t>(m) * nlon + k] = std::cos(m * phi);
      sinm_[static_cast<std::size_t>(m) * nlon + k] = std::sin(m * phi);
    }
  }

  legendre_recurrence_coeffs(lmax, rec_a_, rec_b_);

  const std::size_t nalm = static_cast<std::size_t>(lmax + 1) * (lmax + 2) / 2;
  const std::size_t table_doubles = nalm * static_cast<std::size_t>(nlat);
  tabulated_ = table_doubles <= (std::size_t{64} << 20) / sizeof(double);
  if (tabulated_) {
    plm_.resize(table_doubles);
    for (int j = 0; j < nlat; ++j)
      normalized_plm_row(lmax, mu_[j], sin_theta_[j], rec_a_, rec_b_,
                         std::span<double>(plm_.data() + j * nalm, nalm));
  }
}

void ShtPlan::plm_row(int j, std::span<double> row) const {
  normalized_plm_row(grid_.lmax, mu_[j], sin_theta_[j], rec_a_, rec_b_, row);
}

const double* ShtPlan::plm_data(int j, std::vector<double>& scratch) const {
  const std::size_t nalm = static_cast<std::size_t>(grid_.lmax + 1) * (grid_.lmax + 2) / 2;
  if (tabulated_) return plm_.data() + j * nalm;
  if (scratch.size() != nalm) scratch.resize(nalm);
  plm_row(j, scratch);
  return scratch.data();
}

std::shared_ptr<const ShtPlan> ShtPlan::get(const GridSpec& grid) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const ShtPlan>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(grid.lmax, grid.nlat, grid.nlon);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = std::shared_ptr<const ShtPlan>(new ShtPlan(grid));
  cache.emplace(key, plan);
  return plan;
}

Alm ShtPlan::analysis(const SphereMap& map) const {
  if (!(map.grid == grid_)) throw ConfigError("analysis: map grid does not match plan");
  const int lmax = grid_.lmax, nlat = grid_.nlat, nlon = grid_.nlon;
  const double dphi = 2.0 * kPi / nlon;

  Alm out(lmax);
  auto coeffs = out.coeffs();
  std::vector<std::complex<double>> g(lmax + 1);
  std::vector<double> scratch;

  for (int j = 0; j < nlat; ++j) {
    const double* f = map.values.data() + static_cast<std::size_t>(j) * nlon;
    // Longitude sums g_m = dphi * sum_k f_k exp(-i m phi_k)
    for (int m = 0; m <= lmax; ++m) {
      const double* cm = cosm_.data() + static_cast<std::size_t>(m) * nlon;
      const double* sm = sinm_.data() + static_cast<std::size_t>(m) * nlon;
      double re = 0.0, im = 0.0;
      for (int k = 0; k < nlon; ++k) {
        re += f[k] * cm[k];
        im -= f[k] * sm[k];
      }
      g[m] = {re * dphi, im * dphi};
    }
    // Legendre projection with the quadrature weight
    const double* P = plm_data(j, scratch);
    const double wj = weight_[j];
    for (int m = 0; m <= lmax; ++m) {
      const std::size_t off = Alm::block_offset(lmax, m);
      const std::complex<double> gm = wj * g[m];
      for (int l = m; l <= lmax; ++l) coeffs[off + (l - m)] += P[off + (l - m)] * gm;
    }
  }
  return out;
}

SphereMap ShtPlan::synthesis(const Alm& alm) const {
  if (alm.lmax() != grid_.lmax)
    throw ConfigError("synthesis: alm lmax does not match plan grid");
  const int lmax = grid_.lmax, nlat = grid_.nlat, nlon = grid_.nlon;

  SphereMap out(grid_);
  auto coeffs = alm.coeffs();
  std::vector<std::complex<double>> F(lmax + 1);
  std::vector<double> scratch;

  for (int j = 0; j < nlat; ++j) {
    const double* P = plm_data(j, scratch);
    for (int m = 0; m <= lmax; ++m) {
      const std::size_t off = Alm::block_offset(lmax, m);
      std::complex<double> acc = 0.0;
      for (int l = m; l <= lmax; ++l) acc += P[off + (l - m)] * coeffs[off + (l - m)];
      F[m] = acc;
    }
    double* f = out.values.data() + static_cast<std::size_t>(j) * nlon;
    for (int k = 0; k < nlon; ++k) f[k] = F[0].real();
    for (int m = 1; m <= lmax; ++m) {
      const double* cm = cosm_.data() + static_cast<std::size_t>(m) * nlon;
      const double* sm = sinm_.data() + static_cast<std::size_t>(m) * nlon;
      const double fr = 2.0 * F[m].real(), fi = 2.0 * F[m].imag();
      for (int k = 0; k < nlon; ++k) f[k] += fr * cm[k] - fi * sm[k];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

Alm analysis(const SphereMap& map) { return ShtPlan::get(map.grid)->analysis(map); }

SphereMap synthesis(const Alm& alm, const GridSpec& grid) {
  if (!grid.can_hold(alm.lmax()))
    throw ConfigError("synthesis: grid cannot hold lmax = " + std::to_string(alm.lmax()));
  if (alm.lmax() == grid.lmax) return ShtPlan::get(grid)->synthesis(alm);
  // Embed a lower band limit into the grid's band limit.
  Alm padded(grid.lmax);
  for (int m = 0; m <= alm.lmax(); ++m)
    for (int l = m; l <= alm.lmax(); ++l) padded.at(l, m) = alm.at(l, m);
  return ShtPlan::get(grid)->synthesis(padded);
}

Alm convolve(const Alm& alm, const Beam& beam) {
  if (beam.lmax != alm.lmax()) throw ConfigError("convolve: beam/alm lmax mismatch");
  Alm out(alm.lmax());
  auto in = alm.coeffs();
  auto oc = out.coeffs();
  for (int m = 0; m <= alm.lmax(); ++m) {
    const std::size_t off = Alm::block_offset(alm.lmax(), m);
    for (int l = m; l <= alm.lmax(); ++l) oc[off + (l - m)] = beam.h[l] * in[off + (l - m)];
  }
  return out;
}

PowerSpectrum power_spectrum(const Alm& alm) {
  PowerSpectrum ps(alm.lmax());
  for (int m = 0; m <= alm.lmax(); ++m) {
    const double w = (m == 0) ? 1.0 : 2.0;
    for (int l = m; l <= alm.lmax(); ++l) ps.c[l] += w * std::norm(alm.at(l, m));
  }
  for (int l = 0; l <= alm.lmax(); ++l) ps.c[l] /= 2.0 * l + 1.0;
  return ps;
}

Alm white_noise_alm(int lmax, double sigma_harmonic, std::uint64_t rng_seed) {
  if (sigma_harmonic < 0.0) throw ConfigError("white_noise_alm: sigma must be >= 0");
  Alm out(lmax);
  if (sigma_harmonic == 0.0) return out;
  Rng rng(rng_seed);
  const double s = sigma_harmonic / std::sqrt(2.0);
  // m = 0 coefficients are real with variance sigma^2; m > 0 get sigma^2/2
  // in each component, so E[c_l] = sigma^2 at every degree.
  for (int l = 0; l <= lmax; ++l) out.at(l, 0) = {sigma_harmonic * rng.normal(), 0.0};
  for (int m = 1; m <= lmax; ++m)
    for (int l = m; l <= lmax; ++l) out.at(l, m) = {s * rng.normal(), s * rng.normal()};
  return out;
}

double dot_weighted(const Alm& a, const Alm& b) {
  if (a.lmax() != b.lmax()) throw ContractError("dot_weighted: lmax mismatch");
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  const std::size_t m0 = static_cast<std::size_t>(a.lmax()) + 1;  // size of the m = 0 block
  double acc = 0.0;
  for (std::size_t i = 0; i < m0; ++i)
    acc += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
  double acc2 = 0.0;
  for (std::size_t i = m0; i < ca.size(); ++i)
    acc2 += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
  return acc + 2.0 * acc2;
}

double norm_weighted(const Alm& a) { return std::sqrt(dot_weighted(a, a)); }

double norm_weighted(std::span<const Alm> set) {
  double acc = 0.0;
  for (const Alm& a : set) acc += dot_weighted(a, a);
  return std::sqrt(acc);
}

}  // namespace sdec
