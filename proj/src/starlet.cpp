#include "sdec/starlet.hpp"

#include <cmath>

#include "sdec/errors.hpp"

namespace sdec {

namespace {

// Cubic B-spline B3(t) on its support [-2, 2]:
// (|t-2|^3 - 4|t-1|^3 + 6|t|^3 - 4|t+1|^3 + |t+2|^3) / 12.
double b3_spline(double t) {
  auto c = [](double v) { v = std::abs(v); return v * v * v; };
  return (c(t - 2.0) - 4.0 * c(t - 1.0) + 6.0 * c(t) - 4.0 * c(t + 1.0) + c(t + 2.0)) / 12.0;
}

}  // namespace

double starlet_profile(double x) {
  x = std::abs(x);
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  // B3(0) = 2/3, B3(+-2) = 0: map [1/2, 1] onto [0, 2] and renormalize,
  // giving a C1 taper from 1 down to 0.
  return 1.5 * b3_spline(4.0 * x - 2.0);
}

int default_nscales(int lmax) {
  if (lmax >= 32) return 4;
  int j = static_cast<int>(std::floor(std::log2(static_cast<double>(lmax)))) - 1;
  return j < 1 ? 1 : j;
}

StarletBank build_bank(int lmax, int nscales) {
  if (nscales < 1) throw ConfigError("build_bank: nscales must be >= 1");
  if ((1 << nscales) > lmax)
    throw ConfigError("build_bank: 2^nscales = " + std::to_string(1 << nscales) +
                      " exceeds lmax = " + std::to_string(lmax));
  StarletBank bank;
  bank.lmax = lmax;
  bank.nscales = nscales;

  // phi_0 = 1 identically; phi_j has cutoff lmax / 2^j.
  auto phi = [&](int j, int l) -> double {
    if (j == 0) return 1.0;
    const double scale = static_cast<double>(1 << j);
    return starlet_profile(scale * l / lmax);
  };

  bank.band_filters.assign(nscales + 1, std::vector<double>(lmax + 1, 0.0));
  for (int l = 0; l <= lmax; ++l) {
    for (int j = 1; j <= nscales; ++j)
      bank.band_filters[j - 1][l] = phi(j - 1, l) - phi(j, l);
    bank.band_filters[nscales][l] = phi(nscales, l);
  }
  return bank;
}

StarletCoeffs starlet_analysis(const Alm& alm, const StarletBank& bank, const GridSpec& grid) {
  if (alm.lmax() != bank.lmax)
    throw ConfigError("starlet_analysis: alm lmax does not match bank");
  StarletCoeffs out;
  out.scales.reserve(bank.band_filters.size());
  for (const auto& filter : bank.band_filters) {
    Beam band(bank.lmax);
    band.h = filter;
    out.scales.push_back(synthesis(convolve(alm, band), grid));
  }
  return out;
}

StarletCoeffs starlet_analysis(const SphereMap& map, const StarletBank& bank) {
  return starlet_analysis(analysis(map), bank, map.grid);
}

SphereMap starlet_synthesis(const StarletCoeffs& coeffs) {
  if (coeffs.scales.empty()) throw ConfigError("starlet_synthesis: no scales");
  SphereMap out = coeffs.scales.front();
  for (std::size_t j = 1; j < coeffs.scales.size(); ++j) {
    if (!(coeffs.scales[j].grid == out.grid))
      throw ConfigError("starlet_synthesis: scales on different grids");
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += coeffs.scales[j].values[i];
  }
  return out;
}

}  // namespace sdec
