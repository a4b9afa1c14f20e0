#ifndef SDEC_STARLET_HPP_
#define SDEC_STARLET_HPP_

#include <vector>

#include "sdec/sphere.hpp"

namespace sdec {

/// Isotropic undecimated starlet frame as a harmonic-domain filter bank.
/// band_filters[0..nscales-1] are the wavelet bands psi_1..psi_J (fine to
/// coarse), band_filters[nscales] is the coarse scaling filter phi_J.
/// The filters telescope: sum_j band[j][l] = 1 for every l, so summation of
/// the scale maps reconstructs the input exactly.
struct StarletBank {
  int lmax = 0;
  int nscales = 0;
  std::vector<std::vector<double>> band_filters;

  const std::vector<double>& wavelet(int j) const { return band_filters[j - 1]; }  // j in 1..J
  const std::vector<double>& coarse() const { return band_filters[nscales]; }
};

/// One map per scale, sharing a single grid.
struct StarletCoeffs {
  std::vector<SphereMap> scales;  // w_1..w_J, then coarse c_J
};

/// Low-pass profile used by the bank: identically 1 up to half the cutoff,
/// then tapers to 0 along a B3 spline arc. prof(0) = 1, prof(x) = 0 for
/// x >= 1.
double starlet_profile(double x);

/// Scale-j smoothing filter phi_j(l) = prof(2^j l / lmax), cutoff lmax/2^j.
/// Bands are psi_j = phi_{j-1} - phi_j with phi_0 = 1 on the whole band.
/// Throws ConfigError when 2^nscales > lmax.
StarletBank build_bank(int lmax, int nscales);

/// Default scale count: 4 when lmax >= 32, else floor(log2(lmax)) - 1.
int default_nscales(int lmax);

/// Scale maps of a band-limited field (analysis with Phi^T).
StarletCoeffs starlet_analysis(const SphereMap& map, const StarletBank& bank);
/// Same, starting from harmonic coefficients (saves one transform).
StarletCoeffs starlet_analysis(const Alm& alm, const StarletBank& bank, const GridSpec& grid);

/// First-generation reconstruction: pointwise sum of all scale maps.
SphereMap starlet_synthesis(const StarletCoeffs& coeffs);

}  // namespace sdec

#endif  // SDEC_STARLET_HPP_
