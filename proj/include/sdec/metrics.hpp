#ifndef SDEC_METRICS_HPP_
#define SDEC_METRICS_HPP_

#include <vector>

#include "sdec/simulate.hpp"

namespace sdec {

/// BSS output is defined up to permutation and sign; metrics are computed
/// after resolving both against the ground truth.
/// perm[n] is the estimated column matched to true column n.
struct Alignment {
  std::vector<int> perm;
  std::vector<double> signs;
};

/// Maximum-|correlation| assignment between estimated and true mixing
/// columns: exhaustive over permutations for Ns <= 6, greedy above.
Alignment align(const MixingMatrix& a_est, const MixingMatrix& a_true);

MixingMatrix apply_alignment(const MixingMatrix& a_est, const Alignment& alignment);
std::vector<Alm> apply_alignment(const std::vector<Alm>& s_est, const Alignment& alignment);

/// -20 log10( ||H_ref * S* - S||_F / ||H_ref * S*||_F ), m-weighted harmonic
/// norms, estimate aligned first. Capped at +300 dB; higher is better.
double nmse_db(const std::vector<Alm>& s_est, const std::vector<Alm>& s_true,
               const Beam& beam_ref, const Alignment& alignment);

/// Mixing-matrix criterion: align a_est, then
/// -10 log10( mean |pinv(A) A* - I| ). Capped at +300 dB.
double ca_db(const MixingMatrix& a_est, const MixingMatrix& a_true);

/// Convolve best-resolution estimates by H_worst / H_best (channel 1's and
/// channel Nc's original beams) for the worse-resolution NMSE column.
std::vector<Alm> degrade_to_worst(const std::vector<Alm>& s, const std::vector<Beam>& beams_original);

}  // namespace sdec

#endif  // SDEC_METRICS_HPP_
