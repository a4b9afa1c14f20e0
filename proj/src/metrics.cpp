#include "sdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdec/errors.hpp"

namespace sdec {

namespace {

constexpr double kCapDb = 300.0;

// Correlation matrix between unit-normalized columns.
Mat column_correlations(const Mat& a, const Mat& b) {
  Mat corr(a.cols, b.cols);
  for (int i = 0; i < a.cols; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int r = 0; r < a.rows; ++r) {
        dot += a(r, i) * b(r, j);
        na += a(r, i) * a(r, i);
        nb += b(r, j) * b(r, j);
      }
      const double den = std::sqrt(na * nb);
      corr(i, j) = (den > 0.0) ? dot / den : 0.0;
    }
  return corr;
}

}  // namespace

Alignment align(const MixingMatrix& a_est, const MixingMatrix& a_true) {
  if (a_est.a.rows != a_true.a.rows || a_est.a.cols != a_true.a.cols)
    throw ConfigError("align: shape mismatch");
  const int ns = a_true.a.cols;
  const Mat corr = column_correlations(a_est.a, a_true.a);  // corr(est, true)

  Alignment out;
  out.perm.resize(ns);
  out.signs.assign(ns, 1.0);

  if (ns <= 6) {
    std::vector<int> perm(ns), best(ns);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (int n = 0; n < ns; ++n) score += std::abs(corr(perm[n], n));
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.perm = best;
  } else {
    // Greedy: repeatedly take the largest remaining |correlation|.
    std::vector<bool> est_used(ns, false), true_used(ns, false);
    for (int step = 0; step < ns; ++step) {
      int bi = -1, bj = -1;
      double bv = -1.0;
      for (int i = 0; i < ns; ++i) {
        if (est_used[i]) continue;
        for (int j = 0; j < ns; ++j) {
          if (true_used[j]) continue;
          if (std::abs(corr(i, j)) > bv) {
            bv = std::abs(corr(i, j));
            bi = i;
            bj = j;
          }
        }
      }
      out.perm[bj] = bi;
      est_used[bi] = true;
      true_used[bj] = true;
    }
  }
  for (int n = 0; n < ns; ++n)
    out.signs[n] = (corr(out.perm[n], n) < 0.0) ? -1.0 : 1.0;
  return out;
}

MixingMatrix apply_alignment(const MixingMatrix& a_est, const Alignment& alignment) {
  const int ns = static_cast<int>(alignment.perm.size());
  MixingMatrix out;
  out.a = Mat(a_est.a.rows, ns);
  for (int n = 0; n < ns; ++n)
    for (int r = 0; r < a_est.a.rows; ++r)
      out.a(r, n) = alignment.signs[n] * a_est.a(r, alignment.perm[n]);
  return out;
}

std::vector<Alm> apply_alignment(const std::vector<Alm>& s_est, const Alignment& alignment) {
  const int ns = static_cast<int>(alignment.perm.size());
  std::vector<Alm> out;
  out.reserve(ns);
  for (int n = 0; n < ns; ++n) {
    Alm sn = s_est[alignment.perm[n]];
    if (alignment.signs[n] < 0.0)
      for (auto& c : sn.coeffs()) c = -c;
    out.push_back(std::move(sn));
  }
  return out;
}

double nmse_db(const std::vector<Alm>& s_est, const std::vector<Alm>& s_true,
               const Beam& beam_ref, const Alignment& alignment) {
  if (s_est.size() != s_true.size()) throw ConfigError("nmse_db: source count mismatch");
  const std::vector<Alm> aligned = apply_alignment(s_est, alignment);
  double num2 = 0.0, den2 = 0.0;
  for (std::size_t n = 0; n < s_true.size(); ++n) {
    const Alm ref = convolve(s_true[n], beam_ref);
    auto cr = ref.coeffs();
    auto ce = aligned[n].coeffs();
    const std::size_t m0 = static_cast<std::size_t>(ref.lmax()) + 1;
    for (std::size_t i = 0; i < cr.size(); ++i) {
      const double w = (i < m0) ? 1.0 : 2.0;
      num2 += w * std::norm(cr[i] - ce[i]);
      den2 += w * std::norm(cr[i]);
    }
  }
  if (den2 == 0.0) throw ConfigError("nmse_db: zero ground truth");
  if (num2 == 0.0) return kCapDb;
  return std::min(kCapDb, -10.0 * std::log10(num2 / den2));
}

double ca_db(const MixingMatrix& a_est, const MixingMatrix& a_true) {
  const Alignment alignment = align(a_est, a_true);
  const MixingMatrix aligned = apply_alignment(a_est, alignment);
  const Mat p = pinv(aligned.a);
  if (cond(aligned.a) == std::numeric_limits<double>::infinity())
    throw SingularError("ca_db: rank-deficient estimate");
  const Mat delta = matmul(p, a_true.a);
  const int ns = a_true.a.cols;
  double mean = 0.0;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      mean += std::abs(delta(i, j) - ((i == j) ? 1.0 : 0.0));
  mean /= static_cast<double>(ns) * ns;
  // pinv leaves ~1e-15 residue even for an exact match; snap machine noise
  // to the cap so equality reports 300 dB instead of a rounding artifact.
  if (mean < 1e-14) return kCapDb;
  return std::min(kCapDb, -10.0 * std::log10(mean));
}

std::vector<Alm> degrade_to_worst(const std::vector<Alm>& s,
                                  const std::vector<Beam>& beams_original) {
  if (beams_original.empty()) throw ConfigError("degrade_to_worst: no beams");
  const Beam& worst = beams_original.front();
  const Beam& best = beams_original.back();
  Beam ratio(worst.lmax);
  for (int l = 0; l <= worst.lmax; ++l) {
    if (!(best.h[l] > 0.0))
      throw ConfigError("degrade_to_worst: best beam vanishes at degree " + std::to_string(l));
    ratio.h[l] = worst.h[l] / best.h[l];
  }
  std::vector<Alm> out;
  out.reserve(s.size());
  for (const Alm& sn : s) out.push_back(convolve(sn, ratio));
  return out;
}

}  // namespace sdec
