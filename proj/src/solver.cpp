#include "sdec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdec/errors.hpp"

namespace sdec {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

RegKind reg_kind_from_string(const std::string& name) {
  if (name == "naive") return RegKind::Naive;
  if (name == "eig_max") return RegKind::EigMax;
  if (name == "eig_floor") return RegKind::EigFloor;
  if (name == "snr") return RegKind::Snr;
  throw ConfigError("unknown regularization strategy '" + name +
                    "' (expected naive, eig_max, eig_floor or snr)");
}

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::Naive: return "naive";
    case RegKind::EigMax: return "eig_max";
    case RegKind::EigFloor: return "eig_floor";
    case RegKind::Snr: return "snr";
  }
  return "?";
}

RegStrategy RegStrategy::snr(double c, std::vector<PowerSpectrum> spectra,
                             double noise_variance) {
  RegStrategy s;
  s.kind = RegKind::Snr;
  s.c = c;
  s.source_spectra = std::move(spectra);
  s.noise_variance = noise_variance;
  return s;
}

void RegStrategy::validate(int n_sources) const {
  if (c < 0.0) throw ConfigError("RegStrategy: c must be >= 0");
  if (kind == RegKind::Snr) {
    if (static_cast<int>(source_spectra.size()) != n_sources)
      throw ConfigError("RegStrategy: Snr needs one spectrum per source");
    if (!(noise_variance > 0.0))
      throw ConfigError("RegStrategy: Snr needs a strictly positive noise level");
  }
}

std::vector<double> epsilon(const RegStrategy& strategy, const Mat& m_l,
                            const MixingMatrix& a, int l) {
  const int ns = m_l.rows;
  if (strategy.c < 0.0) throw ConfigError("epsilon: c must be >= 0");
  std::vector<double> eps(ns, 0.0);
  switch (strategy.kind) {
    case RegKind::Naive: {
      std::fill(eps.begin(), eps.end(), strategy.c);
      break;
    }
    case RegKind::EigMax: {
      const double lmax_m = sym_eig(m_l).values.front();
      std::fill(eps.begin(), eps.end(), strategy.c * std::max(lmax_m, 0.0));
      break;
    }
    case RegKind::EigFloor: {
      const double lmin_m = sym_eig(m_l).values.back();
      const double lmin_ata = sym_eig(matmul(transpose(a.a), a.a)).values.back();
      const double value =
          (lmin_ata > 0.0) ? std::max(0.0, strategy.c - lmin_m / lmin_ata) : strategy.c;
      std::fill(eps.begin(), eps.end(), value);
      break;
    }
    case RegKind::Snr: {
      const double cap = 1e12 * strategy.c;
      for (int n = 0; n < ns; ++n) {
        const double s2 = (l <= strategy.source_spectra[n].lmax)
                              ? strategy.source_spectra[n].c[l]
                              : 0.0;
        if (s2 > 0.0)
          eps[n] = std::min(strategy.c * strategy.noise_variance / s2, cap);
        else
          eps[n] = cap;  // kill the degree gracefully instead of dividing by zero
      }
      break;
    }
  }
  for (double e : eps)
    if (!(e >= 0.0)) throw SingularError("epsilon: negative or NaN regularization");
  return eps;
}

namespace {

struct SUpdateStats {
  double eps_sum = 0.0;
  double eps_min = std::numeric_limits<double>::infinity();
  std::size_t eps_count = 0;
};

std::vector<Alm> update_s_impl(const std::vector<Alm>& channels, const MixingMatrix& a,
                               const std::vector<Beam>& beams, const RegStrategy& strategy,
                               SUpdateStats* stats) {
  const int nc = static_cast<int>(channels.size());
  const int ns = a.a.cols;
  if (nc == 0 || ns == 0) throw ConfigError("update_s_tikhonov: empty problem");
  if (a.a.rows != nc) throw ConfigError("update_s_tikhonov: mixing rows != channel count");
  if (static_cast<int>(beams.size()) != nc)
    throw ConfigError("update_s_tikhonov: beam count != channel count");
  const int lmax = channels.front().lmax();
  for (const Alm& y : channels)
    if (y.lmax() != lmax) throw ConfigError("update_s_tikhonov: channels have mixed lmax");
  strategy.validate(ns);

  std::vector<Alm> s(ns, Alm(lmax));
  std::vector<double> rhs_re(ns), rhs_im(ns);

  for (int l = 0; l <= lmax; ++l) {
    // M[l] = A^T diag(H^l)^2 A
    Mat m_l(ns, ns);
    for (int nu = 0; nu < nc; ++nu) {
      const double h2 = beams[nu].h[l] * beams[nu].h[l];
      if (h2 == 0.0) continue;
      for (int i = 0; i < ns; ++i)
        for (int j = i; j < ns; ++j) m_l(i, j) += h2 * a.a(nu, i) * a.a(nu, j);
    }
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < i; ++j) m_l(i, j) = m_l(j, i);

    const std::vector<double> eps = epsilon(strategy, m_l, a, l);
    if (stats) {
      for (double e : eps) {
        stats->eps_sum += e;
        stats->eps_min = std::min(stats->eps_min, e);
      }
      stats->eps_count += eps.size();
    }

    Mat sys = m_l;
    for (int n = 0; n < ns; ++n) sys(n, n) += eps[n];
    Cholesky ch;
    try {
      ch = Cholesky::factor(sys);
    } catch (const SingularError&) {
      throw SingularError(
          "update_s_tikhonov: singular regularized system at degree l = " +
          std::to_string(l) + "; raise the regularization hyperparameter c");
    }

    // One factorization per degree, applied to every order m (real and
    // imaginary parts separately; the system is real symmetric).
    for (int m = 0; m <= l; ++m) {
      std::fill(rhs_re.begin(), rhs_re.end(), 0.0);
      std::fill(rhs_im.begin(), rhs_im.end(), 0.0);
      for (int nu = 0; nu < nc; ++nu) {
        const double h = beams[nu].h[l];
        if (h == 0.0) continue;
        const std::complex<double> y = channels[nu].at(l, m);
        const double yr = h * y.real(), yi = h * y.imag();
        for (int n = 0; n < ns; ++n) {
          rhs_re[n] += a.a(nu, n) * yr;
          rhs_im[n] += a.a(nu, n) * yi;
        }
      }
      ch.solve_in_place(rhs_re);
      ch.solve_in_place(rhs_im);
      for (int n = 0; n < ns; ++n) s[n].at(l, m) = {rhs_re[n], rhs_im[n]};
    }
  }
  return s;
}

double median_of(std::vector<double>& scratch) {
  if (scratch.empty()) return 0.0;
  const std::size_t mid = scratch.size() / 2;
  std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
  double hi = scratch[mid];
  if (scratch.size() % 2 == 1) return hi;
  std::nth_element(scratch.begin(), scratch.begin() + mid - 1, scratch.begin() + mid);
  return 0.5 * (hi + scratch[mid - 1]);
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

std::vector<Alm> update_s_tikhonov(const std::vector<Alm>& channels, const MixingMatrix& a,
                                   const std::vector<Beam>& beams,
                                   const RegStrategy& strategy) {
  return update_s_impl(channels, a, beams, strategy, nullptr);
}

namespace {

// Shared worker: lambda[n][j] < 0 requests the MAD estimate for that scale.
// high_frac > 0 lifts each threshold toward the scale's largest coefficient,
// the decreasing-threshold schedule used early in the warm-up.
ThresholdResult threshold_impl(const std::vector<Alm>& s, const StarletBank& bank,
                               std::vector<std::vector<double>> lambda, double k_mad,
                               const std::vector<StarletCoeffs>* prev, bool self_reweight,
                               double high_frac = 0.0) {
  const int ns = static_cast<int>(s.size());
  const GridSpec grid = GridSpec::for_lmax(bank.lmax);

  ThresholdResult out;
  out.s.reserve(ns);
  out.coeffs.reserve(ns);

  std::vector<double> scratch;
  for (int n = 0; n < ns; ++n) {
    StarletCoeffs coeffs = starlet_analysis(s[n], bank, grid);
    bool changed = false;
    for (int j = 0; j < bank.nscales; ++j) {
      auto& w = coeffs.scales[j].values;
      double lam = lambda[n][j];
      if (lam < 0.0) {
        scratch = w;
        const double med = median_of(scratch);
        for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = std::abs(w[i] - med);
        lam = k_mad * 1.4826 * median_of(scratch);
        lambda[n][j] = lam;
      }
      if (high_frac > 0.0) {
        double peak = 0.0;
        for (double v : w) peak = std::max(peak, std::abs(v));
        lam += high_frac * std::max(0.0, peak - lam);
        lambda[n][j] = lam;
      }
      if (lam <= 0.0) continue;
      const std::vector<double>* pw =
          (prev && n < static_cast<int>(prev->size())) ? &(*prev)[n].scales[j].values : nullptr;
      for (std::size_t i = 0; i < w.size(); ++i) {
        double t = lam;
        if (pw)
          t = lam / (1.0 + std::abs((*pw)[i]) / lam);
        else if (self_reweight)
          t = lam / (1.0 + std::abs(w[i]) / lam);
        w[i] = soft_threshold(w[i], t);
      }
      changed = true;
    }
    // Coarse scale never thresholded; skip the round trip when nothing moved.
    out.s.push_back(changed ? analysis(starlet_synthesis(coeffs)) : s[n]);
    out.coeffs.push_back(std::move(coeffs));
  }
  out.lambda = std::move(lambda);
  return out;
}

}  // namespace

ThresholdResult threshold_sources(const std::vector<Alm>& s, const StarletBank& bank,
                                  double k_mad, const std::vector<StarletCoeffs>* prev,
                                  bool self_reweight) {
  if (k_mad < 0.0) throw ConfigError("threshold_sources: k_mad must be >= 0");
  std::vector<std::vector<double>> mad_request(s.size(),
                                               std::vector<double>(bank.nscales, -1.0));
  return threshold_impl(s, bank, std::move(mad_request), k_mad, prev, self_reweight);
}

ThresholdResult threshold_sources_fixed(const std::vector<Alm>& s, const StarletBank& bank,
                                        const std::vector<std::vector<double>>& lambda,
                                        bool self_reweight, double high_frac) {
  return threshold_impl(s, bank, lambda, 0.0, nullptr, self_reweight, high_frac);
}

std::vector<std::vector<double>> threshold_stds(const MixingMatrix& a,
                                                const std::vector<Beam>& beams,
                                                const RegStrategy& strategy,
                                                const StarletBank& bank,
                                                double noise_sigma) {
  const int ns = a.a.cols;
  const int nc = a.a.rows;
  const int lmax = bank.lmax;
  std::vector<std::vector<double>> scale_var(ns, std::vector<double>(bank.nscales, 0.0));
  if (noise_sigma <= 0.0) return scale_var;

  for (int l = 0; l <= lmax; ++l) {
    Mat m(ns, ns);
    for (int nu = 0; nu < nc; ++nu) {
      const double h2 = beams[nu].h[l] * beams[nu].h[l];
      if (h2 == 0.0) continue;
      for (int i = 0; i < ns; ++i)
        for (int j = i; j < ns; ++j) m(i, j) += h2 * a.a(nu, i) * a.a(nu, j);
    }
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < i; ++j) m(i, j) = m(j, i);

    const std::vector<double> eps = epsilon(strategy, m, a, l);
    Mat sys = m;
    for (int n = 0; n < ns; ++n) sys(n, n) += eps[n];
    const Mat inv = pinv(sys);
    // diag of inv * M * inv, the noise gain of the per-degree estimator
    for (int n = 0; n < ns; ++n) {
      double gain = 0.0;
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) gain += inv(n, i) * m(i, j) * inv(j, n);
      const double var_l = noise_sigma * noise_sigma * gain;
      for (int j = 0; j < bank.nscales; ++j) {
        const double f = bank.band_filters[j][l];
        scale_var[n][j] += (2.0 * l + 1.0) / (4.0 * kPi) * f * f * var_l;
      }
    }
  }
  for (auto& row : scale_var)
    for (double& v : row) v = std::sqrt(v);
  return scale_var;
}

MixingMatrix update_a(const std::vector<Alm>& channels, const std::vector<Alm>& s,
                      const std::vector<Beam>& beams, bool* warning) {
  const int nc = static_cast<int>(channels.size());
  const int ns = static_cast<int>(s.size());
  if (nc == 0 || ns == 0) throw ConfigError("update_a: empty problem");
  const int lmax = channels.front().lmax();

  // Cross and Gram accumulators per degree; the channel-specific beam
  // weights are applied afterwards so the coefficient loops run once.
  // Degree 0 is excluded: the monopole is one fully shared coefficient per
  // channel and carries no separation information, but with positive
  // sources it enters the source Gram as a dominant rank-one term that can
  // drag the alternation into a degenerate mixing matrix.
  std::vector<Mat> cross_l(lmax + 1, Mat(nc, ns));   // sum_m w Re(Y conj(S))
  std::vector<Mat> gram_l(lmax + 1, Mat(ns, ns));    // sum_m w Re(S conj(S))
  for (int m = 0; m <= lmax; ++m) {
    const double wm = (m == 0) ? 1.0 : 2.0;
    for (int l = std::max(m, 1); l <= lmax; ++l) {
      for (int n = 0; n < ns; ++n) {
        const std::complex<double> sn = s[n].at(l, m);
        for (int n2 = n; n2 < ns; ++n2) {
          const std::complex<double> sn2 = s[n2].at(l, m);
          gram_l[l](n, n2) += wm * (sn.real() * sn2.real() + sn.imag() * sn2.imag());
        }
        for (int nu = 0; nu < nc; ++nu) {
          const std::complex<double> y = channels[nu].at(l, m);
          cross_l[l](nu, n) += wm * (y.real() * sn.real() + y.imag() * sn.imag());
        }
      }
    }
  }
  for (int l = 0; l <= lmax; ++l)
    for (int n = 0; n < ns; ++n)
      for (int n2 = 0; n2 < n; ++n2) gram_l[l](n, n2) = gram_l[l](n2, n);

  // Detect collapsed sources (zero rows make every per-channel Gram singular).
  std::vector<double> source_norm2(ns, 0.0);
  for (int n = 0; n < ns; ++n)
    for (int l = 0; l <= lmax; ++l) source_norm2[n] += gram_l[l](n, n);
  const double max_norm2 = *std::max_element(source_norm2.begin(), source_norm2.end());
  if (max_norm2 == 0.0) throw SingularError("update_a: all sources are zero");
  std::vector<int> active;
  for (int n = 0; n < ns; ++n)
    if (source_norm2[n] > 1e-24 * max_norm2) active.push_back(n);
  const bool degenerate = static_cast<int>(active.size()) < ns;

  MixingMatrix out;
  out.a = Mat(nc, ns);
  const int na = static_cast<int>(active.size());
  for (int nu = 0; nu < nc; ++nu) {
    Mat g(na, na);
    std::vector<double> b(na, 0.0);
    for (int l = 0; l <= lmax; ++l) {
      const double h = beams[nu].h[l];
      const double h2 = h * h;
      if (h == 0.0) continue;
      for (int i = 0; i < na; ++i) {
        b[i] += h * cross_l[l](nu, active[i]);
        for (int j = 0; j < na; ++j) g(i, j) += h2 * gram_l[l](active[i], active[j]);
      }
    }
    std::vector<double> x;
    try {
      x = solve_spd(g, b);
    } catch (const SingularError&) {
      // Nearly collinear sources: fall back to the pseudo-inverse.
      if (warning) *warning = true;
      const Mat gp = pinv(g);
      x.assign(na, 0.0);
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) x[i] += gp(i, j) * b[j];
    }
    for (int i = 0; i < na; ++i) out.a(nu, active[i]) = x[i];
  }

  if (degenerate) {
    // Reinitialize dead columns from the principal component of the residual.
    if (warning) *warning = true;
    std::vector<Alm> partial(nc, Alm(lmax));
    for (int nu = 0; nu < nc; ++nu) {
      Alm& y = partial[nu];
      for (int m = 0; m <= lmax; ++m)
        for (int l = m; l <= lmax; ++l) {
          std::complex<double> acc = 0.0;
          for (int i = 0; i < na; ++i) acc += out.a(nu, active[i]) * s[active[i]].at(l, m);
          y.at(l, m) = channels[nu].at(l, m) - beams[nu].h[l] * acc;
        }
    }
    Mat cov(nc, nc);
    for (int i = 0; i < nc; ++i)
      for (int j = i; j < nc; ++j) cov(j, i) = cov(i, j) = dot_weighted(partial[i], partial[j]);
    SymEig eig = sym_eig(cov);
    int next_pc = 0;
    for (int n = 0; n < ns; ++n) {
      if (source_norm2[n] > 1e-24 * max_norm2) continue;
      for (int nu = 0; nu < nc; ++nu) out.a(nu, n) = eig.vectors(nu, next_pc);
      ++next_pc;
    }
  }

  out.project_oblique();
  return out;
}

MixingMatrix pca_init(const std::vector<Alm>& channels, int n_sources) {
  const int nc = static_cast<int>(channels.size());
  if (n_sources < 1 || n_sources > nc)
    throw ConfigError("pca_init: need 1 <= n_sources <= n_channels");
  Mat cov(nc, nc);
  for (int i = 0; i < nc; ++i)
    for (int j = i; j < nc; ++j)
      cov(j, i) = cov(i, j) = dot_weighted(channels[i], channels[j]);
  SymEig eig = sym_eig(cov);
  MixingMatrix out;
  out.a = Mat(nc, n_sources);
  for (int k = 0; k < n_sources; ++k) {
    int arg = 0;
    for (int i = 1; i < nc; ++i)
      if (std::abs(eig.vectors(i, k)) > std::abs(eig.vectors(arg, k))) arg = i;
    const double sign = (eig.vectors(arg, k) < 0.0) ? -1.0 : 1.0;
    for (int i = 0; i < nc; ++i) out.a(i, k) = sign * eig.vectors(i, k);
  }
  out.project_oblique();
  return out;
}

double objective_value(const std::vector<Alm>& channels, const MixingMatrix& a,
                       const std::vector<Alm>& s, const std::vector<Beam>& beams,
                       const std::vector<std::vector<double>>& lambda) {
  const int nc = static_cast<int>(channels.size());
  const int ns = static_cast<int>(s.size());
  const int lmax = channels.front().lmax();

  double resid = 0.0;
  for (int m = 0; m <= lmax; ++m) {
    const double wm = (m == 0) ? 1.0 : 2.0;
    for (int l = m; l <= lmax; ++l) {
      for (int nu = 0; nu < nc; ++nu) {
        std::complex<double> model = 0.0;
        for (int n = 0; n < ns; ++n) model += a.a(nu, n) * s[n].at(l, m);
        model *= beams[nu].h[l];
        resid += wm * std::norm(channels[nu].at(l, m) - model);
      }
    }
  }
  double obj = 0.5 * resid;

  bool any_lambda = false;
  for (const auto& row : lambda)
    for (double v : row)
      if (v > 0.0) any_lambda = true;
  if (any_lambda) {
    const int nscales = static_cast<int>(lambda.front().size());
    const StarletBank bank = build_bank(lmax, nscales);
    const GridSpec grid = GridSpec::for_lmax(lmax);
    for (int n = 0; n < ns; ++n) {
      StarletCoeffs coeffs = starlet_analysis(s[n], bank, grid);
      for (int j = 0; j < nscales; ++j) {
        if (lambda[n][j] <= 0.0) continue;
        double l1 = 0.0;
        for (double v : coeffs.scales[j].values) l1 += std::abs(v);
        obj += lambda[n][j] * l1;
      }
    }
  }
  return obj;
}

void SolverConfig::validate() const {
  if (n_sources < 1) throw ConfigError("SolverConfig: n_sources must be >= 1");
  if (!(c_wu_start >= c_wu_end) || !(c_wu_end > 0.0))
    throw ConfigError("SolverConfig: need c_wu_start >= c_wu_end > 0");
  if (c_ref < 0.0) throw ConfigError("SolverConfig: c_ref must be >= 0");
  if (k_mad < 0.0) throw ConfigError("SolverConfig: k_mad must be >= 0");
  if (max_iters < 1) throw ConfigError("SolverConfig: max_iters must be >= 1");
  if (!(warmup_tol > 0.0) || !(final_tol > 0.0))
    throw ConfigError("SolverConfig: tolerances must be > 0");
}

namespace {

std::vector<PowerSpectrum> floored_spectra(const std::vector<Alm>& s) {
  std::vector<PowerSpectrum> spectra;
  spectra.reserve(s.size());
  for (const Alm& sn : s) {
    PowerSpectrum ps = power_spectrum(sn);
    double peak = 0.0;
    for (double v : ps.c) peak = std::max(peak, v);
    const double floor = 1e-12 * peak;
    for (double& v : ps.c) v = std::max(v, floor);
    spectra.push_back(std::move(ps));
  }
  return spectra;
}

std::vector<std::vector<double>> threshold_stds_scaled(const MixingMatrix& a,
                                                       const std::vector<Beam>& beams,
                                                       const RegStrategy& strategy,
                                                       const StarletBank& bank,
                                                       double noise_sigma, double k_mad) {
  auto lambda = threshold_stds(a, beams, strategy, bank, noise_sigma);
  for (auto& row : lambda)
    for (double& v : row) v *= k_mad;
  return lambda;
}

double rel_change(const std::vector<Alm>& s_new, const std::vector<Alm>& s_old) {
  double diff2 = 0.0, old2 = 0.0;
  for (std::size_t n = 0; n < s_new.size(); ++n) {
    auto cn = s_new[n].coeffs();
    auto co = s_old[n].coeffs();
    const std::size_t m0 = static_cast<std::size_t>(s_new[n].lmax()) + 1;
    for (std::size_t i = 0; i < cn.size(); ++i) {
      const double w = (i < m0) ? 1.0 : 2.0;
      diff2 += w * std::norm(cn[i] - co[i]);
      old2 += w * std::norm(co[i]);
    }
  }
  if (old2 == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(diff2 / old2);
}

}  // namespace

SolverState solve(const std::vector<Alm>& channels, const std::vector<Beam>& beams,
                  const SolverConfig& cfg, double noise_sigma,
                  const std::optional<MixingMatrix>& init_a) {
  cfg.validate();
  if (channels.empty()) throw ConfigError("solve: no channels");
  const int lmax = channels.front().lmax();
  const int ns = cfg.n_sources;
  const int nscales = (cfg.nscales > 0) ? cfg.nscales : default_nscales(lmax);
  const StarletBank bank = build_bank(lmax, nscales);
  const double noise_var = noise_sigma * noise_sigma;

  SolverState state;
  state.a = init_a ? *init_a : pca_init(channels, ns);
  state.a.project_oblique();
  state.phase = Phase::WarmUp;

  std::vector<Alm> s_est(ns, Alm(lmax));
  const double decay_ratio = cfg.c_wu_end / cfg.c_wu_start;
  // Both the hyperparameter and the threshold schedule decay over the
  // nominal warm-up length, capped at 50 iterations, then hold.
  const int decay_iters = std::min(std::max(cfg.min_warmup_iters, 2), 50);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    RegStrategy strategy;
    double c_eff;
    double high_frac = 0.0;
    if (state.phase == Phase::WarmUp) {
      const int t = std::min(iter, decay_iters);
      c_eff = cfg.c_wu_start *
              std::pow(decay_ratio, static_cast<double>(t - 1) / (decay_iters - 1));
      strategy.kind = cfg.warmup_kind;
      strategy.c = c_eff;
      if (cfg.k_mad > 0.0)
        high_frac = std::max(0.0, 1.0 - static_cast<double>(iter) / decay_iters);
    } else {
      c_eff = cfg.c_ref;
      strategy.kind = cfg.refinement_kind;
      strategy.c = c_eff;
    }
    if (strategy.kind == RegKind::Snr) {
      strategy.source_spectra = floored_spectra(s_est);
      strategy.noise_variance = (noise_var > 0.0) ? noise_var : 1e-300;
    }

    SUpdateStats stats;
    std::vector<Alm> s_raw;
    try {
      s_raw = update_s_impl(channels, state.a, beams, strategy, &stats);
    } catch (const SingularError& e) {
      throw SingularError(std::string(e.what()) + " (iteration " + std::to_string(iter) + ")");
    }

    // Thresholds floored at the analytically propagated noise level of this
    // iteration's estimator (zero when the data are noiseless), lifted
    // toward the per-scale maxima early in the warm-up.
    const std::vector<std::vector<double>> lambda =
        threshold_stds_scaled(state.a, beams, strategy, bank, noise_sigma, cfg.k_mad);
    ThresholdResult thr =
        threshold_sources_fixed(s_raw, bank, lambda, cfg.reweight, high_frac);
    const double rel = rel_change(thr.s, s_est);
    s_est = std::move(thr.s);

    bool warned = false;
    state.a = update_a(channels, s_est, beams, &warned);
    state.fallback_warning = state.fallback_warning || warned;
    state.max_oblique_deviation =
        std::max(state.max_oblique_deviation, state.a.oblique_deviation());

    IterRecord rec;
    rec.iter = iter;
    rec.phase = state.phase;
    rec.objective = objective_value(channels, state.a, s_est, beams, thr.lambda);
    rec.rel_change = rel;
    rec.c_effective = c_eff;
    rec.mean_epsilon = (stats.eps_count > 0) ? stats.eps_sum / stats.eps_count : 0.0;
    state.min_epsilon_seen = std::min(state.min_epsilon_seen, stats.eps_min);
    state.history.push_back(rec);
    state.iter = iter;

    if (state.phase == Phase::WarmUp) {
      // Switch when S stabilizes; if the tolerance never fires, force the
      // switch after five decay spans so the refinement stage always runs.
      if ((iter >= cfg.min_warmup_iters && rel < cfg.warmup_tol) ||
          iter >= 5 * decay_iters)
        state.phase = Phase::Refinement;
    } else if (rel < cfg.final_tol) {
      break;
    }
  }

  state.s = std::move(s_est);
  return state;
}

SolverState gmca_baseline(const std::vector<Alm>& channels, const SolverConfig& cfg,
                          double noise_sigma) {
  if (channels.empty()) throw ConfigError("gmca_baseline: no channels");
  std::vector<Beam> identity(channels.size(), Beam::identity(channels.front().lmax()));
  return solve(channels, identity, cfg, noise_sigma);
}

}  // namespace sdec
