// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Heavier end-to-end statistical checks run
// seeds on a worker pool (cap with SDEC_THREADS).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "sdec/bench.hpp"
#include "sdec/config.hpp"
#include "sdec/io.hpp"
#include "sdec/metrics.hpp"
#include "sdec/parallel.hpp"
#include "sdec/rng.hpp"
#include "sdec/simulate.hpp"
#include "sdec/solver.hpp"
#include "sdec/sphere.hpp"
#include "sdec/starlet.hpp"

using namespace sdec;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Alm random_band_limited(int lmax, Rng& rng) {
  Alm alm(lmax);
  for (int l = 0; l <= lmax; ++l) alm.at(l, 0) = {rng.normal(), 0.0};
  for (int m = 1; m <= lmax; ++m)
    for (int l = m; l <= lmax; ++l) alm.at(l, m) = {rng.normal(), rng.normal()};
  return alm;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(5);
  s << v;
  return s.str();
}

// --------------------------------------------------------------------------
// 1. Transform correctness: round trip + Parseval at 1e-9, under 10 s.
// --------------------------------------------------------------------------
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rt = 0.0, worst_parseval = 0.0;
  constexpr double kPi = 3.141592653589793238462643383279502884;
  int count = 0;
  for (int lmax : {16, 64}) {
    const GridSpec grid = GridSpec::for_lmax(lmax);
    std::vector<double> mu, w;
    gauss_legendre(grid.nlat, mu, w);
    Rng rng(900 + lmax);
    for (int trial = 0; trial < 25; ++trial) {
      ++count;
      const Alm alm = random_band_limited(lmax, rng);
      const SphereMap map = synthesis(alm, grid);
      const Alm back = analysis(map);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < alm.coeffs().size(); ++i) {
        num += std::norm(back.coeffs()[i] - alm.coeffs()[i]);
        den += std::norm(alm.coeffs()[i]);
      }
      worst_rt = std::max(worst_rt, std::sqrt(num / den));

      double quad = 0.0;
      const double dphi = 2.0 * kPi / grid.nlon;
      for (int j = 0; j < grid.nlat; ++j)
        for (int k = 0; k < grid.nlon; ++k)
          quad += w[j] * dphi * map.at(j, k) * map.at(j, k);
      const double harm = dot_weighted(alm, alm);
      worst_parseval = std::max(worst_parseval, std::abs(quad - harm) / harm);
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, worst_rt < 1e-9 && worst_parseval < 1e-9 && elapsed < 10.0 && count == 50,
         "transform round trip and Parseval on 50 random fields",
         "max roundtrip " + fmt(worst_rt) + ", max Parseval " + fmt(worst_parseval) +
             ", " + fmt(elapsed) + " s");
}

// --------------------------------------------------------------------------
// 2. Starlet perfect reconstruction at lmax=64, J=4.
// --------------------------------------------------------------------------
void criterion_2() {
  const int lmax = 64, J = 4;
  const GridSpec grid = GridSpec::for_lmax(lmax);
  const StarletBank bank = build_bank(lmax, J);

  double worst_sum = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    double sum = 0.0;
    for (const auto& f : bank.band_filters) sum += f[l];
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }

  double worst_rec = 0.0;
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const SphereMap map = synthesis(random_band_limited(lmax, rng), grid);
    const SphereMap rec = starlet_synthesis(starlet_analysis(map, bank));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
      num += (rec.values[i] - map.values[i]) * (rec.values[i] - map.values[i]);
      den += map.values[i] * map.values[i];
    }
    worst_rec = std::max(worst_rec, std::sqrt(num / den));
  }
  report(2, worst_rec < 1e-9 && worst_sum < 1e-12,
         "starlet reconstruction (20 maps, lmax=64, J=4)",
         "max reconstruction " + fmt(worst_rec) + ", filter sum dev " + fmt(worst_sum));
}

// --------------------------------------------------------------------------
// 3. S-update equals an independent dense normal-equations solve.
// --------------------------------------------------------------------------
std::vector<std::complex<double>> gauss_solve(Mat sys, std::vector<std::complex<double>> rhs) {
  const int n = sys.rows;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(sys(r, col)) > std::abs(sys(pivot, col))) pivot = r;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(sys(col, c), sys(pivot, c));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = sys(r, col) / sys(col, col);
      for (int c = col; c < n; ++c) sys(r, c) -= f * sys(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (int r = n - 1; r >= 0; --r) {
    std::complex<double> acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= sys(r, c) * x[c];
    x[r] = acc / sys(r, r);
  }
  return x;
}

void criterion_3() {
  const int lmax = 8, ns = 2, nc = 4;
  double worst_sol = 0.0, worst_grad = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SceneConfig cfg = SceneConfig::desk_default(lmax);
    cfg.n_sources = ns;
    cfg.n_channels = nc;
    cfg.seed = seed;
    const Scene scene = make_scene(cfg);
    const auto beams = normalize_to_best_channel(scene.beams);

    std::vector<PowerSpectrum> spectra;
    for (const Alm& s : scene.sources) {
      PowerSpectrum ps = power_spectrum(convolve(s, scene.beams.back()));
      for (double& v : ps.c) v = std::max(v, 1e-12);
      spectra.push_back(ps);
    }
    const std::vector<RegStrategy> strategies = {
        RegStrategy::naive(0.05), RegStrategy::eig_max(0.03), RegStrategy::eig_floor(0.4),
        RegStrategy::snr(1.0, spectra,
                         std::max(scene.noise_sigma * scene.noise_sigma, 1e-300))};

    for (const RegStrategy& strategy : strategies) {
      const auto s_hat = update_s_tikhonov(scene.channels, scene.mixing, beams, strategy);
      for (int l = 0; l <= lmax; ++l) {
        Mat m_l(ns, ns);
        for (int nu = 0; nu < nc; ++nu)
          for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j)
              m_l(i, j) += beams[nu].h[l] * beams[nu].h[l] * scene.mixing.a(nu, i) *
                           scene.mixing.a(nu, j);
        const auto eps = epsilon(strategy, m_l, scene.mixing, l);
        Mat sys = m_l;
        for (int n = 0; n < ns; ++n) sys(n, n) += eps[n];
        for (int m = 0; m <= l; ++m) {
          std::vector<std::complex<double>> rhs(ns, 0.0);
          for (int nu = 0; nu < nc; ++nu)
            for (int n = 0; n < ns; ++n)
              rhs[n] += scene.mixing.a(nu, n) * beams[nu].h[l] * scene.channels[nu].at(l, m);
          const auto x = gauss_solve(sys, rhs);
          for (int n = 0; n < ns; ++n) {
            const double scale = std::max(1.0, std::abs(x[n]));
            worst_sol = std::max(worst_sol, std::abs(s_hat[n].at(l, m) - x[n]) / scale);
          }
          for (int n = 0; n < ns; ++n) {
            std::complex<double> grad = 0.0;
            for (int nu = 0; nu < nc; ++nu) {
              std::complex<double> model = 0.0;
              for (int n2 = 0; n2 < ns; ++n2)
                model += scene.mixing.a(nu, n2) * s_hat[n2].at(l, m);
              grad += scene.mixing.a(nu, n) * beams[nu].h[l] *
                      (scene.channels[nu].at(l, m) - beams[nu].h[l] * model);
            }
            grad -= eps[n] * s_hat[n].at(l, m);
            worst_grad = std::max(worst_grad, std::abs(grad));
          }
        }
      }
    }
  }
  report(3, worst_sol < 1e-10 && worst_grad < 1e-9,
         "S-update vs dense oracle, 20 problems x 4 strategies",
         "max solution dev " + fmt(worst_sol) + ", max optimality residual " +
             fmt(worst_grad));
}

// --------------------------------------------------------------------------
// 4. Wiener equivalence of strategy #4 at Ns=1, A=[1], c=1.
// --------------------------------------------------------------------------
void criterion_4() {
  const int lmax = 32;
  Rng rng(4);
  const Alm truth = random_band_limited(lmax, rng);
  const Beam beam = Beam::gaussian(lmax, 10.0);
  const double sigma = 0.15;
  Alm y = convolve(truth, beam);
  const Alm noise = white_noise_alm(lmax, sigma, 44);
  for (std::size_t i = 0; i < y.coeffs().size(); ++i) y.coeffs()[i] += noise.coeffs()[i];

  std::vector<PowerSpectrum> spectra{power_spectrum(truth)};
  MixingMatrix a;
  a.a = Mat::identity(1);
  const auto s_hat =
      update_s_tikhonov({y}, a, {beam}, RegStrategy::snr(1.0, spectra, sigma * sigma));

  double worst = 0.0;
  for (int m = 0; m <= lmax; ++m)
    for (int l = m; l <= lmax; ++l) {
      const double h = beam.h[l];
      const double wiener = h / (h * h + sigma * sigma / spectra[0].c[l]);
      const std::complex<double> expect = wiener * y.at(l, m);
      worst = std::max(worst,
                       std::abs(s_hat[0].at(l, m) - expect) / std::max(1.0, std::abs(expect)));
    }
  report(4, worst < 1e-12, "strategy #4 reproduces the scalar Wiener filter",
         "max deviation " + fmt(worst));
}

// --------------------------------------------------------------------------
// 5. Noiseless exact recovery of S (A fixed at truth) and of A (S at truth).
// --------------------------------------------------------------------------
void criterion_5() {
  SceneConfig cfg = SceneConfig::desk_default(32);
  cfg.seed = 5;
  cfg.snr_db = std::numeric_limits<double>::infinity();
  const Scene scene = make_scene(cfg);
  std::vector<Beam> id(cfg.n_channels, Beam::identity(cfg.lmax));
  const auto channels = forward(scene.sources, scene.mixing, id);

  SolverConfig sv;
  sv.n_sources = cfg.n_sources;
  sv.k_mad = 0.0;
  sv.c_wu_start = 1e-10;
  sv.c_wu_end = 1e-12;
  sv.c_ref = 1e-12;
  sv.warmup_kind = RegKind::Naive;
  sv.refinement_kind = RegKind::Naive;
  sv.max_iters = 6;
  sv.min_warmup_iters = 1;
  const SolverState state = solve(channels, id, sv, 0.0, scene.mixing);

  double num = 0.0, den = 0.0;
  for (int n = 0; n < cfg.n_sources; ++n)
    for (std::size_t i = 0; i < scene.sources[n].coeffs().size(); ++i) {
      num += std::norm(state.s[n].coeffs()[i] - scene.sources[n].coeffs()[i]);
      den += std::norm(scene.sources[n].coeffs()[i]);
    }
  const double s_err = std::sqrt(num / den);

  const MixingMatrix a_hat = update_a(channels, scene.sources, id);
  const Alignment al = align(a_hat, scene.mixing);
  const MixingMatrix aligned = apply_alignment(a_hat, al);
  double a_err = 0.0;
  for (std::size_t i = 0; i < aligned.a.d.size(); ++i)
    a_err += (aligned.a.d[i] - scene.mixing.a.d[i]) * (aligned.a.d[i] - scene.mixing.a.d[i]);
  a_err = std::sqrt(a_err);

  report(5, s_err < 1e-6 && a_err < 1e-8, "noiseless exact recovery",
         "S rel err " + fmt(s_err) + ", A err " + fmt(a_err));
}

// --------------------------------------------------------------------------
// 6. Non-blind strategy ordering at the reference desk scene.
// --------------------------------------------------------------------------
void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const int nseeds = 20;
  StrategyBenchConfig cfg;
  cfg.base = SceneConfig::desk_default(64);  // Ns=4, Nc=8, cond 2, SNR 10
  for (int s = 1; s <= nseeds; ++s) cfg.seeds.push_back(s);
  cfg.points = {{"snr", 10.0}};
  const auto rows = bench_strategies(cfg);

  double mean[4] = {0, 0, 0, 0};
  double degr[4] = {0, 0, 0, 0};
  for (int k = 0; k < 4; ++k) {
    mean[k] = rows[k].mean_nmse_db;
    degr[k] = rows[k].degradation_db;
  }
  // order: naive(#1), eig_max(#2), eig_floor(#3), snr(#4)
  const bool pass = mean[3] > mean[0] && mean[3] > mean[1] && mean[3] > mean[2] &&
                    mean[2] > mean[0] && mean[2] > mean[1] && degr[0] < 0.0 &&
                    degr[1] < 0.0 && degr[2] < 0.0;
  const double elapsed = seconds_since(t0);
  report(6, pass && elapsed < 900.0,
         "strategy ordering over 20 seeds (#4 best, #3 over #1/#2)",
         "mean NMSE dB #1 " + fmt(mean[0]) + ", #2 " + fmt(mean[1]) + ", #3 " +
             fmt(mean[2]) + ", #4 " + fmt(mean[3]) + ", " + fmt(elapsed) + " s");
}

// --------------------------------------------------------------------------
// 7. (c_wu, c_ref) sensitivity: c_wu axis flat, c_ref axis decisive.
// --------------------------------------------------------------------------
void criterion_7() {
  GridBenchConfig cfg;
  cfg.scene = SceneConfig::desk_default(64);
  cfg.solver.n_sources = cfg.scene.n_sources;
  cfg.solver.max_iters = 120;
  for (int s = 1; s <= 12; ++s) cfg.seeds.push_back(s);
  const GridBenchResult result = run_grid(cfg);

  const int nwu = static_cast<int>(cfg.wu_exps.size());
  const int nref = static_cast<int>(cfg.ref_exps.size());
  std::vector<double> col_mean(nwu, 0.0), row_mean(nref, 0.0);
  double best = -1e300;
  double best_ref_exp = 0.0;
  for (const GridCell& c : result.cells) {
    const int i = static_cast<int>(std::find(cfg.wu_exps.begin(), cfg.wu_exps.end(), c.wu_exp) -
                                   cfg.wu_exps.begin());
    const int j = static_cast<int>(std::find(cfg.ref_exps.begin(), cfg.ref_exps.end(),
                                             c.ref_exp) -
                                   cfg.ref_exps.begin());
    col_mean[i] += c.mean_nmse_db / nref;
    row_mean[j] += c.mean_nmse_db / nwu;
    if (c.mean_nmse_db > best) {
      best = c.mean_nmse_db;
      best_ref_exp = c.ref_exp;
    }
  }
  const double wu_spread = *std::max_element(col_mean.begin(), col_mean.end()) -
                           *std::min_element(col_mean.begin(), col_mean.end());
  const double ref_spread = *std::max_element(row_mean.begin(), row_mean.end()) -
                            *std::min_element(row_mean.begin(), row_mean.end());

  double worst_nearby_loss = 0.0;
  for (const GridCell& c : result.cells)
    if (std::abs(c.ref_exp - best_ref_exp) <= 0.5)
      worst_nearby_loss = std::max(worst_nearby_loss, best - c.mean_nmse_db);

  report(7, wu_spread < ref_spread && worst_nearby_loss < 3.0,
         "hyperparameter sensitivity grid over 10 seeds",
         "c_wu spread " + fmt(wu_spread) + " dB < c_ref spread " + fmt(ref_spread) +
             " dB; max loss within half a decade of c_ref_opt " +
             fmt(worst_nearby_loss) + " dB");
}

// --------------------------------------------------------------------------
// 8. Algorithm comparison: SDecGMCA vs #2-throughout vs GMCA baseline.
// The scene widens the source band to lmax * 3/8 so the channel resolutions
// genuinely differ inside the band; with the narrow default band the worst
// beam barely attenuates the sources and degrading to a common resolution
// costs the baseline almost nothing.
// --------------------------------------------------------------------------
void criterion_8() {
  const int nseeds = 16;
  std::vector<double> sdec_best(nseeds), sdec_worse(nseeds), sdec_ca(nseeds);
  std::vector<double> var2_best(nseeds), var2_ca(nseeds);
  std::vector<double> gmca_worse(nseeds), gmca_ca(nseeds);

  parallel_for(nseeds, [&](int i) {
    SceneConfig scfg = SceneConfig::desk_default(64);
    scfg.seed = static_cast<std::uint64_t>(i + 1);
    scfg.source_band_limit = 24;
    scfg.sparsity_count = 8;
    const Scene scene = make_scene(scfg);

    RunOptions sdec;
    sdec.solver.n_sources = scfg.n_sources;
    sdec.solver.max_iters = 120;
    const RunOutcome r1 = run_scene(scene, sdec);
    sdec_best[i] = r1.nmse_best_db;
    sdec_worse[i] = r1.nmse_worse_db;
    sdec_ca[i] = r1.ca_db_value;

    RunOptions variant2 = sdec;
    variant2.solver.refinement_kind = RegKind::EigMax;
    const RunOutcome r2 = run_scene(scene, variant2);
    var2_best[i] = r2.nmse_best_db;
    var2_ca[i] = r2.ca_db_value;

    RunOptions gmca = sdec;
    gmca.mode = RunMode::Gmca;
    const RunOutcome r3 = run_scene(scene, gmca);
    gmca_worse[i] = r3.nmse_worse_db;
    gmca_ca[i] = r3.ca_db_value;
  });

  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  const double m_sdec_best = mean(sdec_best), m_sdec_worse = mean(sdec_worse);
  const double m_sdec_ca = mean(sdec_ca);
  const double m_var2_best = mean(var2_best), m_var2_ca = mean(var2_ca);
  const double m_gmca_worse = mean(gmca_worse), m_gmca_ca = mean(gmca_ca);

  const bool pass = m_sdec_best > m_var2_best && m_sdec_worse > m_gmca_worse &&
                    m_sdec_ca >= m_var2_ca && m_sdec_ca >= m_gmca_ca;
  report(8, pass, "SDecGMCA beats the #2 variant and the GMCA baseline",
         "NMSE best " + fmt(m_sdec_best) + " vs " + fmt(m_var2_best) +
             "; NMSE worse " + fmt(m_sdec_worse) + " vs gmca " + fmt(m_gmca_worse) +
             "; C_A " + fmt(m_sdec_ca) + " vs " + fmt(m_var2_ca) + "/" + fmt(m_gmca_ca));
}

// --------------------------------------------------------------------------
// 9. Metric fixtures.
// --------------------------------------------------------------------------
void criterion_9() {
  const int lmax = 8;
  Rng rng(9);
  std::vector<Alm> truth(2, Alm(lmax));
  for (auto& s : truth)
    for (int m = 0; m <= lmax; ++m)
      for (int l = m; l <= lmax; ++l)
        s.at(l, m) = {rng.normal(), (m == 0) ? 0.0 : rng.normal()};
  const Beam ref = Beam::identity(lmax);
  Alignment id;
  id.perm = {0, 1};
  id.signs = {1.0, 1.0};

  const double zero_db = nmse_db(std::vector<Alm>(2, Alm(lmax)), truth, ref, id);
  const double cap_db = nmse_db(truth, truth, ref, id);

  MixingMatrix eye;
  eye.a = Mat::identity(2);
  Mat perturbed = Mat::identity(2);
  perturbed(0, 0) += 0.01;
  perturbed(0, 1) += 0.01;
  perturbed(1, 0) -= 0.01;
  perturbed(1, 1) -= 0.01;
  MixingMatrix est;
  est.a = pinv(perturbed);
  const double twenty = ca_db(est, eye);
  const double ca_cap = ca_db(eye, eye);

  report(9,
         zero_db == 0.0 && cap_db == 300.0 && std::abs(twenty - 20.0) < 1e-6 &&
             ca_cap == 300.0,
         "metric fixtures (0 dB, 20 dB, 300 dB caps)",
         "zero " + fmt(zero_db) + ", cap " + fmt(cap_db) + ", mean(1e-2) " + fmt(twenty) +
             ", ca cap " + fmt(ca_cap));
}

// --------------------------------------------------------------------------
// 10. Invariant suite: obliqueness, single phase switch, eps >= 0, strategy
//     #3 floor, bit-identical reruns.
// --------------------------------------------------------------------------
void criterion_10() {
  SceneConfig scfg = SceneConfig::desk_default(32);
  scfg.seed = 10;
  const Scene scene = make_scene(scfg);
  const auto beams = normalize_to_best_channel(scene.beams);

  SolverConfig sv;
  sv.n_sources = scfg.n_sources;
  sv.max_iters = 60;
  const SolverState state = solve(scene.channels, beams, sv, scene.noise_sigma);

  int transitions = 0;
  for (std::size_t i = 1; i < state.history.size(); ++i)
    if (state.history[i].phase != state.history[i - 1].phase) ++transitions;

  bool eps_ok = state.min_epsilon_seen >= 0.0;
  Rng rng(123);
  for (int trial = 0; trial < 50 && eps_ok; ++trial) {
    Mat b(3, 3);
    for (double& v : b.d) v = rng.normal();
    const Mat m = matmul(transpose(b), b);
    Mat araw(5, 3);
    for (double& v : araw.d) v = rng.normal();
    MixingMatrix a{araw};
    a.project_oblique();
    const double c = std::abs(rng.normal());
    const double lmin_m = sym_eig(m).values.back();
    const double lmin_ata = sym_eig(matmul(transpose(a.a), a.a)).values.back();
    const auto eps = epsilon(RegStrategy::eig_floor(c), m, a, 0);
    if (eps[0] < 0.0) eps_ok = false;
    if (lmin_m >= c * lmin_ata && eps[0] != 0.0) eps_ok = false;
    for (RegStrategy s : {RegStrategy::naive(c), RegStrategy::eig_max(c)})
      for (double e : epsilon(s, m, a, 0))
        if (e < 0.0) eps_ok = false;
  }

  // determinism: identical config + seed produce bit-identical CSV bytes
  RunOptions opt;
  opt.solver = sv;
  const RunOutcome r1 = run_scene(scene, opt);
  const RunOutcome r2 = run_scene(scene, opt);
  const auto dir = std::filesystem::temp_directory_path() / "sdec_acceptance";
  std::filesystem::create_directories(dir);
  write_metrics_csv((dir / "m1.csv").string(), {r1});
  write_metrics_csv((dir / "m2.csv").string(), {r2});
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const bool identical = slurp(dir / "m1.csv") == slurp(dir / "m2.csv");

  report(10,
         state.max_oblique_deviation < 1e-12 && transitions == 1 && eps_ok && identical,
         "invariants: A oblique, one phase switch, eps >= 0, determinism",
         "oblique dev " + fmt(state.max_oblique_deviation) + ", transitions " +
             std::to_string(transitions) + ", identical CSV " +
             (identical ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_9();
  criterion_10();
  criterion_6();
  criterion_8();
  criterion_7();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
