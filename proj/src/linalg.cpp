#include "sdec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdec/errors.hpp"

namespace sdec {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw ContractError("matmul: inner dimensions differ");
  Mat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Mat transpose(const Mat& a) {
  Mat out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (double v : a.d) s += v * v;
  return std::sqrt(s);
}

namespace {

double off_diag_norm(const Mat& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (i != j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

}  // namespace

SymEig sym_eig(const Mat& m) {
  if (m.rows != m.cols) throw ContractError("sym_eig: matrix not square");
  const int n = m.rows;
  const double norm = frobenius_norm(m);
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  if (norm > 0.0 && asym > 1e-10 * norm)
    throw ContractError("sym_eig: input asymmetry exceeds 1e-10 relative");

  Mat a = m;
  // Symmetrize exactly so rotations preserve symmetry bit-for-bit.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(j, i) = a(i, j) = 0.5 * (a(i, j) + a(j, i));

  Mat v = Mat::identity(n);
  const double tol = 1e-14 * norm;

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diag_norm(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
            a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return diag[x] > diag[y]; });
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = diag[order[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Cholesky Cholesky::factor(const Mat& m) {
  if (m.rows != m.cols) throw ContractError("Cholesky: matrix not square");
  const int n = m.rows;
  Cholesky ch;
  ch.n_ = n;
  ch.l_.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto L = [&](int r, int c) -> double& { return ch.l_[static_cast<std::size_t>(r) * n + c]; };
  for (int j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > 0.0))
      throw SingularError("Cholesky: non-positive pivot at row " + std::to_string(j));
    L(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return ch;
}

void Cholesky::solve_in_place(std::span<double> b) const {
  const int n = n_;
  auto L = [&](int r, int c) { return l_[static_cast<std::size_t>(r) * n + c]; };
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * b[k];
    b[i] = s / L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * b[k];
    b[i] = s / L(i, i);
  }
}

std::vector<double> solve_spd(const Mat& m, std::span<const double> rhs) {
  std::vector<double> x(rhs.begin(), rhs.end());
  Cholesky::factor(m).solve_in_place(x);
  return x;
}

Mat pinv(const Mat& m, double rcond) {
  // Work with the smaller Gram matrix; sizes here never exceed ~32.
  const bool tall = m.rows >= m.cols;
  const Mat g = tall ? matmul(transpose(m), m) : matmul(m, transpose(m));
  SymEig eig = sym_eig(g);
  const int k = static_cast<int>(eig.values.size());
  double smax = 0.0;
  for (double v : eig.values) smax = std::max(smax, std::sqrt(std::max(v, 0.0)));
  const double cut = rcond * smax;

  // gram_pinv = V diag(1/lambda) V^T over retained eigenpairs
  Mat gp(k, k);
  for (int e = 0; e < k; ++e) {
    const double sv = std::sqrt(std::max(eig.values[e], 0.0));
    if (sv <= cut || sv == 0.0) continue;
    const double inv = 1.0 / eig.values[e];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) gp(i, j) += inv * eig.vectors(i, e) * eig.vectors(j, e);
  }
  // tall: pinv = (A^T A)^+ A^T; wide: pinv = A^T (A A^T)^+
  return tall ? matmul(gp, transpose(m)) : matmul(transpose(m), gp);
}

double cond(const Mat& m) {
  const Mat g = (m.rows >= m.cols) ? matmul(transpose(m), m) : matmul(m, transpose(m));
  SymEig eig = sym_eig(g);
  const double lmax = eig.values.front();
  const double lmin = eig.values.back();
  if (!(lmin > 0.0) || lmin <= 1e-28 * lmax)
    return std::numeric_limits<double>::infinity();
  return std::sqrt(lmax / lmin);
}

}  // namespace sdec
