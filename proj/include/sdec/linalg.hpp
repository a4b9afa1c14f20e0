#ifndef SDEC_LINALG_HPP_
#define SDEC_LINALG_HPP_

#include <span>
#include <vector>

namespace sdec {

/// Small dense row-major matrix. Everything in this project is at most
/// a few tens of rows/columns, so no effort is spent on blocking.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> d;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), d(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return d[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return d[static_cast<std::size_t>(r) * cols + c]; }

  static Mat identity(int n);
};

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
double frobenius_norm(const Mat& a);

/// Eigendecomposition of a symmetric matrix: values descending,
/// vectors(i, k) = i-th component of the k-th eigenvector (orthonormal columns).
struct SymEig {
  std::vector<double> values;
  Mat vectors;
};

/// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius norm
/// drops below 1e-14 * ||m||, capped at 100 sweeps.
/// Throws ContractError if the input asymmetry exceeds 1e-10 relative.
SymEig sym_eig(const Mat& m);

/// Cholesky factorization of a symmetric positive definite matrix,
/// reusable across many right-hand sides (one factor per degree l in the
/// solver, applied to every order m).
class Cholesky {
 public:
  /// Throws SingularError on a non-positive pivot.
  static Cholesky factor(const Mat& m);

  /// Solves L L^T x = b in place.
  void solve_in_place(std::span<double> b) const;

  int dim() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> l_;  // lower triangle, row-major full storage
};

/// SPD solve; Cholesky-based. Throws SingularError on a non-PD pivot.
std::vector<double> solve_spd(const Mat& m, std::span<const double> rhs);

/// Moore-Penrose pseudo-inverse via eigendecomposition of the Gram matrix.
/// Singular values below rcond * sigma_max are treated as zero.
Mat pinv(const Mat& m, double rcond = 1e-12);

/// 2-norm condition number sigma_max / sigma_min; +infinity if rank-deficient.
double cond(const Mat& m);

}  // namespace sdec

#endif  // SDEC_LINALG_HPP_
