#pragma once

// Thin RAII wrapper over UMFPACK's complex LU for column-major Eigen
// sparse matrices, plus a 1-norm condition estimate.

#include <umfpack.h>

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "ioncav/errors.hpp"
#include "ioncav/qspace.hpp"

namespace ioncav {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

class SparseComplexLU {
 public:
  /// Factorize `a`. A structurally or numerically singular matrix leaves
  /// `singular()` true instead of throwing.
  explicit SparseComplexLU(SparseMatrix a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols()) throw LayoutError("LU needs a square matrix");
    a_.makeCompressed();
    umfpack_zi_defaults(control_.data());
    const int n = static_cast<int>(a_.rows());
    status_ = umfpack_zi_symbolic(n, n, a_.outerIndexPtr(), a_.innerIndexPtr(), values(), nullptr,
                                  &symbolic_, control_.data(), info_.data());
    if (status_ != UMFPACK_OK) {
      if (status_ == UMFPACK_WARNING_singular_matrix) singular_ = true;
      else throw SolverError("UMFPACK symbolic analysis failed with status " + std::to_string(status_));
      return;
    }
    status_ = umfpack_zi_numeric(a_.outerIndexPtr(), a_.innerIndexPtr(), values(), nullptr,
                                 symbolic_, &numeric_, control_.data(), info_.data());
    if (status_ == UMFPACK_WARNING_singular_matrix) {
      singular_ = true;
    } else if (status_ != UMFPACK_OK) {
      throw SolverError("UMFPACK factorization failed with status " + std::to_string(status_));
    }
  }

  SparseComplexLU(const SparseComplexLU&) = delete;
  SparseComplexLU& operator=(const SparseComplexLU&) = delete;

  ~SparseComplexLU() {
    if (numeric_) umfpack_zi_free_numeric(&numeric_);
    if (symbolic_) umfpack_zi_free_symbolic(&symbolic_);
  }

  bool singular() const noexcept { return singular_; }
  Eigen::Index size() const noexcept { return a_.rows(); }
  const SparseMatrix& matrix() const noexcept { return a_; }

  /// Solve A x = b, or A^H x = b when `adjoint` is set.
  Vector solve(const Vector& b, bool adjoint = false) const {
    if (singular_ || !numeric_) throw SolverError("solve on a singular factorization");
    Vector x(b.size());
    std::array<double, UMFPACK_INFO> info{};
    const int status = umfpack_zi_solve(
        adjoint ? UMFPACK_At : UMFPACK_A, a_.outerIndexPtr(), a_.innerIndexPtr(), values(), nullptr,
        reinterpret_cast<double*>(x.data()), nullptr, reinterpret_cast<const double*>(b.data()),
        nullptr, numeric_, control_.data(), info.data());
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
      throw SolverError("UMFPACK solve failed with status " + std::to_string(status));
    return x;
  }

  /// Induced 1-norm of A.
  double norm1() const {
    double out = 0.0;
    for (int k = 0; k < a_.outerSize(); ++k) {
      double col = 0.0;
      for (SparseMatrix::InnerIterator it(a_, k); it; ++it) col += std::abs(it.value());
      out = std::max(out, col);
    }
    return out;
  }

  /// Hager/Higham estimate of ||A^-1||_1 (a lower bound, usually tight).
  double inverse_norm1_estimate() const {
    const Eigen::Index n = size();
    Vector x = Vector::Constant(n, Complex(1.0 / static_cast<double>(n), 0.0));
    double estimate = 0.0;
    Eigen::Index last_j = -1;
    for (int iter = 0; iter < 5; ++iter) {
      const Vector y = solve(x);
      estimate = y.cwiseAbs().sum();
      const Vector xi = y.unaryExpr([](Complex v) {
        const double a = std::abs(v);
        return a > 0.0 ? v / a : Complex(1.0, 0.0);
      });
      const Vector z = solve(xi, true);
      Eigen::Index j = 0;
      const double zmax = z.cwiseAbs().maxCoeff(&j);
      if (zmax <= z.dot(x).real() || j == last_j) break;
      x.setZero();
      x(j) = 1.0;
      last_j = j;
    }
    // alternating-sign probe
    Vector alt(n);
    const double span = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      alt(i) = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / span);
    const double alt_est = 2.0 * solve(alt).cwiseAbs().sum() / (3.0 * static_cast<double>(n));
    return std::max(estimate, alt_est);
  }

  /// 1-norm condition estimate; +inf for a singular factorization.
  double condition_estimate() const {
    if (singular_) return std::numeric_limits<double>::infinity();
    return norm1() * inverse_norm1_estimate();
  }

 private:
  const double* values() const { return reinterpret_cast<const double*>(a_.valuePtr()); }

  SparseMatrix a_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  int status_ = UMFPACK_OK;
  bool singular_ = false;
  mutable std::array<double, UMFPACK_CONTROL> control_{};
  mutable std::array<double, UMFPACK_INFO> info_{};
};

}  // namespace ioncav
