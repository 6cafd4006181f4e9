#include "qsol/linalg.hpp"

#include <cmath>

#include <fmt/format.h>
#include <lapacke.h>

#include "qsol/errors.hpp"

namespace qsol {

std::vector<double> multiply(const Tridiagonal& A, std::span<const double> x) {
  const std::size_t n = A.diag.size();
  if (x.size() < n) throw ValidationError("multiply: vector shorter than matrix");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = A.diag[i] * x[i];
    if (i > 0) s += A.lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += A.upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

bool solve_tridiagonal(Tridiagonal A, std::span<double> rhs) {
  const auto n = static_cast<lapack_int>(A.diag.size());
  if (rhs.size() < A.diag.size()) throw ValidationError("solve_tridiagonal: rhs too short");
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, A.lower.data(), A.diag.data(),
                                        A.upper.data(), rhs.data(), n);
  if (info < 0) throw NumericalError(fmt::format("dgtsv: illegal argument {}", -info));
  if (info > 0) return false;
  for (lapack_int i = 0; i < n; ++i) {
    if (!std::isfinite(rhs[i])) return false;
  }
  return true;
}

SpdTridiagonalSolver::SpdTridiagonalSolver(const Tridiagonal& A) : d_(A.diag), e_(A.upper) {
  const auto n = static_cast<lapack_int>(d_.size());
  const lapack_int info = LAPACKE_dpttrf(n, d_.data(), e_.data());
  if (info != 0) {
    throw NumericalError(fmt::format("dpttrf: matrix not positive definite (info {})", info));
  }
}

void SpdTridiagonalSolver::solve(std::span<double> rhs) const {
  const auto n = static_cast<lapack_int>(d_.size());
  const lapack_int info =
      LAPACKE_dpttrs(LAPACK_COL_MAJOR, n, 1, d_.data(), e_.data(), rhs.data(), n);
  if (info != 0) throw NumericalError(fmt::format("dpttrs failed (info {})", info));
}

}  // namespace qsol
