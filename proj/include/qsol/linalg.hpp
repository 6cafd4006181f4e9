#pragma once

#include <span>
#include <vector>

#include "qsol/functional.hpp"

namespace qsol {

/// y = A x.
std::vector<double> multiply(const Tridiagonal& A, std::span<const double> x);

/// Solves A x = rhs in place with partial pivoting. Returns false when A is
/// singular to working precision.
bool solve_tridiagonal(Tridiagonal A, std::span<double> rhs);

/// Cholesky-type factorization of a symmetric positive definite tridiagonal
/// matrix, reused across many right-hand sides.
class SpdTridiagonalSolver {
 public:
  explicit SpdTridiagonalSolver(const Tridiagonal& A);
  std::size_t size() const noexcept { return d_.size(); }
  void solve(std::span<double> rhs) const;

 private:
  std::vector<double> d_;
  std::vector<double> e_;
};

}  // namespace qsol
