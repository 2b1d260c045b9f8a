#pragma once

#include <functional>
#include <span>

namespace porohom {

/// y = A x for a symmetric positive (semi)definite operator.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgOptions {
  double tolerance = 1e-10;  // relative residual ||b - Ax|| / ||b||
  int max_iterations = 1000;
  /// Constant nullspace: the right-hand side and every iterate are projected
  /// onto mean-zero vectors.
  bool singular = false;
  bool throw_on_failure = true;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients. `x` holds the initial guess on entry.
/// `inverse_diagonal` enables Jacobi preconditioning when non-empty.
CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> rhs,
                            std::span<double> x, const CgOptions& options,
                            std::span<const double> inverse_diagonal = {});

double mean(std::span<const double> v);
void remove_mean(std::span<double> v);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

}  // namespace porohom
