#include "linear_solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace porohom {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void remove_mean(std::span<double> v) {
  const double m = mean(v);
  for (double& x : v) x -= m;
}

CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> rhs,
                            std::span<double> x, const CgOptions& options,
                            std::span<const double> inverse_diagonal) {
  const std::size_t n = rhs.size();
  std::vector<double> b(rhs.begin(), rhs.end());
  if (options.singular) {
    remove_mean(b);
    remove_mean(x);
  }

  CgResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    result.converged = true;
    return result;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  auto precondition = [&] {
    if (inverse_diagonal.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inverse_diagonal[i] * r[i];
    }
    if (options.singular) remove_mean(z);
  };

  double rnorm = norm2(r);
  result.relative_residual = rnorm / bnorm;
  if (result.relative_residual <= options.tolerance) {
    result.converged = true;
    return result;
  }

  precondition();
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= options.max_iterations; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (options.singular) remove_mean(x);
    result.iterations = it;
    rnorm = norm2(r);
    result.relative_residual = rnorm / bnorm;
    if (result.relative_residual <= options.tolerance) {
      result.converged = true;
      break;
    }
    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  if (result.converged) {
    // Recursive residuals drift from the true one; confirm before returning.
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) q[i] = b[i] - q[i];
    result.relative_residual = norm2(q) / bnorm;
    result.converged = result.relative_residual <= 10.0 * options.tolerance;
  }
  if (!result.converged && options.throw_on_failure)
    throw SolverError("conjugate gradients did not converge after " +
                          std::to_string(result.iterations) +
                          " iterations (relative residual " +
                          std::to_string(result.relative_residual) + ")",
                      result.relative_residual, result.iterations);
  return result;
}

}  // namespace porohom
