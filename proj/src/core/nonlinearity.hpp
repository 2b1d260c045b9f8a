#pragma once

namespace porohom {

/// h_p(r) = r + η r^p.
double h_p(double r, double eta, double p);
/// h_p'(r) = 1 + η p r^{p-1} ≥ 1.
double h_p_prime(double r, double eta, double p);

/// Entropy density Ψ(r) = r log r - r + 1 + η/(p-1) r^p, with 0·log 0 = 0.
double psi(double r, double eta, double p);

}  // namespace porohom
