#include "nonlinearity.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace porohom {

namespace {
void require_nonnegative(double r, const char* what) {
  if (!(r >= 0.0))
    throw Error(ErrorKind::domain, std::string(what) + " requires r >= 0, got " + std::to_string(r));
}
}  // namespace

double h_p(double r, double eta, double p) {
  require_nonnegative(r, "h_p");
  return r + eta * std::pow(r, p);
}

double h_p_prime(double r, double eta, double p) {
  require_nonnegative(r, "h_p'");
  return 1.0 + eta * p * std::pow(r, p - 1.0);
}

double psi(double r, double eta, double p) {
  require_nonnegative(r, "psi");
  const double entropy = r > 0.0 ? r * std::log(r) : 0.0;
  return entropy - r + 1.0 + eta / (p - 1.0) * std::pow(r, p);
}

}  // namespace porohom
