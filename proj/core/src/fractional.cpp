#include "fnls/fractional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fnls {

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 1.0) || !(alpha <= 2.0))
    throw std::invalid_argument("FractionalOrder: alpha must lie in (1, 2], got " +
                                std::to_string(alpha));
}

CoefficientTable compute_coefficients(FractionalOrder alpha, std::size_t n) {
  if (n == 0) throw std::invalid_argument("compute_coefficients: n must be >= 1");
  const double a = alpha.value();
  std::vector<double> c(n);
  c[0] = std::exp(std::lgamma(a + 1.0) - 2.0 * std::lgamma(a / 2.0 + 1.0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    c[k + 1] = c[k] * (kk - a / 2.0) / (kk + 1.0 + a / 2.0);
  }
  return CoefficientTable{alpha, std::move(c)};
}

TailBounds tail_bounds(FractionalOrder alpha, int k0) {
  if (k0 < 3) throw std::invalid_argument("tail_bounds: k0 must be >= 3");
  const auto bc = bound_constants(alpha);
  const double a = alpha.value();
  return TailBounds{bc.theta / std::pow(k0 + 0.5, a),
                    bc.theta0 / std::pow(k0 - 1.0, a)};
}

BoundConstants bound_constants(FractionalOrder alpha) {
  const double a = alpha.value();
  if (a == 2.0) return BoundConstants{0.0, 0.0, true};
  const double pi = std::acos(-1.0);
  const double sine = std::sin(pi * a / 2.0);
  const double gamma_a1 = std::tgamma(a + 1.0);
  const double base = 1.0 - (1.0 + a) / (5.0 + a / 2.0);
  const double theta = std::pow(base, 5.0 + a / 2.0) * std::exp(1.0 + a) *
                       gamma_a1 * sine / (pi * a);
  const double theta0 =
      std::sqrt(2.0) * std::exp(13.0 / 12.0) * gamma_a1 * sine / (pi * a);
  return BoundConstants{theta, theta0, a == 2.0};
}

}  // namespace fnls
