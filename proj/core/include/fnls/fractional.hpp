#pragma once

#include <cstddef>
#include <vector>

namespace fnls {

/// Order of the fractional Laplacian, restricted to (1, 2].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Centered-difference coefficients c_0 .. c_{n-1} of the Riesz fractional
/// derivative of order alpha:
///   c_k = (-1)^k Gamma(alpha+1) / [Gamma(alpha/2-k+1) Gamma(alpha/2+k+1)].
/// c_0 >= 0, c_k <= 0 for k >= 1, and sum_{k != 0} |c_k| = c_0.
struct CoefficientTable {
  FractionalOrder alpha;
  std::vector<double> coeffs;

  double operator[](std::size_t k) const { return coeffs[k]; }
  std::size_t size() const { return coeffs.size(); }
};

/// Computes c_0 .. c_{n-1} by the ratio recurrence
///   c_{k+1} = c_k (k - alpha/2) / (k + 1 + alpha/2)
/// seeded with c_0 = exp(lgamma(alpha+1) - 2 lgamma(alpha/2+1)), which avoids
/// the sign-alternating Gamma factors and their overflow for large k.
CoefficientTable compute_coefficients(FractionalOrder alpha, std::size_t n);

/// Lower/upper bounds on the coefficient tail sum_{j > k0} |c_j|, k0 >= 3.
struct TailBounds {
  double lower;
  double upper;
};
TailBounds tail_bounds(FractionalOrder alpha, int k0);

/// Constants entering the eigenvalue bounds of the discrete fractional
/// Laplacian and its circulant approximation:
///   theta  = (1 - (1+a)/(5+a/2))^{5+a/2} e^{1+a} Gamma(a+1) sin(pi a/2) / (pi a)
///   theta0 = sqrt(2) e^{13/12} Gamma(1+a) sin(pi a/2) / (pi a)
/// Both vanish at alpha = 2 (sine factor); that case is flagged degenerate
/// rather than rejected, since alpha = 2 is a valid experiment setting.
struct BoundConstants {
  double theta;
  double theta0;
  bool degenerate;
};
BoundConstants bound_constants(FractionalOrder alpha);

}  // namespace fnls
