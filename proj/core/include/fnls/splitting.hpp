#pragma once

#include <string_view>
#include <vector>

#include "fnls/operators.hpp"

namespace fnls {

/// Interval hulls for the spectra entering the alternating-splitting bound:
/// [lambda_min, lambda_max] encloses the (nonpositive) diagonal spectrum and
/// [mu_min, mu_max] the (positive) Toeplitz spectrum.
struct SpectralIntervals {
  double lambda_min;
  double lambda_max;
  double mu_min;
  double mu_max;

  SpectralIntervals(double lmin, double lmax, double mumin, double mumax);
};

/// Convergence-rate bound of the diagonal/normal alternating iteration,
///   sigma(w) = max_{l in spec(D)} |(w+l)/(w-l)|
///            * max_{m in spec(T)} sqrt(((w-m)^2+1)/((w+m)^2+1)),
/// always < 1 for w > 0 when D <= 0 and T > 0.
double sigma_bound(double omega, const std::vector<double>& d_spectrum,
                   const std::vector<double>& t_spectrum);

/// Interval relaxation sigma_hat(w) = sigma1(w) * sigma2(w) of sigma(w).
double sigma_hat(double omega, const SpectralIntervals& iv);

/// Minimizer of the diagonal factor sigma1; requires lambda_min < 0,
/// otherwise sigma1 == 1 for every w and the minimizer is undefined.
struct OmegaStar {
  double omega;
  double factor_value;  // sigma1 or sigma2 evaluated at omega by closed form
  bool defined;
};
OmegaStar omega_star1(const SpectralIntervals& iv);
/// Crossing-point minimizer of the normal-block factor sigma2:
/// sqrt(mu_min*mu_max - 1) when mu_min*mu_max > 1, else sqrt(mu_min^2 + 1).
OmegaStar omega_star2(const SpectralIntervals& iv);

/// Result of minimizing sigma_hat over w > 0 by the case analysis on the
/// candidate intervals between sqrt(lambda_min*lambda_max) and the sigma2
/// crossing points, with interior critical points obtained from the quartic
///   Ups*w^4 + Th*w^2 + Xi = 0,
///   Ups = mu - lambda, Th = 2*lambda*(mu^2-1) - mu*(mu^2+lambda^2+1),
///   Xi = lambda*(mu^2+1)*(lambda*mu - mu^2 - 1),
/// solved as a quadratic in w^2.
struct OmegaResult {
  double omega_opt;
  double sigma_hat_at_opt;
  // Case labels: a, b, c, d1, d2 (mu_min*mu_max > 1) and e, f otherwise.
  std::string_view branch;
};
OmegaResult optimal_omega(const SpectralIntervals& iv);

/// Quartic coefficients for d/dw g(lambda, mu; w) = 0 (exposed for tests).
struct QuarticCoefficients {
  double ups;
  double th;
  double xi;
};
QuarticCoefficients critical_point_quartic(double lambda, double mu);

/// Stationary alternating iteration on the block system: half-step with the
/// diagonal part, half-step with the normal Toeplitz-block part. The second
/// half-step is solved by a dense Schur reduction; this is a reference
/// implementation for theory checks at small M, not a production solver.
struct DntbIterationResult {
  Vector solution;
  int iterations;
  std::vector<double> residual_history;  // ||f - R x_k|| / ||f||
  bool converged;
};
DntbIterationResult dntb_iterate(const BlockSystem& sys, double omega,
                                 const Vector& x0, double tol, int maxit);

/// Open-interval eigenvalue bounds for the discrete fractional Laplacian
/// (which = T, valid for M >= 4) or its even-order Strang circulant
/// approximation (which = C, valid for even M >= 8). Degenerate (0 lower
/// bound) at alpha = 2 where theta vanishes.
enum class BoundedMatrix { T, C };
struct EigenvalueBounds {
  double lower;
  double upper;
  bool degenerate;
};
EigenvalueBounds eigenvalue_bounds(const GridSpec& grid, BoundedMatrix which);

/// Condition-number upper bounds implied by the eigenvalue bounds.
double condition_number_bound(const GridSpec& grid, BoundedMatrix which);

}  // namespace fnls
