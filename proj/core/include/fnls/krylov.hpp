#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fnls/operators.hpp"

namespace fnls {

using LinearMap = std::function<Vector(const Vector&)>;

struct GmresOptions {
  double tol = 1e-6;
  int maxit = 1000;
  std::optional<Vector> x0;  // defaults to zero
};

struct SolveReport {
  Vector solution;
  int iterations = 0;
  std::vector<double> relative_residuals;  // Givens estimates, one per step
  bool converged = false;
  double wall_seconds = 0.0;
  double final_true_relres = 0.0;
  // Set when the recomputed true residual of the returned iterate misses the
  // requested tolerance by more than a factor of 10 (Givens-recurrence drift).
  bool true_residual_suspect = false;
};

/// GMRES without restart; modified Gram-Schmidt Arnoldi, Givens-rotation
/// least squares. With a preconditioner P the method iterates on
/// P^{-1}A x = P^{-1}b and stops once ||P^{-1}(b - A x_k)|| / ||P^{-1}b||
/// drops to tol. Arnoldi breakdown with the residual already at tolerance is
/// reported as convergence; otherwise it throws.
SolveReport gmres(const LinearMap& A, const LinearMap* preconditioner,
                  const Vector& b, const GmresOptions& opts = {});

struct SweepPoint {
  double omega;
  int iterations;  // maxit+1 when not converged within the point's budget
  bool converged;
};

struct SweepResult {
  int best_iterations;
  double omega_lo;  // maximal contiguous grid interval attaining the minimum
  double omega_hi;
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  double tol = 1e-6;
  int maxit = 1000;
  /// When false, points are given an adaptive budget of best-so-far
  /// iterations, which leaves the minimum and its interval exact while
  /// skipping the full cost of clearly worse parameters. Set true to obtain
  /// the exact per-point iteration curve.
  bool exact_curve = false;
};

/// Runs gmres over the omega grid for preconditioners produced by
/// make_preconditioner(omega) (may return an empty function for an invalid
/// parameter, recorded as non-converged) and reports the minimum iteration
/// count with the maximal contiguous interval attaining it.
SweepResult omega_sweep(
    const LinearMap& A, const Vector& b,
    const std::function<std::optional<LinearMap>(double)>& make_preconditioner,
    const std::vector<double>& omega_grid, const SweepOptions& opts = {});

/// Uniform grid start, start+step, ..., up to stop (inclusive within 1e-12).
std::vector<double> uniform_grid(double start, double stop, double step);

}  // namespace fnls
