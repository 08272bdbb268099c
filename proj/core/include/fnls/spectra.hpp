#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fnls/operators.hpp"
#include "fnls/splitting.hpp"

namespace fnls {

/// Dense matrices assembled for eigenvalue diagnostics at small M.
enum class AssembledMatrix {
  R,
  DntbInvR,
  DncbInvR,
  PmhssInvR,
  CpmhssInvR,
};
std::string_view to_string(AssembledMatrix which);

Eigen::MatrixXd dense_toeplitz(const ToeplitzOperator& T);
Eigen::MatrixXd dense_circulant(const CirculantOperator& C);
Eigen::MatrixXd dense_block(const BlockSystem& sys);

/// Explicit 2M x 2M matrix; preconditioner inverses are applied columnwise
/// through the fast application routines. The split-preconditioner variants
/// carry their 1/(2 omega) scalar so that the preconditioned spectra sit
/// around 1.
Eigen::MatrixXd dense_assemble(AssembledMatrix which, const BlockSystem& sys,
                               double omega,
                               CirculantScheme scheme = CirculantScheme::Strang);

struct SpectrumReport {
  std::string matrix_label;
  Eigen::VectorXcd eigenvalues;
  double min_real = 0.0;
  double max_real = 0.0;
  double max_abs_imag = 0.0;
};

SpectrumReport preconditioned_spectrum(
    AssembledMatrix which, const BlockSystem& sys, double omega,
    CirculantScheme scheme = CirculantScheme::Strang);

/// Fraction of eigenvalues within distance radius of center.
double fraction_within(const SpectrumReport& report,
                       std::complex<double> center, double radius);

/// Low-rank-plus-small-norm decomposition of the circulant-block versus
/// Toeplitz-block preconditioner deviation: with k0 = ceil((mu theta0 /
/// eps)^{1/alpha}) + 1, splits T - C into a corner part E (rank <= 2 k0) and a
/// small tail part F, and checks
///   (wI+Cblk)^{-1}(wI+Hblk) - I = E_wc + F_wc
/// together with the rank and 2-norm bounds.
struct DecompositionReport {
  int k0 = 0;
  int rank_e = 0;           // numerical rank of E_wc (cutoff 1e-10 sigma_max)
  int rank_bound = 0;       // 4 k0
  double norm_e = 0.0;
  double norm_e_bound = 0.0;
  double norm_f = 0.0;
  double norm_f_bound = 0.0;
  double identity_error = 0.0;  // || (Ft^{-1}F - I) - (E_wc + F_wc) ||_2
  bool ok = false;
};
DecompositionReport decomposition_check(const GridSpec& grid,
                                        const CoefficientTable& coeffs,
                                        double omega, double epsilon);

/// Admissible epsilon interval (2^alpha mu theta0 / (M-2)^alpha, mu theta0].
std::pair<double, double> admissible_epsilon_range(const GridSpec& grid);

/// Dense extreme eigenvalues of T and C against the analytic intervals and
/// the condition numbers against their bounds.
struct BoundAuditReport {
  bool degenerate = false;  // alpha = 2: lower bounds vanish
  double lambda_t_min = 0.0, lambda_t_max = 0.0;
  EigenvalueBounds t_bounds{};
  bool t_ok = false;
  double lambda_c_min = 0.0, lambda_c_max = 0.0;
  EigenvalueBounds c_bounds{};
  bool c_ok = false;
  double kappa_t = 0.0, kappa_t_bound = 0.0;
  bool kappa_t_ok = false;
  double kappa_c = 0.0, kappa_c_bound = 0.0;
  bool kappa_c_ok = false;
};
BoundAuditReport bound_audit(const GridSpec& grid,
                             const CoefficientTable& coeffs);

}  // namespace fnls
