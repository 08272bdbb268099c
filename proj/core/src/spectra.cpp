#include "fnls/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "fnls/preconditioners.hpp"

namespace fnls {

namespace {

void check_size_guard(int m) {
  if (m > 2048)
    throw std::invalid_argument("spectra: dense assembly limited to M <= 2048");
}

Eigen::MatrixXd dense_symmetric_from_column(const std::vector<double>& col,
                                            bool circulant) {
  const int m = static_cast<int>(col.size());
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int d = std::abs(i - j);
      out(i, j) = circulant ? col[(j - i + m) % m] : col[d];
    }
  return out;
}

}  // namespace

std::string_view to_string(AssembledMatrix which) {
  switch (which) {
    case AssembledMatrix::R: return "R";
    case AssembledMatrix::DntbInvR: return "Fdntb_inv_R";
    case AssembledMatrix::DncbInvR: return "Fdncb_inv_R";
    case AssembledMatrix::PmhssInvR: return "Fpmhss_inv_R";
    case AssembledMatrix::CpmhssInvR: return "Fcpmhss_inv_R";
  }
  return "?";
}

Eigen::MatrixXd dense_toeplitz(const ToeplitzOperator& T) {
  return dense_symmetric_from_column(T.first_column(), false);
}

Eigen::MatrixXd dense_circulant(const CirculantOperator& C) {
  return dense_symmetric_from_column(C.first_column(), true);
}

Eigen::MatrixXd dense_block(const BlockSystem& sys) {
  const int m = sys.m;
  check_size_guard(m);
  Eigen::MatrixXd td = dense_toeplitz(*sys.T);
  td -= sys.D.entries().asDiagonal();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  r.topLeftCorner(m, m) = td;
  r.bottomRightCorner(m, m) = td;
  r.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  r.bottomLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  return r;
}

Eigen::MatrixXd dense_assemble(AssembledMatrix which, const BlockSystem& sys,
                               double omega, CirculantScheme scheme) {
  const int m = sys.m;
  check_size_guard(m);
  Eigen::MatrixXd r = dense_block(sys);
  if (which == AssembledMatrix::R) return r;

  switch (which) {
    case AssembledMatrix::DntbInvR: {
      DenseDntbPreconditioner p(sys.D, *sys.T, omega);
      for (int j = 0; j < 2 * m; ++j)
        r.col(j) = 2.0 * omega * p.apply(Vector(r.col(j)));
      return r;
    }
    case AssembledMatrix::DncbInvR: {
      CirculantOperator c = CirculantOperator::approximate(*sys.T, scheme);
      DncbPreconditioner p(sys.D, c, omega);
      for (int j = 0; j < 2 * m; ++j)
        r.col(j) = 2.0 * omega * p.apply(Vector(r.col(j)));
      return r;
    }
    case AssembledMatrix::CpmhssInvR: {
      CirculantOperator c = CirculantOperator::approximate(*sys.T, scheme);
      CpmhssPreconditioner p(sys.D, c, omega);
      for (int j = 0; j < 2 * m; ++j) r.col(j) = p.apply(Vector(r.col(j)));
      return r;
    }
    case AssembledMatrix::PmhssInvR: {
      // F = [I I; -I I]^{-1} [wI+T 0; 0 wI+T] [Dh 0; 0 Dh]; applied densely,
      // figure reproduction only.
      if (!(omega > sys.D.inf_norm()))
        throw std::invalid_argument("dense_assemble: PMHSS needs omega > ||D||_inf");
      Eigen::MatrixXd s = dense_toeplitz(*sys.T);
      s.diagonal().array() += omega;
      Eigen::PartialPivLU<Eigen::MatrixXd> s_lu(s);
      Vector d_hat(m);
      for (int i = 0; i < m; ++i) {
        const double d = sys.D.entries()[i];
        d_hat[i] = (omega + 1.0 + d) / (omega + d);
      }
      for (int j = 0; j < 2 * m; ++j) {
        Vector col = r.col(j);
        Vector x1 = col.head(m) + col.tail(m);
        Vector x2 = -col.head(m) + col.tail(m);
        x1 = s_lu.solve(x1);
        x2 = s_lu.solve(x2);
        r.col(j).head(m) = x1.cwiseQuotient(d_hat);
        r.col(j).tail(m) = x2.cwiseQuotient(d_hat);
      }
      return r;
    }
    default:
      throw std::logic_error("dense_assemble: unreachable");
  }
}

SpectrumReport preconditioned_spectrum(AssembledMatrix which,
                                       const BlockSystem& sys, double omega,
                                       CirculantScheme scheme) {
  Eigen::MatrixXd mat = dense_assemble(which, sys, omega, scheme);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("preconditioned_spectrum: eigensolver failed for " +
                             std::string(to_string(which)));
  SpectrumReport report;
  report.matrix_label = std::string(to_string(which));
  report.eigenvalues = solver.eigenvalues();
  report.min_real = report.eigenvalues.real().minCoeff();
  report.max_real = report.eigenvalues.real().maxCoeff();
  report.max_abs_imag = report.eigenvalues.imag().cwiseAbs().maxCoeff();
  return report;
}

double fraction_within(const SpectrumReport& report,
                       std::complex<double> center, double radius) {
  if (report.eigenvalues.size() == 0) return 0.0;
  Eigen::Index inside = 0;
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i)
    if (std::abs(report.eigenvalues[i] - center) <= radius) ++inside;
  return static_cast<double>(inside) /
         static_cast<double>(report.eigenvalues.size());
}

std::pair<double, double> admissible_epsilon_range(const GridSpec& grid) {
  const double a = grid.alpha.value();
  const double mu = grid.mu();
  const BoundConstants bc = bound_constants(grid.alpha);
  return {std::pow(2.0, a) * mu * bc.theta0 / std::pow(grid.m - 2.0, a),
          mu * bc.theta0};
}

DecompositionReport decomposition_check(const GridSpec& grid,
                                        const CoefficientTable& coeffs,
                                        double omega, double epsilon) {
  const int m = grid.m;
  if (m < 8 || m % 2 != 0)
    throw std::invalid_argument("decomposition_check: need even M >= 8");
  if (m > 512)
    throw std::invalid_argument("decomposition_check: limited to M <= 512");
  const auto [eps_lo, eps_hi] = admissible_epsilon_range(grid);
  if (!(epsilon > eps_lo) || !(epsilon <= eps_hi))
    throw std::invalid_argument("decomposition_check: epsilon outside admissible range");

  const double a = grid.alpha.value();
  const double mu = grid.mu();
  const BoundConstants bc = bound_constants(grid.alpha);
  const int k0 =
      static_cast<int>(std::ceil(std::pow(mu * bc.theta0 / epsilon, 1.0 / a))) +
      1;

  ToeplitzOperator top(grid, coeffs);
  CirculantOperator circ =
      CirculantOperator::approximate(top, CirculantScheme::Strang);
  Eigen::MatrixXd t = dense_toeplitz(top);
  Eigen::MatrixXd c = dense_circulant(circ);
  Eigen::MatrixXd tc = t - c;

  // Corner split at column index M - k0: outermost k0 diagonals form E.
  Eigen::MatrixXd e_hat = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd f_hat = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m / 2; ++i)
    for (int j = m / 2; j < m; ++j) {
      auto& target = (j >= m - k0) ? e_hat : f_hat;
      target(i, j) = tc(i, j);
      target(j, i) = tc(j, i);
    }

  // (wI + Cblk) with circulant blocks.
  Eigen::MatrixXd wc = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  wc.topLeftCorner(m, m) = c;
  wc.bottomRightCorner(m, m) = c;
  wc.diagonal().array() += omega;
  wc.topRightCorner(m, m) -= Eigen::MatrixXd::Identity(m, m);
  wc.bottomLeftCorner(m, m) += Eigen::MatrixXd::Identity(m, m);
  Eigen::PartialPivLU<Eigen::MatrixXd> wc_lu(wc);

  Eigen::MatrixXd e_blk = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  e_blk.topLeftCorner(m, m) = e_hat;
  e_blk.bottomRightCorner(m, m) = e_hat;
  Eigen::MatrixXd f_blk = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  f_blk.topLeftCorner(m, m) = f_hat;
  f_blk.bottomRightCorner(m, m) = f_hat;

  const Eigen::MatrixXd e_wc = wc_lu.solve(e_blk);
  const Eigen::MatrixXd f_wc = wc_lu.solve(f_blk);

  // (wI+Cblk)^{-1}(wI+Hblk) - I, assembled independently of the split.
  Eigen::MatrixXd wh = wc;
  wh.topLeftCorner(m, m) += tc;
  wh.bottomRightCorner(m, m) += tc;
  const Eigen::MatrixXd lhs =
      wc_lu.solve(wh) - Eigen::MatrixXd::Identity(2 * m, 2 * m);

  DecompositionReport report;
  report.k0 = k0;
  report.rank_bound = 4 * k0;

  Eigen::BDCSVD<Eigen::MatrixXd> svd_e(e_wc);
  const auto& sv = svd_e.singularValues();
  report.norm_e = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * report.norm_e) ++rank;
  report.rank_e = rank;

  Eigen::BDCSVD<Eigen::MatrixXd> svd_f(f_wc);
  report.norm_f = svd_f.singularValues().size() ? svd_f.singularValues()[0] : 0.0;

  Eigen::BDCSVD<Eigen::MatrixXd> svd_err(Eigen::MatrixXd(lhs - e_wc - f_wc));
  report.identity_error =
      svd_err.singularValues().size() ? svd_err.singularValues()[0] : 0.0;

  const double denom = std::sqrt(
      1.0 + std::pow(omega + std::pow(2.0, a + 1.0) * grid.gamma * grid.tau *
                                 bc.theta / std::pow(grid.b - grid.a, a),
                     2.0));
  const double c0 = coeffs[0];
  report.norm_e_bound = std::sqrt(static_cast<double>(m)) * mu *
                        (c0 / 2.0 - bc.theta / std::pow(m - 0.5, a)) / denom;
  report.norm_f_bound = std::sqrt(static_cast<double>(m)) * epsilon / denom;

  report.ok = report.identity_error <= 1e-10 && report.rank_e <= report.rank_bound &&
              report.norm_e <= report.norm_e_bound &&
              report.norm_f <= report.norm_f_bound;
  return report;
}

BoundAuditReport bound_audit(const GridSpec& grid,
                             const CoefficientTable& coeffs) {
  check_size_guard(grid.m);
  BoundAuditReport report;
  ToeplitzOperator top(grid, coeffs);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> t_eig(dense_toeplitz(top),
                                                       Eigen::EigenvaluesOnly);
  report.lambda_t_min = t_eig.eigenvalues().minCoeff();
  report.lambda_t_max = t_eig.eigenvalues().maxCoeff();
  report.t_bounds = eigenvalue_bounds(grid, BoundedMatrix::T);
  report.degenerate = report.t_bounds.degenerate;
  report.t_ok = report.lambda_t_min > report.t_bounds.lower &&
                report.lambda_t_max < report.t_bounds.upper;

  report.kappa_t = report.lambda_t_max / report.lambda_t_min;
  report.kappa_t_bound = condition_number_bound(grid, BoundedMatrix::T);
  report.kappa_t_ok = report.kappa_t <= report.kappa_t_bound;

  if (grid.m >= 8 && grid.m % 2 == 0) {
    CirculantOperator circ =
        CirculantOperator::approximate(top, CirculantScheme::Strang);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> c_eig(dense_circulant(circ),
                                                         Eigen::EigenvaluesOnly);
    report.lambda_c_min = c_eig.eigenvalues().minCoeff();
    report.lambda_c_max = c_eig.eigenvalues().maxCoeff();
    report.c_bounds = eigenvalue_bounds(grid, BoundedMatrix::C);
    report.c_ok = report.lambda_c_min > report.c_bounds.lower &&
                  report.lambda_c_max < report.c_bounds.upper;
    report.kappa_c = report.lambda_c_max / report.lambda_c_min;
    report.kappa_c_bound = condition_number_bound(grid, BoundedMatrix::C);
    report.kappa_c_ok = report.kappa_c <= report.kappa_c_bound;
  }
  return report;
}

}  // namespace fnls
