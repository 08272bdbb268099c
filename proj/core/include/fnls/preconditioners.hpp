#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "fnls/operators.hpp"

namespace fnls {

/// Diagonal and normal-with-circulant-block preconditioner
///   P = [wI-D  0   ] [wI+C  -I  ]
///       [0     wI-D] [I     wI+C]
/// applied through the transform-diagonal LU factors of the circulant block.
/// All four diagonal spectra are precomputed at construction; one application
/// costs four M-length transforms plus seven M-vector operations.
class DncbPreconditioner {
 public:
  DncbPreconditioner(const DiagonalOperator& D, const CirculantOperator& C,
                     double omega);

  Vector apply(const Vector& r) const;
  double omega() const { return omega_; }
  int block_size() const { return m_; }

 private:
  int m_;
  double omega_;
  Vector d_tilde;                             // w - d_j
  std::vector<std::complex<double>> u11;      // w + lambda_k
  std::vector<std::complex<double>> l21;      // (w + lambda_k)^{-1}
  std::vector<std::complex<double>> u22;      // u11 + l21
  std::shared_ptr<const Dft> dft_;
};

/// Circulant-improved PMHSS preconditioner
///   P = [I  I]^{-1} [wI+C  0   ] [Dh  0 ]
///       [-I I]      [0     wI+C] [0   Dh]
/// with Dh = (wI+D)^{-1}((w+1)I+D); requires w > ||D||_inf.
class CpmhssPreconditioner {
 public:
  CpmhssPreconditioner(const DiagonalOperator& D, const CirculantOperator& C,
                       double omega);

  Vector apply(const Vector& r) const;
  double omega() const { return omega_; }
  int block_size() const { return m_; }

 private:
  int m_;
  double omega_;
  Vector d_hat;
  std::vector<std::complex<double>> lambda_hat;  // w + lambda_k
  std::shared_ptr<const Dft> dft_;
};

/// Dense reference application of the Toeplitz-block preconditioner
///   P = [wI-D  0   ] [wI+T  -I  ]
///       [0     wI-D] [I     wI+T]
/// (no fast solver exists for the Toeplitz block; used only for spectrum
/// diagnostics at small M).
class DenseDntbPreconditioner {
 public:
  DenseDntbPreconditioner(const DiagonalOperator& D, const ToeplitzOperator& T,
                          double omega);

  Vector apply(const Vector& r) const;
  double omega() const { return omega_; }

 private:
  int m_;
  double omega_;
  Vector d_tilde;
  Eigen::PartialPivLU<Eigen::MatrixXd> block_lu_;
};

Vector dense_dntb_apply(const DiagonalOperator& D, const ToeplitzOperator& T,
                        double omega, const Vector& r);

}  // namespace fnls
