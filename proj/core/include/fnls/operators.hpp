#pragma once

#include <Eigen/Core>
#include <complex>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fnls/fft.hpp"
#include "fnls/fractional.hpp"

namespace fnls {

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Uniform space-time grid on [a, b] with M inner points, h = (b-a)/(M+1),
/// and the operator scale mu = gamma * tau / h^alpha.
struct GridSpec {
  double a;
  double b;
  int m;
  double tau;
  double gamma;
  FractionalOrder alpha;

  GridSpec(double a_, double b_, int m_, double tau_, double gamma_,
           FractionalOrder alpha_);

  double h() const { return (b - a) / (m + 1); }
  double mu() const;
  /// Inner grid point x_j for j = 1..M.
  double x(int j) const { return a + j * h(); }
};

/// Symmetric Toeplitz form of the discrete fractional Laplacian,
/// entry (j,k) = mu * c_{|j-k|}, with an O(M log M) matvec through a
/// circulant embedding padded to a 2/3/5-smooth length >= 2M.
class ToeplitzOperator {
 public:
  ToeplitzOperator(const GridSpec& grid, const CoefficientTable& coeffs);
  /// Direct form for scaled variants (e.g. half-step operators).
  ToeplitzOperator(int m, double mu, const CoefficientTable& coeffs);

  int size() const { return m_; }
  double mu() const { return mu_; }
  /// mu * c_k for k = 0..M-1.
  const std::vector<double>& first_column() const { return first_column_; }

  Vector matvec(const Vector& x) const;
  ComplexVector matvec(const ComplexVector& x) const;

 private:
  int m_;
  double mu_;
  std::vector<double> first_column_;
  std::shared_ptr<const Dft> dft_;
  std::vector<std::complex<double>> embedded_spectrum_;
};

enum class CirculantScheme {
  Strang,
  TChan,
  RChan,
  ModifiedDirichlet,
  VonHann,
  Hamming,
  Superoptimal,
};

std::string_view to_string(CirculantScheme scheme);
std::optional<CirculantScheme> parse_circulant_scheme(std::string_view name);
inline constexpr CirculantScheme kAllCirculantSchemes[] = {
    CirculantScheme::Strang,           CirculantScheme::TChan,
    CirculantScheme::RChan,            CirculantScheme::ModifiedDirichlet,
    CirculantScheme::VonHann,          CirculantScheme::Hamming,
    CirculantScheme::Superoptimal,
};

/// Circulant approximation of a ToeplitzOperator, held as its (symmetric)
/// first column plus the precomputed transform spectrum.
class CirculantOperator {
 public:
  static CirculantOperator approximate(const ToeplitzOperator& T,
                                       CirculantScheme scheme);

  int size() const { return m_; }
  CirculantScheme scheme() const { return scheme_; }
  const std::vector<double>& first_column() const { return first_column_; }
  const std::vector<std::complex<double>>& spectrum() const { return spectrum_; }
  const Dft& dft() const { return *dft_; }

  Vector matvec(const Vector& x) const;
  /// Solves (shift*I + C) y = x through the spectrum. Throws if any shifted
  /// spectrum entry is within 1e-14 * ||spectrum||_inf of zero.
  Vector solve_shifted(double shift, const Vector& x) const;

 private:
  CirculantOperator(int m, CirculantScheme scheme, std::vector<double> col);

  int m_;
  CirculantScheme scheme_;
  std::vector<double> first_column_;
  std::shared_ptr<const Dft> dft_;
  std::vector<std::complex<double>> spectrum_;
};

/// Diagonal part of the per-level system; entries are <= 0 in the repulsive
/// regime.
class DiagonalOperator {
 public:
  DiagonalOperator() = default;
  explicit DiagonalOperator(Vector entries) : entries_(std::move(entries)) {}
  int size() const { return static_cast<int>(entries_.size()); }
  const Vector& entries() const { return entries_; }
  double inf_norm() const {
    return entries_.size() ? entries_.cwiseAbs().maxCoeff() : 0.0;
  }

 private:
  Vector entries_;
};

/// Real block form of the complex system (iI + D - T) x = b:
///   [T-D  -I] [z]   [-q]
///   [ I  T-D] [y] = [-p]
/// with b = p + iq and x = y + iz.
struct BlockSystem {
  std::shared_ptr<const ToeplitzOperator> T;
  DiagonalOperator D;
  Vector rhs;  // length 2M, ordered (-q; -p)
  int m;
};

/// Builds the block system for right-hand side b = p + iq.
BlockSystem complex_to_block(std::shared_ptr<const ToeplitzOperator> T,
                             DiagonalOperator D, const ComplexVector& b);

/// Maps a block solution (z; y) back to the complex solution y + iz.
ComplexVector block_to_complex(const Vector& x);

/// Applies the block operator; both Toeplitz products are fused into one
/// complex transform pass.
Vector block_matvec(const BlockSystem& sys, const Vector& x);

}  // namespace fnls
