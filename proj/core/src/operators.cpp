#include "fnls/operators.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fnls {

namespace {

constexpr double kPi = 3.14159265358979323846;

#ifndef NDEBUG
void assert_small_imag(const std::vector<std::complex<double>>& buf, int n,
                       double tol_scale) {
  double max_abs = 0.0, max_imag = 0.0;
  for (int i = 0; i < n; ++i) {
    max_abs = std::max(max_abs, std::abs(buf[i]));
    max_imag = std::max(max_imag, std::abs(buf[i].imag()));
  }
  assert(max_imag <= tol_scale * std::max(max_abs, 1e-300));
}
#endif

}  // namespace

GridSpec::GridSpec(double a_, double b_, int m_, double tau_, double gamma_,
                   FractionalOrder alpha_)
    : a(a_), b(b_), m(m_), tau(tau_), gamma(gamma_), alpha(alpha_) {
  if (!(b > a)) throw std::invalid_argument("GridSpec: need b > a");
  if (m < 1) throw std::invalid_argument("GridSpec: need M >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("GridSpec: need tau > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("GridSpec: need gamma > 0");
}

double GridSpec::mu() const { return gamma * tau / std::pow(h(), alpha.value()); }

ToeplitzOperator::ToeplitzOperator(const GridSpec& grid,
                                   const CoefficientTable& coeffs)
    : ToeplitzOperator(grid.m, grid.mu(), coeffs) {}

ToeplitzOperator::ToeplitzOperator(int m, double mu,
                                   const CoefficientTable& coeffs)
    : m_(m), mu_(mu) {
  if (m < 1) throw std::invalid_argument("ToeplitzOperator: need M >= 1");
  if (coeffs.size() < static_cast<std::size_t>(m))
    throw std::invalid_argument(
        "ToeplitzOperator: coefficient table shorter than M");
  first_column_.resize(m);
  for (int k = 0; k < m; ++k) first_column_[k] = mu * coeffs[k];

  // Circulant embedding: [t_0 .. t_{M-1} 0 .. 0 t_{M-1} .. t_1] with the
  // zero run padding the length up to a 2/3/5-smooth value >= 2M.
  const std::size_t len = next_smooth_length(2 * static_cast<std::size_t>(m));
  dft_ = std::make_shared<Dft>(len);
  std::vector<std::complex<double>> col(len, 0.0);
  for (int k = 0; k < m; ++k) col[k] = first_column_[k];
  for (int k = 1; k < m; ++k) col[len - k] = first_column_[k];
  dft_->forward(col.data());
  embedded_spectrum_ = std::move(col);
}

ComplexVector ToeplitzOperator::matvec(const ComplexVector& x) const {
  if (x.size() != m_)
    throw std::invalid_argument("ToeplitzOperator::matvec: length mismatch");
  const std::size_t len = dft_->size();
  std::vector<std::complex<double>> buf(len, 0.0);
  for (int i = 0; i < m_; ++i) buf[i] = x[i];
  dft_->forward(buf.data());
  for (std::size_t i = 0; i < len; ++i) buf[i] *= embedded_spectrum_[i];
  dft_->backward(buf.data());
  ComplexVector y(m_);
  for (int i = 0; i < m_; ++i) y[i] = buf[i];
  return y;
}

Vector ToeplitzOperator::matvec(const Vector& x) const {
  if (x.size() != m_)
    throw std::invalid_argument("ToeplitzOperator::matvec: length mismatch");
  const std::size_t len = dft_->size();
  std::vector<std::complex<double>> buf(len, 0.0);
  for (int i = 0; i < m_; ++i) buf[i] = x[i];
  dft_->forward(buf.data());
  for (std::size_t i = 0; i < len; ++i) buf[i] *= embedded_spectrum_[i];
  dft_->backward(buf.data());
#ifndef NDEBUG
  assert_small_imag(buf, m_, 1e-10);
#endif
  Vector y(m_);
  for (int i = 0; i < m_; ++i) y[i] = buf[i].real();
  return y;
}

std::string_view to_string(CirculantScheme scheme) {
  switch (scheme) {
    case CirculantScheme::Strang: return "strang";
    case CirculantScheme::TChan: return "tchan";
    case CirculantScheme::RChan: return "rchan";
    case CirculantScheme::ModifiedDirichlet: return "modified-dirichlet";
    case CirculantScheme::VonHann: return "von-hann";
    case CirculantScheme::Hamming: return "hamming";
    case CirculantScheme::Superoptimal: return "superoptimal";
  }
  return "?";
}

std::optional<CirculantScheme> parse_circulant_scheme(std::string_view name) {
  for (CirculantScheme s : kAllCirculantSchemes)
    if (name == to_string(s)) return s;
  return std::nullopt;
}

namespace {

// Sums of the d-th diagonal of T^2 for a symmetric Toeplitz T with diagonals
// t_0..t_{M-1}; needed by the superoptimal approximation. O(M^2) total.
std::vector<double> squared_diagonal_sums(const std::vector<double>& t, int m) {
  auto tt = [&](int k) -> double {
    k = std::abs(k);
    return k < m ? t[k] : 0.0;
  };
  std::vector<double> s(m, 0.0);
  for (int d = 0; d < m; ++d) {
    double acc = 0.0;
    // (T^2)_{k+d,k} summed over k=1..M-d equals sum_p t_{|p|} t_{|d-p|} times
    // the number of admissible row indices for that p.
    for (int p = d - m + 1; p <= m - 1; ++p) {
      const double q = tt(p) * tt(d - p);
      if (q == 0.0) continue;
      double w;
      if (p >= d)
        w = m - p;
      else if (p >= 0)
        w = m - d;
      else
        w = m - d + p;
      if (w > 0) acc += w * q;
    }
    s[d] = acc;
  }
  return s;
}

}  // namespace

CirculantOperator::CirculantOperator(int m, CirculantScheme scheme,
                                     std::vector<double> col)
    : m_(m), scheme_(scheme), first_column_(std::move(col)) {
  dft_ = std::make_shared<Dft>(static_cast<std::size_t>(m_));
  std::vector<std::complex<double>> spec(first_column_.begin(),
                                         first_column_.end());
  dft_->forward(spec.data());
  spectrum_ = std::move(spec);
}

CirculantOperator CirculantOperator::approximate(const ToeplitzOperator& T,
                                                 CirculantScheme scheme) {
  const int m = T.size();
  if (m < 2)
    throw std::invalid_argument("CirculantOperator: need M >= 2");
  const std::vector<double>& t = T.first_column();
  auto tw = [&](int k) -> double { return k >= 0 && k < m ? t[k] : 0.0; };
  std::vector<double> col(m, 0.0);

  switch (scheme) {
    case CirculantScheme::Strang:
    case CirculantScheme::ModifiedDirichlet: {
      if (m % 2 == 0) {
        for (int j = 0; j < m / 2; ++j) col[j] = t[j];
        col[m / 2] =
            scheme == CirculantScheme::ModifiedDirichlet ? tw(m / 2) : 0.0;
        for (int j = m / 2 + 1; j < m; ++j) col[j] = t[m - j];
      } else {
        // Odd order: mirror at ceil(M/2); no wrap slot, so the two schemes
        // coincide.
        for (int j = 0; j <= (m - 1) / 2; ++j) col[j] = t[j];
        for (int j = (m - 1) / 2 + 1; j < m; ++j) col[j] = t[m - j];
      }
      break;
    }
    case CirculantScheme::TChan: {
      col[0] = t[0];
      for (int j = 1; j < m; ++j)
        col[j] = ((m - j) * t[j] + j * t[m - j]) / static_cast<double>(m);
      break;
    }
    case CirculantScheme::RChan: {
      col[0] = t[0];
      for (int j = 1; j < m; ++j) col[j] = t[j] + t[m - j];
      break;
    }
    case CirculantScheme::VonHann:
    case CirculantScheme::Hamming: {
      // Kernel window on the diagonal index, paired so that
      // col[j] = w(j) t_j + w(M-j) t_{M-j} stays exactly symmetric.
      auto w = [&](int k) -> double {
        const double c = std::cos(kPi * k / static_cast<double>(m));
        return scheme == CirculantScheme::VonHann ? 0.5 * (1.0 + c)
                                                  : 0.54 + 0.46 * c;
      };
      col[0] = t[0];
      for (int j = 1; j < m; ++j) col[j] = w(j) * t[j] + w(m - j) * t[m - j];
      break;
    }
    case CirculantScheme::Superoptimal: {
      // argmin_C ||I - C^{-1} T||_F = cF(T T') cF(T)^{-1}; all circulants are
      // simultaneously diagonalized, so divide the two cF spectra pointwise.
      std::vector<double> s2 = squared_diagonal_sums(t, m);
      std::vector<std::complex<double>> num(m), den(m);
      den[0] = t[0];
      num[0] = s2[0] / static_cast<double>(m);
      for (int j = 1; j < m; ++j) {
        den[j] = ((m - j) * t[j] + j * t[m - j]) / static_cast<double>(m);
        num[j] = (s2[j] + s2[m - j]) / static_cast<double>(m);
      }
      Dft dft(static_cast<std::size_t>(m));
      dft.forward(num.data());
      dft.forward(den.data());
      for (int j = 0; j < m; ++j) num[j] /= den[j];
      dft.backward(num.data());
      for (int j = 0; j < m; ++j) col[j] = num[j].real();
      break;
    }
  }
  return CirculantOperator(m, scheme, std::move(col));
}

Vector CirculantOperator::matvec(const Vector& x) const {
  if (x.size() != m_)
    throw std::invalid_argument("CirculantOperator::matvec: length mismatch");
  std::vector<std::complex<double>> buf(x.data(), x.data() + m_);
  dft_->forward(buf.data());
  for (int i = 0; i < m_; ++i) buf[i] *= spectrum_[i];
  dft_->backward(buf.data());
#ifndef NDEBUG
  assert_small_imag(buf, m_, 1e-10);
#endif
  Vector y(m_);
  for (int i = 0; i < m_; ++i) y[i] = buf[i].real();
  return y;
}

Vector CirculantOperator::solve_shifted(double shift, const Vector& x) const {
  if (x.size() != m_)
    throw std::invalid_argument("CirculantOperator::solve_shifted: length mismatch");
  double spec_norm = 0.0;
  for (const auto& s : spectrum_) spec_norm = std::max(spec_norm, std::abs(s));
  std::vector<std::complex<double>> buf(x.data(), x.data() + m_);
  dft_->forward(buf.data());
  for (int i = 0; i < m_; ++i) {
    const std::complex<double> denom = shift + spectrum_[i];
    if (std::abs(denom) < 1e-14 * std::max(spec_norm, 1.0))
      throw std::runtime_error("CirculantOperator::solve_shifted: singular shifted spectrum entry");
    buf[i] /= denom;
  }
  dft_->backward(buf.data());
#ifndef NDEBUG
  assert_small_imag(buf, m_, 1e-10);
#endif
  Vector y(m_);
  for (int i = 0; i < m_; ++i) y[i] = buf[i].real();
  return y;
}

BlockSystem complex_to_block(std::shared_ptr<const ToeplitzOperator> T,
                             DiagonalOperator D, const ComplexVector& b) {
  if (!T) throw std::invalid_argument("complex_to_block: null operator");
  const int m = T->size();
  if (D.size() != m || b.size() != m)
    throw std::invalid_argument("complex_to_block: dimension mismatch");
  Vector rhs(2 * m);
  for (int i = 0; i < m; ++i) {
    rhs[i] = -b[i].imag();
    rhs[m + i] = -b[i].real();
  }
  return BlockSystem{std::move(T), std::move(D), std::move(rhs), m};
}

ComplexVector block_to_complex(const Vector& x) {
  if (x.size() % 2 != 0)
    throw std::invalid_argument("block_to_complex: odd length");
  const int m = static_cast<int>(x.size()) / 2;
  ComplexVector out(m);
  for (int i = 0; i < m; ++i) out[i] = {x[m + i], x[i]};
  return out;
}

Vector block_matvec(const BlockSystem& sys, const Vector& x) {
  const int m = sys.m;
  if (x.size() != 2 * m)
    throw std::invalid_argument("block_matvec: length mismatch");
  ComplexVector zy(m);
  for (int i = 0; i < m; ++i) zy[i] = {x[i], x[m + i]};
  const ComplexVector t_zy = sys.T->matvec(zy);
  const Vector& d = sys.D.entries();
  Vector out(2 * m);
  for (int i = 0; i < m; ++i) {
    out[i] = t_zy[i].real() - d[i] * x[i] - x[m + i];
    out[m + i] = x[i] + t_zy[i].imag() - d[i] * x[m + i];
  }
  return out;
}

}  // namespace fnls
