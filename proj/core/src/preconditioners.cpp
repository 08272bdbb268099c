#include "fnls/preconditioners.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fnls {

namespace {

void check_lengths(int m, const Eigen::Index r_size, const char* who) {
  if (r_size != 2 * m)
    throw std::invalid_argument(std::string(who) + ": expected length 2M");
}

#ifndef NDEBUG
void assert_real(const std::vector<std::complex<double>>& x1,
                 const std::vector<std::complex<double>>& x2) {
  double max_abs = 1e-300, max_imag = 0.0;
  for (const auto& v : x1) {
    max_abs = std::max(max_abs, std::abs(v));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  for (const auto& v : x2) {
    max_abs = std::max(max_abs, std::abs(v));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  assert(max_imag <= 1e-9 * max_abs);
}
#endif

}  // namespace

DncbPreconditioner::DncbPreconditioner(const DiagonalOperator& D,
                                       const CirculantOperator& C,
                                       double omega)
    : m_(C.size()), omega_(omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("DncbPreconditioner: omega must be positive");
  if (D.size() != m_)
    throw std::invalid_argument("DncbPreconditioner: dimension mismatch");
  const auto& spectrum = C.spectrum();
  double spec_norm = 0.0;
  for (const auto& s : spectrum) spec_norm = std::max(spec_norm, std::abs(s));
  d_tilde = Vector::Constant(m_, omega) - D.entries();
  u11.resize(m_);
  l21.resize(m_);
  u22.resize(m_);
  for (int k = 0; k < m_; ++k) {
    u11[k] = omega + spectrum[k];
    if (std::abs(u11[k]) < 1e-14 * std::max(spec_norm, 1.0))
      throw std::runtime_error(
          "DncbPreconditioner: near-singular shifted spectrum entry");
    l21[k] = 1.0 / u11[k];
    u22[k] = u11[k] + l21[k];
  }
  dft_ = std::make_shared<Dft>(static_cast<std::size_t>(m_));
}

Vector DncbPreconditioner::apply(const Vector& r) const {
  check_lengths(m_, r.size(), "DncbPreconditioner::apply");
  std::vector<std::complex<double>> x1(m_), x2(m_);
  for (int i = 0; i < m_; ++i) {
    x1[i] = r[i] / d_tilde[i];
    x2[i] = r[m_ + i] / d_tilde[i];
  }
  dft_->forward(x1.data());
  dft_->forward(x2.data());
  for (int i = 0; i < m_; ++i) x2[i] -= l21[i] * x1[i];
  for (int i = 0; i < m_; ++i) {
    x2[i] /= u22[i];
    x1[i] = (x1[i] + x2[i]) / u11[i];
  }
  dft_->backward(x1.data());
  dft_->backward(x2.data());
#ifndef NDEBUG
  assert_real(x1, x2);
#endif
  Vector out(2 * m_);
  for (int i = 0; i < m_; ++i) {
    out[i] = x1[i].real();
    out[m_ + i] = x2[i].real();
  }
  return out;
}

CpmhssPreconditioner::CpmhssPreconditioner(const DiagonalOperator& D,
                                           const CirculantOperator& C,
                                           double omega)
    : m_(C.size()), omega_(omega) {
  if (D.size() != m_)
    throw std::invalid_argument("CpmhssPreconditioner: dimension mismatch");
  if (!(omega > D.inf_norm()))
    throw std::invalid_argument(
        "CpmhssPreconditioner: need omega > ||D||_inf");
  const Vector& d = D.entries();
  d_hat.resize(m_);
  for (int i = 0; i < m_; ++i)
    d_hat[i] = (omega + 1.0 + d[i]) / (omega + d[i]);
  const auto& spectrum = C.spectrum();
  lambda_hat.resize(m_);
  for (int k = 0; k < m_; ++k) lambda_hat[k] = omega + spectrum[k];
  dft_ = std::make_shared<Dft>(static_cast<std::size_t>(m_));
}

Vector CpmhssPreconditioner::apply(const Vector& r) const {
  check_lengths(m_, r.size(), "CpmhssPreconditioner::apply");
  std::vector<std::complex<double>> x1(m_), x2(m_);
  for (int i = 0; i < m_; ++i) {
    x1[i] = r[i] + r[m_ + i];
    x2[i] = -r[i] + r[m_ + i];
  }
  dft_->forward(x1.data());
  dft_->forward(x2.data());
  for (int i = 0; i < m_; ++i) {
    x1[i] /= lambda_hat[i];
    x2[i] /= lambda_hat[i];
  }
  dft_->backward(x1.data());
  dft_->backward(x2.data());
#ifndef NDEBUG
  assert_real(x1, x2);
#endif
  Vector out(2 * m_);
  for (int i = 0; i < m_; ++i) {
    out[i] = x1[i].real() / d_hat[i];
    out[m_ + i] = x2[i].real() / d_hat[i];
  }
  return out;
}

DenseDntbPreconditioner::DenseDntbPreconditioner(const DiagonalOperator& D,
                                                 const ToeplitzOperator& T,
                                                 double omega)
    : m_(T.size()), omega_(omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument(
        "DenseDntbPreconditioner: omega must be positive");
  if (D.size() != m_)
    throw std::invalid_argument("DenseDntbPreconditioner: dimension mismatch");
  if (m_ > 1024)
    throw std::invalid_argument(
        "DenseDntbPreconditioner: dense path limited to M <= 1024");
  d_tilde = Vector::Constant(m_, omega) - D.entries();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * m_, 2 * m_);
  const auto& col = T.first_column();
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      block(i, j) = col[std::abs(i - j)];
      block(m_ + i, m_ + j) = col[std::abs(i - j)];
    }
  block.diagonal().array() += omega;
  for (int i = 0; i < m_; ++i) {
    block(i, m_ + i) = -1.0;
    block(m_ + i, i) = 1.0;
  }
  block_lu_.compute(block);
}

Vector DenseDntbPreconditioner::apply(const Vector& r) const {
  check_lengths(m_, r.size(), "DenseDntbPreconditioner::apply");
  Vector rhs(2 * m_);
  for (int i = 0; i < m_; ++i) {
    rhs[i] = r[i] / d_tilde[i];
    rhs[m_ + i] = r[m_ + i] / d_tilde[i];
  }
  return block_lu_.solve(rhs);
}

Vector dense_dntb_apply(const DiagonalOperator& D, const ToeplitzOperator& T,
                        double omega, const Vector& r) {
  return DenseDntbPreconditioner(D, T, omega).apply(r);
}

}  // namespace fnls
