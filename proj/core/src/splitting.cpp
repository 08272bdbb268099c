#include "fnls/splitting.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnls {

namespace {

double diag_factor(double omega, double lambda) {
  return std::abs((omega + lambda) / (omega - lambda));
}

double normal_factor(double omega, double mu) {
  const double num = (omega - mu) * (omega - mu) + 1.0;
  const double den = (omega + mu) * (omega + mu) + 1.0;
  return std::sqrt(num / den);
}

double g_func(double lambda, double mu, double omega) {
  return (omega + lambda) / (omega - lambda) * normal_factor(omega, mu);
}

void require_positive_omega(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
}

}  // namespace

SpectralIntervals::SpectralIntervals(double lmin, double lmax, double mumin,
                                     double mumax)
    : lambda_min(lmin), lambda_max(lmax), mu_min(mumin), mu_max(mumax) {
  if (!(lambda_min <= lambda_max) || !(lambda_max <= 0.0))
    throw std::invalid_argument(
        "SpectralIntervals: need lambda_min <= lambda_max <= 0");
  if (!(0.0 < mu_min) || !(mu_min <= mu_max))
    throw std::invalid_argument(
        "SpectralIntervals: need 0 < mu_min <= mu_max");
}

double sigma_bound(double omega, const std::vector<double>& d_spectrum,
                   const std::vector<double>& t_spectrum) {
  require_positive_omega(omega);
  if (d_spectrum.empty() || t_spectrum.empty())
    throw std::invalid_argument("sigma_bound: empty spectrum");
  double s1 = 0.0;
  for (double l : d_spectrum) s1 = std::max(s1, diag_factor(omega, l));
  double s2 = 0.0;
  for (double m : t_spectrum) s2 = std::max(s2, normal_factor(omega, m));
  return s1 * s2;
}

double sigma_hat(double omega, const SpectralIntervals& iv) {
  require_positive_omega(omega);
  const double s1 = std::max(diag_factor(omega, iv.lambda_min),
                             diag_factor(omega, iv.lambda_max));
  double s2 = normal_factor(omega, iv.mu_min);
  if (iv.mu_min * iv.mu_max > 1.0)
    s2 = std::max(s2, normal_factor(omega, iv.mu_max));
  return s1 * s2;
}

OmegaStar omega_star1(const SpectralIntervals& iv) {
  if (iv.lambda_max >= 0.0) {
    // sigma1 == 1 for every omega: the zero eigenvalue pins the factor.
    return OmegaStar{0.0, 1.0, false};
  }
  const double w = std::sqrt(iv.lambda_min * iv.lambda_max);
  const double rm = std::sqrt(-iv.lambda_min);
  const double rp = std::sqrt(-iv.lambda_max);
  return OmegaStar{w, (rm - rp) / (rm + rp), true};
}

OmegaStar omega_star2(const SpectralIntervals& iv) {
  const double prod = iv.mu_min * iv.mu_max;
  if (prod > 1.0) {
    const double w = std::sqrt(prod - 1.0);
    const double v = std::sqrt((iv.mu_min + iv.mu_max - 2.0 * w) /
                               (iv.mu_min + iv.mu_max + 2.0 * w));
    return OmegaStar{w, v, true};
  }
  const double w = std::sqrt(iv.mu_min * iv.mu_min + 1.0);
  const double v = std::sqrt((w - iv.mu_min) / (w + iv.mu_min));
  return OmegaStar{w, v, true};
}

QuarticCoefficients critical_point_quartic(double lambda, double mu) {
  return QuarticCoefficients{
      mu - lambda,
      2.0 * lambda * (mu * mu - 1.0) - mu * (mu * mu + lambda * lambda + 1.0),
      lambda * (mu * mu + 1.0) * (lambda * mu - mu * mu - 1.0)};
}

namespace {

struct GMinimum {
  double omega;
  double value;
};

// Minimizes sign * g(lambda, mu; .) over [lo, hi]: the interval endpoints plus
// any positive quartic root inside (roots within 1e-12 of an endpoint are
// kept as interior).
GMinimum minimize_g(double lambda, double mu, double sign, double lo,
                    double hi) {
  lo = std::max(lo, 1e-30);
  hi = std::max(hi, lo);
  std::vector<double> candidates{lo, hi};
  const QuarticCoefficients q = critical_point_quartic(lambda, mu);
  const double delta = q.th * q.th - 4.0 * q.ups * q.xi;
  if (delta >= 0.0) {
    const double sq = std::sqrt(delta);
    for (double y : {(-q.th + sq) / (2.0 * q.ups), (-q.th - sq) / (2.0 * q.ups)}) {
      if (y <= 0.0) continue;
      const double w = std::sqrt(y);
      if (w >= lo - 1e-12 && w <= hi + 1e-12)
        candidates.push_back(std::clamp(w, lo, hi));
    }
  }
  GMinimum best{candidates[0],
                sign * g_func(lambda, mu, candidates[0])};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = sign * g_func(lambda, mu, candidates[i]);
    if (v < best.value) best = GMinimum{candidates[i], v};
  }
  return best;
}

}  // namespace

OmegaResult optimal_omega(const SpectralIntervals& iv) {
  const double lambda_star = std::sqrt(iv.lambda_min * iv.lambda_max);
  const double mu_hat = std::sqrt(iv.mu_min * iv.mu_min + 1.0);
  auto result = [&](const GMinimum& gm, std::string_view branch) {
    return OmegaResult{gm.omega, sigma_hat(std::max(gm.omega, 1e-30), iv),
                       branch};
  };

  if (iv.mu_min * iv.mu_max > 1.0) {
    const double mu_tilde = std::sqrt(iv.mu_min * iv.mu_max - 1.0);
    if (lambda_star < mu_tilde) {
      if (mu_tilde < mu_hat) {
        // (a): minima of both adjacent pieces, compared through sigma_hat.
        const GMinimum w1 =
            minimize_g(iv.lambda_max, iv.mu_max, 1.0, lambda_star, mu_tilde);
        const GMinimum w2 =
            minimize_g(iv.lambda_max, iv.mu_min, 1.0, mu_tilde, mu_hat);
        const OmegaResult r1 = result(w1, "a");
        const OmegaResult r2 = result(w2, "a");
        return r1.sigma_hat_at_opt <= r2.sigma_hat_at_opt ? r1 : r2;
      }
      return result(
          minimize_g(iv.lambda_max, iv.mu_max, 1.0, lambda_star, mu_tilde),
          "b");
    }
    if (mu_tilde >= mu_hat)
      return result(
          minimize_g(iv.lambda_min, iv.mu_min, -1.0, mu_tilde, lambda_star),
          "c");
    if (lambda_star < mu_hat)
      return result(
          minimize_g(iv.lambda_max, iv.mu_min, 1.0, lambda_star, mu_hat),
          "d1");
    return result(
        minimize_g(iv.lambda_min, iv.mu_min, -1.0, mu_hat, lambda_star), "d2");
  }

  if (lambda_star < mu_hat)
    return result(minimize_g(iv.lambda_max, iv.mu_min, 1.0, lambda_star, mu_hat),
                  "e");
  return result(
      minimize_g(iv.lambda_min, iv.mu_min, -1.0, mu_hat, lambda_star), "f");
}

DntbIterationResult dntb_iterate(const BlockSystem& sys, double omega,
                                 const Vector& x0, double tol, int maxit) {
  require_positive_omega(omega);
  const int m = sys.m;
  if (m > 2048)
    throw std::invalid_argument("dntb_iterate: dense reference limited to M <= 2048");
  if (x0.size() != 2 * m)
    throw std::invalid_argument("dntb_iterate: initial guess length mismatch");

  // Dense normal-block solve machinery: S = omega I + T, K = S + S^{-1}.
  Eigen::MatrixXd T(m, m);
  const auto& col = sys.T->first_column();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T(i, j) = col[std::abs(i - j)];
  Eigen::MatrixXd S = T;
  S.diagonal().array() += omega;
  Eigen::LLT<Eigen::MatrixXd> s_llt(S);
  Eigen::MatrixXd s_inv =
      s_llt.solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::LLT<Eigen::MatrixXd> k_llt(S + s_inv);

  const Vector& d = sys.D.entries();
  const Vector& f = sys.rhs;
  const double fnorm = f.norm();

  auto h_apply = [&](const Vector& x, Vector& out) {
    out.head(m) = T * x.head(m) - x.tail(m);
    out.tail(m) = x.head(m) + T * x.tail(m);
  };
  auto residual = [&](const Vector& x) {
    Vector rx(2 * m);
    h_apply(x, rx);
    rx.head(m) -= d.cwiseProduct(x.head(m));
    rx.tail(m) -= d.cwiseProduct(x.tail(m));
    return (f - rx).norm() / (fnorm > 0.0 ? fnorm : 1.0);
  };

  Vector x = x0;
  Vector hx(2 * m), r(2 * m);
  std::vector<double> history;
  history.push_back(residual(x));
  if (history.back() <= tol)
    return DntbIterationResult{x, 0, history, true};

  for (int k = 1; k <= maxit; ++k) {
    // (omega I + B) x_half = (omega I - H) x + f
    h_apply(x, hx);
    r = omega * x - hx + f;
    Vector x_half(2 * m);
    x_half.head(m) = r.head(m).cwiseQuotient(Vector::Constant(m, omega) - d);
    x_half.tail(m) = r.tail(m).cwiseQuotient(Vector::Constant(m, omega) - d);
    // (omega I + H) x_next = (omega I - B) x_half + f
    r.head(m) = (omega + 0.0) * x_half.head(m) + d.cwiseProduct(x_half.head(m));
    r.tail(m) = (omega + 0.0) * x_half.tail(m) + d.cwiseProduct(x_half.tail(m));
    r += f;
    Vector x1 = k_llt.solve(r.head(m) + s_inv * r.tail(m));
    Vector x2 = s_llt.solve(r.tail(m) - x1);
    x.head(m) = x1;
    x.tail(m) = x2;

    history.push_back(residual(x));
    if (history.back() <= tol)
      return DntbIterationResult{x, k, history, true};
  }
  return DntbIterationResult{x, maxit, history, false};
}

EigenvalueBounds eigenvalue_bounds(const GridSpec& grid, BoundedMatrix which) {
  const double a = grid.alpha.value();
  const BoundConstants bc = bound_constants(grid.alpha);
  const double c0 =
      std::exp(std::lgamma(a + 1.0) - 2.0 * std::lgamma(a / 2.0 + 1.0));
  const double width_pow = std::pow(grid.b - grid.a, a);
  const double gt = grid.gamma * grid.tau;
  const double h_pow = std::pow(grid.h(), a);
  if (which == BoundedMatrix::T) {
    if (grid.m < 4)
      throw std::invalid_argument("eigenvalue_bounds: T bounds need M >= 4");
    return EigenvalueBounds{2.0 * gt * bc.theta / width_pow,
                            2.0 * gt / h_pow * (c0 - bc.theta * h_pow / width_pow),
                            bc.degenerate};
  }
  if (grid.m < 8 || grid.m % 2 != 0)
    throw std::invalid_argument(
        "eigenvalue_bounds: C bounds need even M >= 8");
  const double two_pow = std::pow(2.0, a);
  return EigenvalueBounds{
      2.0 * two_pow * gt * bc.theta / width_pow,
      2.0 * gt / h_pow * (c0 - two_pow * bc.theta * h_pow / width_pow),
      bc.degenerate};
}

double condition_number_bound(const GridSpec& grid, BoundedMatrix which) {
  const double a = grid.alpha.value();
  const BoundConstants bc = bound_constants(grid.alpha);
  if (bc.degenerate) return std::numeric_limits<double>::infinity();
  const double c0 =
      std::exp(std::lgamma(a + 1.0) - 2.0 * std::lgamma(a / 2.0 + 1.0));
  const double base = std::pow(grid.m + 1.0, a) * c0 / bc.theta;
  return which == BoundedMatrix::T ? base - 1.0
                                   : base / std::pow(2.0, a) - 1.0;
}

}  // namespace fnls
