#include "fnls/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fnls {

namespace {

constexpr double kBreakdownTol = 1e-14;

Vector apply_preconditioned(const LinearMap& A, const LinearMap* P,
                            const Vector& v) {
  Vector av = A(v);
  return P ? (*P)(av) : std::move(av);
}

}  // namespace

SolveReport gmres(const LinearMap& A, const LinearMap* P, const Vector& b,
                  const GmresOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("gmres: tol must be > 0");
  if (opts.maxit < 1) throw std::invalid_argument("gmres: maxit must be >= 1");
  const Eigen::Index n = b.size();

  SolveReport report;
  const Vector pb = P ? (*P)(b) : b;
  const double pb_norm = pb.norm();

  Vector x = opts.x0 ? *opts.x0 : Vector::Zero(n);
  Vector r0;
  if (opts.x0) {
    r0 = pb - apply_preconditioned(A, P, x);
  } else {
    r0 = pb;
  }
  const double beta = r0.norm();
  const double denom = pb_norm > 0.0 ? pb_norm : 1.0;

  auto finish = [&](Vector solution, int its, bool converged) {
    report.solution = std::move(solution);
    report.iterations = its;
    report.converged = converged;
    const Vector true_res = pb - apply_preconditioned(A, P, report.solution);
    report.final_true_relres = true_res.norm() / denom;
    report.true_residual_suspect =
        converged && report.final_true_relres > 10.0 * opts.tol;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return report;
  };

  if (beta / denom <= opts.tol || beta == 0.0) return finish(x, 0, true);

  std::vector<Vector> basis;
  basis.push_back(r0 / beta);
  std::vector<std::vector<double>> h_cols;  // column j holds h(0..j+1, j)
  std::vector<double> cs, sn, g;
  g.push_back(beta);

  int iterations = 0;
  bool converged = false;
  for (int j = 0; j < opts.maxit; ++j) {
    Vector w = apply_preconditioned(A, P, basis[j]);
    std::vector<double> h(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      h[i] = basis[i].dot(w);
      w -= h[i] * basis[i];
    }
    h[j + 1] = w.norm();
    const bool breakdown = h[j + 1] < kBreakdownTol;
    if (!breakdown) basis.push_back(w / h[j + 1]);

    // Previous rotations, then a new one eliminating h[j+1].
    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double rho = std::hypot(h[j], h[j + 1]);
    const double c = rho > 0.0 ? h[j] / rho : 1.0;
    const double s = rho > 0.0 ? h[j + 1] / rho : 0.0;
    cs.push_back(c);
    sn.push_back(s);
    h[j] = rho;
    h[j + 1] = 0.0;
    const double g_next = -s * g[j];
    g[j] *= c;
    g.push_back(g_next);
    h_cols.push_back(std::move(h));

    iterations = j + 1;
    const double relres = std::abs(g[j + 1]) / denom;
    report.relative_residuals.push_back(relres);
    if (relres <= opts.tol) {
      converged = true;
      break;
    }
    if (breakdown) {
      throw std::runtime_error(
          "gmres: Arnoldi breakdown above tolerance (relres=" +
          std::to_string(relres) + " at iteration " +
          std::to_string(iterations) + ")");
    }
  }

  // Back substitution on the triangular system, then assemble the iterate.
  const int k = iterations;
  std::vector<double> y(k, 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double sum = g[i];
    for (int l = i + 1; l < k; ++l) sum -= h_cols[l][i] * y[l];
    y[i] = sum / h_cols[i][i];
  }
  for (int i = 0; i < k; ++i) x += y[i] * basis[i];
  return finish(std::move(x), k, converged);
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("uniform_grid: step must be > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double w = start + i * step;
    if (w > stop + 1e-12) break;
    grid.push_back(w);
  }
  return grid;
}

SweepResult omega_sweep(
    const LinearMap& A, const Vector& b,
    const std::function<std::optional<LinearMap>(double)>& make_preconditioner,
    const std::vector<double>& omega_grid, const SweepOptions& opts) {
  if (omega_grid.empty())
    throw std::invalid_argument("omega_sweep: empty grid");

  const std::size_t n = omega_grid.size();
  std::vector<SweepPoint> points(n);

  // Visit a handful of typical-optimum probes first so the adaptive budget
  // tightens early; the visiting order cannot change the recorded minimum.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> picked(n, false);
  if (!opts.exact_curve) {
    for (double probe : {0.10, 0.15, 0.20, 0.30, 0.50, 1.00, 1.60, 2.00}) {
      std::size_t best_idx = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double dist = std::abs(omega_grid[i] - probe);
        if (dist < best_dist) {
          best_dist = dist;
          best_idx = i;
        }
      }
      if (!picked[best_idx]) {
        picked[best_idx] = true;
        order.push_back(best_idx);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!picked[i]) order.push_back(i);

  int best = opts.maxit + 1;
  for (std::size_t idx : order) {
    const double omega = omega_grid[idx];
    auto precond = make_preconditioner(omega);
    if (!precond) {
      points[idx] = SweepPoint{omega, opts.maxit + 1, false};
      continue;
    }
    GmresOptions gopts;
    gopts.tol = opts.tol;
    gopts.maxit = opts.exact_curve ? opts.maxit : std::min(opts.maxit, best);
    const SolveReport rep = gmres(A, &*precond, b, gopts);
    if (rep.converged) {
      points[idx] = SweepPoint{omega, rep.iterations, true};
      best = std::min(best, rep.iterations);
    } else {
      points[idx] = SweepPoint{omega, opts.maxit + 1, false};
    }
  }

  // Longest contiguous run of grid points attaining the minimum.
  SweepResult result;
  result.best_iterations = best;
  result.points = std::move(points);
  std::size_t run_start = 0, run_len = 0, best_start = 0, best_len = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool hit = i < n && result.points[i].converged &&
                     result.points[i].iterations == best;
    if (hit) {
      if (run_len == 0) run_start = i;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best_start = run_start;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len > 0) {
    result.omega_lo = result.points[best_start].omega;
    result.omega_hi = result.points[best_start + best_len - 1].omega;
  } else {
    result.omega_lo = result.omega_hi =
        std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace fnls
