#include "fnls/licd.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "fnls/preconditioners.hpp"

namespace fnls {

namespace {

constexpr std::complex<double> kImag{0.0, 1.0};

ComplexVector sample(const GridSpec& grid, const FieldSampler& f) {
  ComplexVector out(grid.m);
  for (int j = 1; j <= grid.m; ++j) out[j - 1] = f(grid.x(j));
  return out;
}

double sech(double x) { return 1.0 / std::cosh(x); }

/// d_j for one field from the level-n moduli.
Vector level_diagonal(const LicdContext& ctx, const ComplexVector& self,
                      const ComplexVector* other) {
  const double rho_tau = ctx.params.rho * ctx.grid.tau;
  const double beta = ctx.params.beta;
  Vector d(self.size());
  for (Eigen::Index j = 0; j < self.size(); ++j) {
    double val = std::norm(self[j]);
    if (other) val += beta * std::norm((*other)[j]);
    d[j] = rho_tau * val;
  }
  return d;
}

/// b = i w_prev + T w_prev - d .* w_prev (one Toeplitz product).
ComplexVector level_rhs(const ToeplitzOperator& T, const Vector& d,
                        const ComplexVector& w_prev) {
  ComplexVector b = T.matvec(w_prev);
  for (Eigen::Index j = 0; j < b.size(); ++j)
    b[j] += kImag * w_prev[j] - d[j] * w_prev[j];
  return b;
}

FieldSolveInfo solve_level_system(
    const std::shared_ptr<const ToeplitzOperator>& T, const DiagonalOperator& D,
    const ComplexVector& b, const StepSolverConfig& cfg, ComplexVector& out) {
  FieldSolveInfo info;
  if (cfg.path == StepSolverConfig::Path::Ge) {
    const auto t0 = std::chrono::steady_clock::now();
    out = solve_complex_direct(*T, D, b);
    info.direct = true;
    info.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return info;
  }

  BlockSystem sys = complex_to_block(T, D, b);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  std::optional<LinearMap> p_map;
  std::optional<CirculantOperator> C;
  std::optional<DncbPreconditioner> dncb;
  std::optional<CpmhssPreconditioner> cpmhss;
  if (cfg.precond == StepSolverConfig::Precond::Dncb) {
    C.emplace(CirculantOperator::approximate(*T, cfg.scheme));
    dncb.emplace(D, *C, cfg.omega);
    p_map = [&dncb](const Vector& r) { return dncb->apply(r); };
  } else if (cfg.precond == StepSolverConfig::Precond::Cpmhss) {
    C.emplace(CirculantOperator::approximate(*T, cfg.scheme));
    cpmhss.emplace(D, *C, cfg.omega);
    p_map = [&cpmhss](const Vector& r) { return cpmhss->apply(r); };
  }

  GmresOptions gopts;
  gopts.tol = cfg.tol;
  gopts.maxit = cfg.maxit;
  SolveReport rep = gmres(a_map, p_map ? &*p_map : nullptr, sys.rhs, gopts);
  if (!rep.converged)
    throw std::runtime_error("solve_level_system: GMRES did not converge in " +
                             std::to_string(cfg.maxit) + " iterations");
  out = block_to_complex(rep.solution);
  info.iterations = rep.iterations;
  info.relres = rep.relative_residuals.empty()
                    ? 0.0
                    : rep.relative_residuals.back();
  info.converged = rep.converged;
  info.wall_seconds = rep.wall_seconds;
  return info;
}

double quadratic_form(const ToeplitzOperator& T, const ComplexVector& w) {
  const ComplexVector tw = T.matvec(w);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    acc += (tw[j] * std::conj(w[j])).real();
  return acc;
}

}  // namespace

ModelParams::ModelParams(double gamma_, double rho_, double beta_,
                         FractionalOrder alpha_, bool coupled_)
    : gamma(gamma_), rho(rho_), beta(beta_), alpha(alpha_), coupled(coupled_) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ModelParams: need gamma > 0");
  if (!(rho < 0.0))
    throw std::invalid_argument(
        "ModelParams: only the repulsive regime rho < 0 is supported");
  if (!(beta >= 0.0)) throw std::invalid_argument("ModelParams: need beta >= 0");
}

LicdContext LicdContext::make(const GridSpec& grid, const ModelParams& params) {
  CoefficientTable coeffs = compute_coefficients(params.alpha, grid.m);
  auto T = std::make_shared<const ToeplitzOperator>(grid, coeffs);
  auto T_half =
      std::make_shared<const ToeplitzOperator>(grid.m, grid.mu() / 2.0, coeffs);
  return LicdContext{grid, params, std::move(coeffs), std::move(T),
                     std::move(T_half)};
}

FieldState initial_state(ProblemCase problem, const GridSpec& grid,
                         const ModelParams& params) {
  if (problem == ProblemCase::Dnls) {
    FieldSampler u0 = [](double x) {
      return sech(x) * std::exp(kImag * (2.0 * x));
    };
    return initial_state_from(grid, params, u0, nullptr);
  }
  FieldSampler u0 = [](double x) {
    return sech(x + 1.0) * std::exp(kImag * (2.0 * x));
  };
  FieldSampler v0 = [](double x) {
    return sech(x - 1.0) * std::exp(-kImag * (2.0 * x));
  };
  return initial_state_from(grid, params, u0, &v0);
}

FieldState initial_state_from(const GridSpec& grid, const ModelParams& params,
                              const FieldSampler& u0, const FieldSampler* v0) {
  FieldState state;
  state.level = 0;
  state.coupled = params.coupled;
  state.u_curr = sample(grid, u0);
  state.u_prev = state.u_curr;
  if (params.coupled) {
    if (v0 == nullptr)
      throw std::invalid_argument("initial_state_from: coupled case needs v0");
    state.v_curr = sample(grid, *v0);
    state.v_prev = state.v_curr;
  }
  return state;
}

FieldState bootstrap_first_level(const LicdContext& ctx,
                                 const FieldState& level0,
                                 const StepSolverConfig& solver,
                                 BootstrapReport* report) {
  if (level0.level != 0)
    throw std::invalid_argument("bootstrap_first_level: state must be level 0");
  constexpr double kPicardTol = 1e-12;
  constexpr int kPicardMax = 50;

  StepSolverConfig inner = solver;
  inner.tol = 1e-12;

  const ComplexVector& u0 = level0.u_curr;
  const ComplexVector* v0 = level0.coupled ? &level0.v_curr : nullptr;
  ComplexVector u1 = u0;
  ComplexVector v1 = level0.coupled ? *v0 : ComplexVector();
  const double half_rho_tau = 0.5 * ctx.params.rho * ctx.grid.tau;
  const double beta = ctx.params.beta;

  int sweeps = 0;
  double delta = 0.0;
  for (sweeps = 1; sweeps <= kPicardMax; ++sweeps) {
    const ComplexVector ubar = 0.5 * (u1 + u0);
    ComplexVector vbar;
    if (level0.coupled) vbar = 0.5 * (v1 + *v0);

    auto solve_field = [&](const ComplexVector& self_bar,
                           const ComplexVector* other_bar,
                           const ComplexVector& w0) {
      Vector d(ctx.grid.m);
      for (int j = 0; j < ctx.grid.m; ++j) {
        double val = std::norm(self_bar[j]);
        if (other_bar) val += beta * std::norm((*other_bar)[j]);
        d[j] = half_rho_tau * val;
      }
      DiagonalOperator D(d);
      const ComplexVector b = level_rhs(*ctx.T_half, d, w0);
      ComplexVector w1;
      solve_level_system(ctx.T_half, D, b, inner, w1);
      return w1;
    };

    ComplexVector u1_new =
        solve_field(ubar, level0.coupled ? &vbar : nullptr, u0);
    ComplexVector v1_new;
    if (level0.coupled) v1_new = solve_field(vbar, &ubar, *v0);

    delta = (u1_new - u1).cwiseAbs().maxCoeff();
    if (level0.coupled)
      delta = std::max(delta, (v1_new - v1).cwiseAbs().maxCoeff());
    u1 = std::move(u1_new);
    if (level0.coupled) v1 = std::move(v1_new);

    const double scale = std::max(1.0, u1.cwiseAbs().maxCoeff());
    if (delta <= kPicardTol * scale) break;
  }
  if (sweeps > kPicardMax)
    throw std::runtime_error(
        "bootstrap_first_level: Picard iteration did not reach 1e-12 in 50 "
        "sweeps (last update " +
        std::to_string(delta) + ")");
  if (report) report->picard_sweeps = sweeps;

  FieldState next;
  next.level = 1;
  next.coupled = level0.coupled;
  next.u_prev = u0;
  next.u_curr = std::move(u1);
  if (level0.coupled) {
    next.v_prev = *v0;
    next.v_curr = std::move(v1);
  }
  return next;
}

LevelSystem assemble_level(const LicdContext& ctx, const FieldState& state,
                           Field field) {
  if (state.level < 1)
    throw std::invalid_argument("assemble_level: state must hold two levels");
  const bool want_v = field == Field::V;
  if (want_v && !state.coupled)
    throw std::invalid_argument("assemble_level: no v field in decoupled case");
  const ComplexVector& self = want_v ? state.v_curr : state.u_curr;
  const ComplexVector& self_prev = want_v ? state.v_prev : state.u_prev;
  const ComplexVector* other =
      state.coupled ? (want_v ? &state.u_curr : &state.v_curr) : nullptr;
  Vector d = level_diagonal(ctx, self, other);
  ComplexVector b = level_rhs(*ctx.T, d, self_prev);
  return LevelSystem{DiagonalOperator(std::move(d)), std::move(b)};
}

std::pair<FieldState, StepReport> step(const LicdContext& ctx,
                                       const FieldState& state,
                                       const StepSolverConfig& solver) {
  if (state.level < 1)
    throw std::invalid_argument("step: bootstrap the state first");

  StepReport report;
  report.level = state.level + 1;

  LevelSystem sys_u = assemble_level(ctx, state, Field::U);
  ComplexVector u_next;
  report.u = solve_level_system(ctx.T, sys_u.D, sys_u.b, solver, u_next);

  FieldState next;
  next.level = state.level + 1;
  next.coupled = state.coupled;
  next.u_prev = state.u_curr;
  next.u_curr = std::move(u_next);

  if (state.coupled) {
    LevelSystem sys_v = assemble_level(ctx, state, Field::V);
    ComplexVector v_next;
    report.v = solve_level_system(ctx.T, sys_v.D, sys_v.b, solver, v_next);
    next.v_prev = state.v_curr;
    next.v_curr = std::move(v_next);
  }

  report.mass = discrete_mass(ctx.grid, next);
  report.energy = discrete_energy(ctx, next);
  return {std::move(next), std::move(report)};
}

double discrete_mass(const GridSpec& grid, const FieldState& state) {
  const double h = grid.h();
  double q = state.u_prev.squaredNorm() + state.u_curr.squaredNorm();
  if (state.coupled)
    q += state.v_prev.squaredNorm() + state.v_curr.squaredNorm();
  return 0.5 * h * q;
}

double discrete_energy(const LicdContext& ctx, const FieldState& state) {
  const double h = ctx.grid.h();
  const double tau = ctx.grid.tau;
  const double rho = ctx.params.rho;
  const double beta = ctx.params.beta;

  auto field_energy = [&](const ComplexVector& prev, const ComplexVector& curr) {
    double e = (quadratic_form(*ctx.T, curr) + quadratic_form(*ctx.T, prev)) / tau;
    double quartic = 0.0;
    for (Eigen::Index j = 0; j < prev.size(); ++j)
      quartic += std::norm(prev[j]) * std::norm(curr[j]);
    return e - rho * quartic;
  };

  double total = field_energy(state.u_prev, state.u_curr);
  if (state.coupled) {
    total += field_energy(state.v_prev, state.v_curr);
    double cross = 0.0;
    for (Eigen::Index j = 0; j < state.u_prev.size(); ++j)
      cross += std::norm(state.v_prev[j]) * std::norm(state.u_curr[j]) +
               std::norm(state.u_prev[j]) * std::norm(state.v_curr[j]);
    total -= rho * beta * cross;
  }
  return 0.5 * h * total;
}

RunResult run(const LicdContext& ctx, const FieldState& level0,
              const RunOptions& options, const StepSolverConfig& solver) {
  const int n_levels = static_cast<int>(std::llround(options.t_end / ctx.grid.tau));
  if (n_levels < 1)
    throw std::invalid_argument("run: need at least one time level");

  RunResult result;
  auto snapshot = [&](const FieldState& s) {
    if (options.snapshot_every <= 0) return;
    if (s.level % options.snapshot_every != 0 && s.level != n_levels) return;
    result.snapshots.push_back(Snapshot{s.level, s.level * ctx.grid.tau,
                                        s.u_curr, s.v_curr});
  };

  snapshot(level0);
  FieldState state = bootstrap_first_level(ctx, level0, solver, &result.bootstrap);
  snapshot(state);
  for (int level = 1; level < n_levels; ++level) {
    auto [next, report] = step(ctx, state, solver);
    state = std::move(next);
    result.steps.push_back(std::move(report));
    snapshot(state);
  }
  result.final_state = std::move(state);
  return result;
}

ComplexVector solve_complex_direct(const ToeplitzOperator& T,
                                   const DiagonalOperator& D,
                                   const ComplexVector& b) {
  const int m = T.size();
  if (m > 8192)
    throw std::invalid_argument(
        "solve_complex_direct: dense path limited to M <= 8192");
  if (D.size() != m || b.size() != m)
    throw std::invalid_argument("solve_complex_direct: dimension mismatch");
  Eigen::MatrixXcd A(m, m);
  const auto& col = T.first_column();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = -col[std::abs(i - j)];
  for (int i = 0; i < m; ++i) A(i, i) += kImag + D.entries()[i];
  return A.partialPivLu().solve(b);
}

}  // namespace fnls
