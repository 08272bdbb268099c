#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fnls/krylov.hpp"
#include "fnls/operators.hpp"

namespace fnls {

enum class ProblemCase { Dnls, Cnls };

/// Physical parameters; only the repulsive regime (rho < 0) is admitted,
/// which keeps the per-level diagonal nonpositive.
struct ModelParams {
  double gamma;
  double rho;
  double beta;
  FractionalOrder alpha;
  bool coupled;

  ModelParams(double gamma_, double rho_, double beta_, FractionalOrder alpha_,
              bool coupled_);
};

/// Complex fields at two consecutive time levels; inner points only, the
/// homogeneous Dirichlet boundary values are implicit. At level 0 both
/// slots hold the initial data.
struct FieldState {
  int level = 0;
  ComplexVector u_prev, u_curr;
  ComplexVector v_prev, v_curr;  // empty when decoupled
  bool coupled = false;
};

/// Immutable per-run operator bundle: the full-step Toeplitz operator and the
/// half-scaled one used by the first-level bootstrap.
struct LicdContext {
  GridSpec grid;
  ModelParams params;
  CoefficientTable coeffs;
  std::shared_ptr<const ToeplitzOperator> T;
  std::shared_ptr<const ToeplitzOperator> T_half;

  static LicdContext make(const GridSpec& grid, const ModelParams& params);
};

/// Per-level linear solver selection.
struct StepSolverConfig {
  enum class Path { Ge, Gmres };
  enum class Precond { None, Dncb, Cpmhss };
  Path path = Path::Gmres;
  Precond precond = Precond::Dncb;
  CirculantScheme scheme = CirculantScheme::Strang;
  double omega = 0.2;
  double tol = 1e-6;
  int maxit = 1000;
};

struct FieldSolveInfo {
  int iterations = 0;  // 0 for the direct path
  double relres = 0.0;
  bool converged = true;
  double wall_seconds = 0.0;
  bool direct = false;
};

struct StepReport {
  int level = 0;
  FieldSolveInfo u;
  std::optional<FieldSolveInfo> v;
  double mass = 0.0;
  double energy = 0.0;
};

/// Built-in initial data: sech(x) e^{2ix} for the decoupled case;
/// sech(x+1) e^{2ix} and sech(x-1) e^{-2ix} for the coupled case.
FieldState initial_state(ProblemCase problem, const GridSpec& grid,
                         const ModelParams& params);

using FieldSampler = std::function<std::complex<double>(double x)>;
FieldState initial_state_from(const GridSpec& grid, const ModelParams& params,
                              const FieldSampler& u0, const FieldSampler* v0);

struct BootstrapReport {
  int picard_sweeps = 0;
};

/// First time level by the implicit averaged two-level scheme, with the
/// nonlinear modulus factor resolved by Picard iteration on the averaged
/// field (tolerance 1e-12, at most 50 sweeps; each sweep one linear
/// Toeplitz-plus-diagonal solve at tolerance 1e-12).
FieldState bootstrap_first_level(const LicdContext& ctx,
                                 const FieldState& level0,
                                 const StepSolverConfig& solver,
                                 BootstrapReport* report = nullptr);

enum class Field { U, V };

/// Per-level diagonal and right-hand side for one field:
///   d_j = rho tau (|u^n_j|^2 + beta |v^n_j|^2)
///   b_j = i u^{n-1}_j + (T u^{n-1})_j - d_j u^{n-1}_j
struct LevelSystem {
  DiagonalOperator D;
  ComplexVector b;
};
LevelSystem assemble_level(const LicdContext& ctx, const FieldState& state,
                           Field field);

/// One level of the three-level linearly implicit scheme (requires
/// level >= 1, i.e. a bootstrapped state).
std::pair<FieldState, StepReport> step(const LicdContext& ctx,
                                       const FieldState& state,
                                       const StepSolverConfig& solver);

/// Conserved quantities of the scheme (summed over fields). The energy
/// functional pairs consecutive levels:
///   E^n = (h/2) sum_w [ (<T w^{n+1}, w^{n+1}> + <T w^n, w^n>)/tau
///                       - rho sum_j |w^n_j|^2 |w^{n+1}_j|^2 ]
///         - (h/2) rho beta sum_j (|v^n_j|^2 |u^{n+1}_j|^2
///                                 + |u^n_j|^2 |v^{n+1}_j|^2),
/// which telescopes exactly under the scheme in exact arithmetic.
double discrete_mass(const GridSpec& grid, const FieldState& state);
double discrete_energy(const LicdContext& ctx, const FieldState& state);

struct Snapshot {
  int level;
  double t;
  ComplexVector u;
  ComplexVector v;  // empty when decoupled
};

struct RunOptions {
  double t_end = 2.0;
  int snapshot_every = 0;  // 0 disables snapshots
};

struct RunResult {
  BootstrapReport bootstrap;
  std::vector<StepReport> steps;
  FieldState final_state;
  std::vector<Snapshot> snapshots;
};

/// Bootstrap plus N-1 implicit steps, N = round(t_end / tau).
RunResult run(const LicdContext& ctx, const FieldState& level0,
              const RunOptions& options, const StepSolverConfig& solver);

/// Direct complex solve of (iI + D - T) x = b; reference path, M <= 8192.
ComplexVector solve_complex_direct(const ToeplitzOperator& T,
                                   const DiagonalOperator& D,
                                   const ComplexVector& b);

}  // namespace fnls
