#include "fnls/krylov.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fnls/preconditioners.hpp"
#include "oracles.hpp"

namespace fnls {
namespace {

BlockSystem licd_like_system(double alpha, int m) {
  GridSpec grid(-20.0, 20.0, m, 0.01, 1.0, FractionalOrder(alpha));
  auto t = std::make_shared<ToeplitzOperator>(
      grid, compute_coefficients(FractionalOrder(alpha), m));
  return complex_to_block(t, DiagonalOperator(oracle::random_diagonal(m)),
                          oracle::random_complex_vector(m));
}

TEST(Gmres, IdentityConvergesInOneIteration) {
  const Vector b = oracle::random_vector(20);
  LinearMap ident = [](const Vector& x) { return x; };
  const SolveReport rep = gmres(ident, nullptr, b);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_LT((rep.solution - b).norm(), 1e-12 * b.norm());
}

TEST(Gmres, ZeroRhs) {
  LinearMap ident = [](const Vector& x) { return x; };
  const SolveReport rep = gmres(ident, nullptr, Vector::Zero(8));
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_EQ(rep.solution.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gmres, MatchesDenseSolve) {
  BlockSystem sys = licd_like_system(1.5, 16);
  Eigen::MatrixXd r(32, 32);
  for (int j = 0; j < 32; ++j) {
    Vector e = Vector::Zero(32);
    e[j] = 1.0;
    r.col(j) = block_matvec(sys, e);
  }
  const Vector exact = r.partialPivLu().solve(sys.rhs);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  const SolveReport rep = gmres(a_map, nullptr, sys.rhs, {1e-6, 1000, {}});
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((rep.solution - exact).norm() / exact.norm(), 1e-5);
  EXPECT_FALSE(rep.true_residual_suspect);
}

TEST(Gmres, ResidualHistoryMonotone) {
  BlockSystem sys = licd_like_system(1.7, 48);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  const SolveReport rep = gmres(a_map, nullptr, sys.rhs, {1e-8, 1000, {}});
  ASSERT_TRUE(rep.converged);
  for (std::size_t k = 1; k < rep.relative_residuals.size(); ++k)
    EXPECT_LE(rep.relative_residuals[k],
              rep.relative_residuals[k - 1] + 1e-12);
}

TEST(Gmres, ExactInversePreconditionerConvergesImmediately) {
  BlockSystem sys = licd_like_system(1.4, 12);
  Eigen::MatrixXd r(24, 24);
  for (int j = 0; j < 24; ++j) {
    Vector e = Vector::Zero(24);
    e[j] = 1.0;
    r.col(j) = block_matvec(sys, e);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(r);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  LinearMap p_map = [&lu](const Vector& x) { return Vector(lu.solve(x)); };
  const SolveReport rep = gmres(a_map, &p_map, sys.rhs, {1e-10, 50, {}});
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(Gmres, PreconditionerDoesNotChangeTheSolution) {
  BlockSystem sys = licd_like_system(1.5, 256);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  CirculantOperator circ =
      CirculantOperator::approximate(*sys.T, CirculantScheme::Strang);
  DncbPreconditioner dncb(sys.D, circ, 0.2);
  LinearMap p_map = [&dncb](const Vector& r) { return dncb.apply(r); };
  const SolveReport plain = gmres(a_map, nullptr, sys.rhs, {1e-6, 1000, {}});
  const SolveReport pre = gmres(a_map, &p_map, sys.rhs, {1e-6, 1000, {}});
  ASSERT_TRUE(plain.converged);
  ASSERT_TRUE(pre.converged);
  EXPECT_LT(pre.iterations, plain.iterations);
  EXPECT_LT((plain.solution - pre.solution).norm() / plain.solution.norm(),
            1e-4);
}

TEST(Gmres, ReportsNonConvergenceAtMaxit) {
  BlockSystem sys = licd_like_system(1.8, 64);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  const SolveReport rep = gmres(a_map, nullptr, sys.rhs, {1e-12, 3, {}});
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 3);
}

TEST(Gmres, NonzeroInitialGuess) {
  BlockSystem sys = licd_like_system(1.5, 24);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  const SolveReport cold = gmres(a_map, nullptr, sys.rhs, {1e-8, 1000, {}});
  GmresOptions warm_opts{1e-8, 1000, cold.solution};
  const SolveReport warm = gmres(a_map, nullptr, sys.rhs, warm_opts);
  EXPECT_TRUE(warm.converged);
  EXPECT_EQ(warm.iterations, 0);
}

TEST(Gmres, OptionGuards) {
  LinearMap ident = [](const Vector& x) { return x; };
  EXPECT_THROW(gmres(ident, nullptr, Vector::Ones(4), {0.0, 10, {}}),
               std::invalid_argument);
  EXPECT_THROW(gmres(ident, nullptr, Vector::Ones(4), {1e-6, 0, {}}),
               std::invalid_argument);
}

TEST(UniformGrid, InclusiveEndpoints) {
  const std::vector<double> g = uniform_grid(0.01, 3.0, 0.01);
  EXPECT_EQ(g.size(), 300u);
  EXPECT_NEAR(g.front(), 0.01, 1e-15);
  EXPECT_NEAR(g.back(), 3.0, 1e-12);
  EXPECT_THROW(uniform_grid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(OmegaSweep, SinglePointGrid) {
  BlockSystem sys = licd_like_system(1.5, 32);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  CirculantOperator circ =
      CirculantOperator::approximate(*sys.T, CirculantScheme::Strang);
  auto factory = [&](double w) -> std::optional<LinearMap> {
    auto p = std::make_shared<DncbPreconditioner>(sys.D, circ, w);
    return LinearMap([p](const Vector& r) { return p->apply(r); });
  };
  const SweepResult res = omega_sweep(a_map, sys.rhs, factory, {0.25});
  EXPECT_EQ(res.points.size(), 1u);
  EXPECT_EQ(res.omega_lo, 0.25);
  EXPECT_EQ(res.omega_hi, 0.25);
  EXPECT_GT(res.best_iterations, 0);
}

TEST(OmegaSweep, AdaptiveBudgetMatchesExactCurveMinimum) {
  BlockSystem sys = licd_like_system(1.5, 64);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  CirculantOperator circ =
      CirculantOperator::approximate(*sys.T, CirculantScheme::Strang);
  auto factory = [&](double w) -> std::optional<LinearMap> {
    auto p = std::make_shared<DncbPreconditioner>(sys.D, circ, w);
    return LinearMap([p](const Vector& r) { return p->apply(r); });
  };
  const std::vector<double> grid = uniform_grid(0.05, 1.0, 0.05);
  SweepOptions fast_opts;
  const SweepResult fast = omega_sweep(a_map, sys.rhs, factory, grid, fast_opts);
  SweepOptions exact_opts;
  exact_opts.exact_curve = true;
  const SweepResult exact = omega_sweep(a_map, sys.rhs, factory, grid, exact_opts);
  EXPECT_EQ(fast.best_iterations, exact.best_iterations);
  EXPECT_EQ(fast.omega_lo, exact.omega_lo);
  EXPECT_EQ(fast.omega_hi, exact.omega_hi);
  // The interval is a contiguous run attaining the minimum on the exact curve.
  for (const auto& pt : exact.points) {
    if (pt.omega >= fast.omega_lo && pt.omega <= fast.omega_hi)
      EXPECT_EQ(pt.iterations, exact.best_iterations);
  }
}

TEST(OmegaSweep, InvalidParameterRecordedAsNonConverged) {
  BlockSystem sys = licd_like_system(1.5, 32);
  LinearMap a_map = [&sys](const Vector& x) { return block_matvec(sys, x); };
  CirculantOperator circ =
      CirculantOperator::approximate(*sys.T, CirculantScheme::Strang);
  auto factory = [&](double w) -> std::optional<LinearMap> {
    if (!(w > sys.D.inf_norm())) return std::nullopt;  // CPMHSS-style guard
    auto p = std::make_shared<CpmhssPreconditioner>(sys.D, circ, w);
    return LinearMap([p](const Vector& r) { return p->apply(r); });
  };
  SweepOptions opts;
  opts.maxit = 200;
  const SweepResult res =
      omega_sweep(a_map, sys.rhs, factory, {1e-9, 0.5, 1.0}, opts);
  EXPECT_FALSE(res.points[0].converged);
  EXPECT_EQ(res.points[0].iterations, 201);
  EXPECT_TRUE(res.points[1].converged);
  EXPECT_THROW(omega_sweep(a_map, sys.rhs, factory, {}, opts),
               std::invalid_argument);
}

}  // namespace
}  // namespace fnls
