#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "fnls/krylov.hpp"
#include "fnls/licd.hpp"
#include "fnls/preconditioners.hpp"

namespace {

using namespace fnls;

struct Fixture {
  std::shared_ptr<ToeplitzOperator> t;
  CirculantOperator c;
  DiagonalOperator d;
  BlockSystem sys;

  explicit Fixture(int m, double alpha = 1.5)
      : t(std::make_shared<ToeplitzOperator>(
            GridSpec(-20.0, 20.0, m, 0.01, 1.0, FractionalOrder(alpha)),
            compute_coefficients(FractionalOrder(alpha), m))),
        c(CirculantOperator::approximate(*t, CirculantScheme::Strang)),
        d(make_diag(m)),
        sys(complex_to_block(t, d, make_rhs(m))) {}

  static DiagonalOperator make_diag(int m) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector d(m);
    for (int i = 0; i < m; ++i) d[i] = -0.04 * u(gen);
    return DiagonalOperator(d);
  }
  static ComplexVector make_rhs(int m) {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexVector b(m);
    for (int i = 0; i < m; ++i) b[i] = {u(gen), u(gen)};
    return b;
  }
};

void BM_CoefficientTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_coefficients(FractionalOrder(1.5), n));
}
BENCHMARK(BM_CoefficientTable)->Arg(6400)->Arg(25600);

void BM_ToeplitzMatvec(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const Vector x = Vector::Random(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(f.t->matvec(x));
}
BENCHMARK(BM_ToeplitzMatvec)->Arg(1600)->Arg(6400)->Arg(25600);

void BM_DncbApply(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  DncbPreconditioner p(f.d, f.c, 0.2);
  const Vector r = Vector::Random(2 * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(p.apply(r));
}
BENCHMARK(BM_DncbApply)->Arg(1600)->Arg(6400)->Arg(25600);

void BM_CpmhssApply(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  CpmhssPreconditioner p(f.d, f.c, 1.0);
  const Vector r = Vector::Random(2 * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(p.apply(r));
}
BENCHMARK(BM_CpmhssApply)->Arg(1600)->Arg(6400)->Arg(25600);

void BM_PreconditionedSolve(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  DncbPreconditioner p(f.d, f.c, 0.2);
  LinearMap a_map = [&](const Vector& x) { return block_matvec(f.sys, x); };
  LinearMap p_map = [&](const Vector& r) { return p.apply(r); };
  for (auto _ : state) {
    SolveReport rep = gmres(a_map, &p_map, f.sys.rhs, {1e-6, 200, {}});
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_PreconditionedSolve)->Arg(1600)->Arg(6400);

}  // namespace

BENCHMARK_MAIN();
