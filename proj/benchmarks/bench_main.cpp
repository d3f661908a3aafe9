#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dve/cases.hpp"
#include "dve/convexity.hpp"
#include "dve/dtp.hpp"
#include "dve/fem_static.hpp"

namespace {

dve::StaticDualProblem make_problem(int n_elements) {
  const dve::CaseSpec spec = dve::build_case("stress_free");
  return dve::StaticDualProblem(dve::Mesh1D::uniform(n_elements), spec.base,
                                spec.bc, spec.aux);
}

void BM_DtpStatic(benchmark::State& state) {
  dve::StaticPointDual dual{3.0, -1.0, 0.5, 0.2};
  dve::PointBase base{0.4, 1.1};
  dve::AuxParams aux;
  for (auto _ : state) {
    auto out = dve::dtp_static(dual, base, aux);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_DtpStatic);

void BM_AssembleResidual(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd dofs = Eigen::VectorXd::Zero(problem.n_free());
  for (auto _ : state) {
    auto r = problem.assemble_residual(dofs);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleResidual)->RangeMultiplier(4)->Range(100, 6400)
    ->Complexity();

void BM_AssembleJacobian(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd dofs = Eigen::VectorXd::Zero(problem.n_free());
  for (auto _ : state) {
    auto j = problem.assemble_jacobian(dofs);
    benchmark::DoNotOptimize(j);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleJacobian)->RangeMultiplier(4)->Range(100, 6400)
    ->Complexity();

void BM_StaticSolve(benchmark::State& state) {
  const dve::CaseSpec spec = dve::build_case("stress_free");
  for (auto _ : state) {
    auto rep = dve::run_static_case(spec, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_StaticSolve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SvkDensity(benchmark::State& state) {
  dve::SvkDualPoint p;
  p.A = (Eigen::MatrixXd(2, 2) << 1.0, -0.5, 0.25, 2.0).finished();
  p.B = (Eigen::MatrixXd(2, 2) << 0.5, 0.1, -0.3, 1.0).finished();
  p.a = (Eigen::VectorXd(2) << 1.0, -2.0).finished();
  const dve::SvkParams params{1.0, 0.5, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dve::g_svk(p, params));
  }
  state.SetLabel("grid+ascent");
}
BENCHMARK(BM_SvkDensity)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
