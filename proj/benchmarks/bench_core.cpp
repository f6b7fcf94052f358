#include "smectic/assembly.hpp"
#include "smectic/cases.hpp"
#include "smectic/hdd_element.hpp"
#include "smectic/linear_scheme.hpp"
#include "smectic/uzawa.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace smectic;

namespace {

std::shared_ptr<const Mesh> mesh_at(int level)
{
    return std::make_shared<const Mesh>(unit_square_mesh(level));
}

void BM_BuildLocalElement(benchmark::State& state)
{
    const Triangle t{Vec2(0.1, 0.2), Vec2(1.3, 0.4), Vec2(0.5, 1.7)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_local_element(t));
    }
}
BENCHMARK(BM_BuildLocalElement);

void BM_AssembleGram(benchmark::State& state)
{
    const Case c = linear_manufactured(1.0);
    const auto mesh = mesh_at(static_cast<int>(state.range(0)));
    ElementCache cache;
    const HddSpace space(classify_boundary(mesh, c.boundary_spec(*mesh)), cache);
    const QuadTable quad(*mesh, 10);
    const TensorValues t = tabulate_tensor(quad, c.linear_problem().tensor);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_gram(space, quad, t, c.params));
    }
    state.counters["triangles"] = mesh->num_triangles();
}
BENCHMARK(BM_AssembleGram)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_SpdSolve(benchmark::State& state)
{
    const Case c = linear_manufactured(1.0);
    const auto mesh = mesh_at(static_cast<int>(state.range(0)));
    ElementCache cache;
    const HddSpace space(classify_boundary(mesh, c.boundary_spec(*mesh)), cache);
    const QuadTable quad(*mesh, 10);
    const GramSystem g = assemble_gram(space, quad, tabulate_tensor(quad, c.linear_problem().tensor), c.params);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(g.free_free.rows());
    for (auto _ : state) {
        benchmark::DoNotOptimize(spd_solve(g.free_free, b, 1e-12, nullptr, g.free_free_lo));
    }
    state.counters["unknowns"] = static_cast<double>(g.free_free.rows());
}
BENCHMARK(BM_SpdSolve)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_LinearSolve(benchmark::State& state)
{
    const Case c = linear_manufactured(1.0);
    const auto mesh = mesh_at(static_cast<int>(state.range(0)));
    const LinearProblem lp = c.linear_problem();
    for (auto _ : state) {
        ElementCache cache;
        benchmark::DoNotOptimize(solve_linear(classify_boundary(mesh, c.boundary_spec(*mesh)), cache, lp));
    }
}
BENCHMARK(BM_LinearSolve)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_UzawaSolve(benchmark::State& state)
{
    const Case c = nonlinear_manufactured(20.0);
    const auto mesh = mesh_at(static_cast<int>(state.range(0)));
    const NonlinearProblem np = c.nonlinear_problem();
    for (auto _ : state) {
        ElementCache cache;
        benchmark::DoNotOptimize(uzawa_solve(classify_boundary(mesh, c.boundary_spec(*mesh)), cache, np));
    }
}
BENCHMARK(BM_UzawaSolve)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
