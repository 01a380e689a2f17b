#include <benchmark/benchmark.h>

#include "floppy/control.hpp"
#include "floppy/netgen.hpp"
#include "floppy/nullspace.hpp"
#include "floppy/rigidity.hpp"
#include "floppy/springsim.hpp"

using namespace floppy;

namespace {

Network big_lattice(int side) {
  GeneratorSpec spec;
  spec.nx = side;
  spec.ny = side;
  spec.dilution_fraction = 0.8;
  spec.seed = 3;
  spec.boundary = Boundary::fixed_rows;
  return generate(spec);
}

void BM_ForcesSerial(benchmark::State& state) {
  const Network net = big_lattice(static_cast<int>(state.range(0)));
  const SpringForces f(net, 1.0, 1.0);
  Eigen::VectorXd x = net.coordinates() * 1.01, out;
  for (auto _ : state) {
    f.serial(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ForcesParallel(benchmark::State& state) {
  const Network net = big_lattice(static_cast<int>(state.range(0)));
  const SpringForces f(net, 1.0, 1.0);
  Eigen::VectorXd x = net.coordinates() * 1.01, out;
  for (auto _ : state) {
    f.parallel(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EnsembleSerial(benchmark::State& state) {
  const RigidityMatrix r = build_rigidity(generate_triangular_with_dof(7, 7, 10, 1));
  const auto seeds = ensemble_seeds(0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_serial(r, seeds).mean_participation());
}

void BM_EnsembleParallel(benchmark::State& state) {
  const RigidityMatrix r = build_rigidity(generate_triangular_with_dof(7, 7, 10, 1));
  const auto seeds = ensemble_seeds(0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble(r, seeds).mean_participation());
}

std::vector<ControlTask> grasp_batch(int n) {
  std::vector<ControlTask> tasks;
  for (int i = 0; i < n; ++i) tasks.push_back(grasping_task(static_cast<std::uint64_t>(i), BasisMethod::snd));
  return tasks;
}

void BM_TasksSerial(benchmark::State& state) {
  const auto tasks = grasp_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_tasks_serial(tasks).size());
}

void BM_TasksParallel(benchmark::State& state) {
  const auto tasks = grasp_batch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_tasks(tasks).size());
}

}  // namespace

BENCHMARK(BM_ForcesSerial)->Arg(16)->Arg(48)->Arg(96);
BENCHMARK(BM_ForcesParallel)->Arg(16)->Arg(48)->Arg(96);
BENCHMARK(BM_EnsembleSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TasksSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TasksParallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
