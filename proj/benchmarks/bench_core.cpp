#include "teleop/dynamics.hpp"
#include "teleop/observer.hpp"
#include "teleop/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace teleop;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

void BM_MassMatrix(benchmark::State& state) {
    const RobotParams arm = RobotParams::planar_two_link();
    const Vector q = v2(0.3, 1.1);
    for (auto _ : state) benchmark::DoNotOptimize(mass_matrix(q, arm));
}
BENCHMARK(BM_MassMatrix);

void BM_ForwardDynamics(benchmark::State& state) {
    const RobotParams arm = RobotParams::planar_two_link();
    const JointState js{v2(0.3, 1.1), v2(-0.5, 0.8)};
    const Vector tau = v2(1.0, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(forward_dynamics(js, tau, arm));
}
BENCHMARK(BM_ForwardDynamics);

void BM_ObserverDerivatives(benchmark::State& state) {
    const RobotParams arm = RobotParams::planar_two_link();
    const ObserverParams op = ObserverParams::from(arm, 5, 1, 0.1, 4, 20);
    const ObserverState st{v2(0.05, 0.02), 2.0, 0.0029};
    const Vector y = v2(0.1, 0.2), u = v2(1.0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(observer_derivatives(st, y, u, op, arm));
}
BENCHMARK(BM_ObserverDerivatives);

void BM_SystemDerivative(benchmark::State& state) {
    const Simulator sim(ScenarioConfig::teleoperation_default());
    for (auto _ : state) benchmark::DoNotOptimize(sim.evaluate());
}
BENCHMARK(BM_SystemDerivative);

void BM_SimulatorAdvance(benchmark::State& state) {
    Simulator sim(ScenarioConfig::teleoperation_default());
    for (auto _ : state) sim.advance();
    state.counters["substeps"] = sim.last_substeps();
}
BENCHMARK(BM_SimulatorAdvance)->Iterations(5000);

void BM_RunScenario(benchmark::State& state) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(c));
}
BENCHMARK(BM_RunScenario)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
