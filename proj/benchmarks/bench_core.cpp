#include "quadctrl/dynamics.hpp"
#include "quadctrl/fock.hpp"
#include "quadctrl/linalg.hpp"
#include "quadctrl/lqr.hpp"
#include "quadctrl/scenarios.hpp"
#include "quadctrl/synthesis.hpp"

#include <benchmark/benchmark.h>

using namespace quadctrl;

namespace {

LinearControlSystem dense_system(int d) {
    Matrix a(d, d), c(d, 1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = Complex(std::sin(1.0 + i + 2 * j), std::cos(i - j));
        c(i, 0) = Complex(1.0, 0.1 * i);
    }
    a *= 0.3;
    return LinearControlSystem::create(a, c, BasisTag::custom);
}

void BM_Expm(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const Matrix a = dense_system(d).a;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expm(Matrix(a * 0.7)));
    }
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_KalmanAnalyze(benchmark::State& state) {
    const LinearControlSystem sys = dense_system(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze(sys).numerical_rank);
    }
}
BENCHMARK(BM_KalmanAnalyze)->Arg(4)->Arg(8)->Arg(16);

void BM_Grammian(benchmark::State& state) {
    const LinearControlSystem sys = dense_system(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(grammian(sys, 1.0));
    }
}
BENCHMARK(BM_Grammian)->Arg(4)->Arg(8)->Arg(16);

void BM_PropagateEcdPulse(benchmark::State& state) {
    const Scenario s = ecd_scenario();
    const ControlPulse pulse = scenario_steering_pulse(s, SteeringMethod::bump);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            propagate(s.system, pulse, s.x0, s.horizon).final_state());
    }
}
BENCHMARK(BM_PropagateEcdPulse);

void BM_TwoModeBvp(benchmark::State& state) {
    const Scenario s = two_mode_chain_scenario();
    const LQRProblem p = LQRProblem::create(s.system, s.lqr_q, s.lqr_r, s.x0.real(),
                                            s.goal.real(), s.horizon);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_bvp(p).cost);
    }
}
BENCHMARK(BM_TwoModeBvp);

void BM_FockStep(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const FockOperators ops = FockOperators::create(dim);
    const FockState psi0 = coherent_state(1.0, dim);
    auto h = [&](double t) {
        return Matrix(ops.number + std::sin(t) * (ops.a + ops.a_dagger));
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            schrodinger_fixed_steps(h, psi0, 0.1, 16).amplitudes.norm());
    }
}
BENCHMARK(BM_FockStep)->Arg(20)->Arg(40)->Arg(80);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
