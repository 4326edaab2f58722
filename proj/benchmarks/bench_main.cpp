#include <benchmark/benchmark.h>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>
#include <random>
#include <vector>

#include "owfsim/sim.hpp"

using namespace owfsim;

static void BM_ControllerStep(benchmark::State& state) {
    Upsc upsc(ControllerParams{}, FeedbackConfig::all_virtual());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ControllerMeasurements> inputs(1024);
    for (auto& m : inputs) m = {{u(rng), u(rng)}, {u(rng), u(rng)}};
    std::size_t k = 0;
    for (auto _ : state) {
        const ControlSignals& out = upsc.step({0.5, 0.0, 0.8}, inputs[k++ & 1023]);
        benchmark::DoNotOptimize(out.v_conv_s);
    }
}
BENCHMARK(BM_ControllerStep);

static void BM_PlantRk4Step(benchmark::State& state) {
    const PlantParams params = build_black_start(0.3, FeedbackConfig::all_virtual()).plant_params();
    PlantState x(2);
    x.set_v_pcc(0, {0.8, 0.0});
    x.set_v_pcc(1, {0.8, 0.0});
    x.set_v_off({0.8, 0.0});
    x.set_v_dc_off(0.9);
    x.set_v_on(0.9);
    std::vector<SpaceVector> v_conv{{0.8, 0.05}, {0.8, 0.05}};
    const PlantInputs in{v_conv, 0.0};
    std::vector<double> raw = x.raw();
    boost::numeric::odeint::runge_kutta4<std::vector<double>> rk4;
    const auto system = [&](const std::vector<double>& s, std::vector<double>& d, double) {
        plant_derivatives(params, s, in, d);
    };
    double t = 0.0;
    for (auto _ : state) {
        rk4.do_step(system, raw, t, 20e-6);
        t += 20e-6;
        benchmark::DoNotOptimize(raw.data());
    }
}
BENCHMARK(BM_PlantRk4Step);

// Simulated seconds per wall second follow from the reported time.
static void BM_BlackStartRun(benchmark::State& state) {
    ScenarioSpec spec = build_preset("blackstart-virtual");
    spec.t_end = static_cast<double>(state.range(0)) / 10.0;
    spec.settle_window = spec.t_end / 2.0;
    const SimConfig cfg = SimConfig::for_scenario(spec);
    for (auto _ : state) {
        const RunRecord r = run(spec, cfg);
        benchmark::DoNotOptimize(r.rows());
    }
}
BENCHMARK(BM_BlackStartRun)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
