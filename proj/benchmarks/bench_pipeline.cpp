// Microbenchmarks for the numeric kernels: advection (per seed stride),
// Jacobian + eigenvalue analysis, segmentation, and the flow solver sweep.

#include <benchmark/benchmark.h>

#include "flowsal/advection.hpp"
#include "flowsal/optical_flow.hpp"
#include "flowsal/parallel.hpp"
#include "flowsal/saliency.hpp"
#include "flowsal/stability.hpp"
#include "flowsal/synth.hpp"

using namespace flowsal;

namespace {

VectorField2 bench_field(int n) {
    SceneSpec spec;
    spec.shape = {n, n};
    SceneElement lane;
    lane.kind = ElementKind::uniform_lane;
    lane.magnitude = 0.4;
    SceneElement noise;
    noise.kind = ElementKind::noise_patch;
    noise.bbox = BBox{n / 4, n / 4, n / 2, n / 2};
    noise.magnitude = 0.5;
    noise.rng_seed = 3;
    spec.elements = {lane, noise};
    return render_field(spec).first;
}

}  // namespace

static void BM_AdvectGrid(benchmark::State& state) {
    set_worker_count(1);
    const int n = 256;
    VectorField2 field = bench_field(n);
    AdvectionConfig cfg(10.0, 0.25, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        FlowMap map = advect_grid(field, cfg);
        benchmark::DoNotOptimize(map.x_final.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.step_count() *
                            static_cast<std::int64_t>(n / state.range(0)) *
                            (n / state.range(0)));
}
BENCHMARK(BM_AdvectGrid)->Arg(1)->Arg(2)->Arg(4);

static void BM_StabilityFromFlowMap(benchmark::State& state) {
    set_worker_count(1);
    VectorField2 field = bench_field(256);
    FlowMap map = advect_grid(field, AdvectionConfig(10.0, 0.25, 1));
    for (auto _ : state) {
        JacobianField j = jacobian_of_flow_map(map);
        ScalarField lambda = max_eigenvalue_ctc(j);
        StabilityField phi = stability_exponent(lambda, 10.0);
        benchmark::DoNotOptimize(phi.phi.data());
    }
    state.SetItemsProcessed(state.iterations() * map.seed_shape.count());
}
BENCHMARK(BM_StabilityFromFlowMap);

static void BM_Segment(benchmark::State& state) {
    set_worker_count(1);
    VectorField2 field = bench_field(256);
    StabilityField phi = compute_stability(field, AdvectionConfig(10.0, 0.25, 1));
    SaliencyConfig cfg;
    const double alpha = select_alpha(phi, cfg);
    ScalarField hat = magnify(phi, cfg, alpha);
    for (auto _ : state) {
        ScalarField mask = segment(hat, cfg, alpha);
        benchmark::DoNotOptimize(mask.values().data());
    }
    state.SetItemsProcessed(state.iterations() * phi.shape.count());
}
BENCHMARK(BM_Segment);

static void BM_EstimateFlow(benchmark::State& state) {
    set_worker_count(1);
    SceneSpec spec;
    spec.shape = {128, 128};
    SceneElement lane;
    lane.kind = ElementKind::uniform_lane;
    lane.magnitude = 1.0;
    spec.elements = {lane};
    std::vector<Frame> frames = render_frames(spec, 2, 7);
    FlowParams params;
    for (auto _ : state) {
        VectorField2 flow = estimate_flow(frames[0], frames[1], params);
        benchmark::DoNotOptimize(flow.u().data());
    }
    state.SetItemsProcessed(state.iterations() * spec.shape.count());
}
BENCHMARK(BM_EstimateFlow);

BENCHMARK_MAIN();
