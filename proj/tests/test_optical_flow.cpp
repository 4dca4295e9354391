#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "flowsal/optical_flow.hpp"
#include "flowsal/parallel.hpp"
#include "flowsal/synth.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace flowsal;

namespace {

// textured frame pair with an exact integer-pixel translation between them
std::pair<Frame, Frame> translated_pair(GridShape shape, int dx, int dy, std::uint64_t seed) {
    SceneSpec spec;
    spec.shape = shape;
    SceneElement lane;
    lane.kind = ElementKind::uniform_lane;
    lane.magnitude = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
    lane.direction = {dx / lane.magnitude, dy / lane.magnitude};
    spec.elements = {lane};
    std::vector<Frame> frames = render_frames(spec, 2, seed);
    return {frames[0], frames[1]};
}

}  // namespace

TEST_CASE("param validation") {
    FlowParams p;
    CHECK_NOTHROW(p.validate());
    p.pyramid_scale = 1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = FlowParams{};
    p.smoothness_weight = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("frames must agree in shape") {
    Frame a(GridShape{8, 8}, std::vector<double>(64, 0.5));
    Frame b(GridShape{8, 9}, std::vector<double>(72, 0.5));
    CHECK_THROWS_AS(estimate_flow(a, b, FlowParams{}), ShapeMismatch);
}

TEST_CASE("frame intensities must lie in [0,1]") {
    std::vector<double> bad(64, 0.5);
    bad[10] = 1.5;
    CHECK_THROWS_AS(Frame(GridShape{8, 8}, bad), ConfigError);
}

TEST_CASE("identical frames give zero flow regardless of params") {
    SceneSpec spec;
    spec.shape = {48, 48};
    spec.elements = {};
    std::vector<Frame> frames = render_frames(spec, 2, 5);  // zero field: identical frames
    for (int levels : {1, 3}) {
        for (double w : {5.0, 40.0, 200.0}) {
            FlowParams p;
            p.pyramid_levels = levels;
            p.smoothness_weight = w;
            p.iterations_per_level = 30;
            VectorField2 flow = estimate_flow(frames[0], frames[1], p);
            CHECK(flow.max_speed() <= 1e-6);
        }
    }
}

TEST_CASE("1px translation is recovered within 0.25 px") {
    auto [a, b] = translated_pair({128, 128}, 1, 0, 11);
    VectorField2 flow = estimate_flow(a, b, FlowParams{});
    const double epe = fixtures::mean_epe_interior(flow, 1.0, 0.0, 12);
    CHECK(epe <= 0.25);
}

TEST_CASE("2px translation with 2 pyramid levels stays within 0.35 px") {
    auto [a, b] = translated_pair({128, 128}, 0, 2, 13);
    FlowParams p;
    p.pyramid_levels = 2;
    VectorField2 flow = estimate_flow(a, b, p);
    const double epe = fixtures::mean_epe_interior(flow, 0.0, 2.0, 12);
    CHECK(epe <= 0.35);
}

namespace {

// static surround texture, periodic in x with the shift period, so a shifted
// scene is an exact cyclic roll of the original
double surround_tex(int x, int y) {
    std::uint64_t h = static_cast<std::uint64_t>(x & 7) * 0x9e3779b97f4a7c15ULL ^
                      static_cast<std::uint64_t>(y) * 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 29;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 32;
    return 0.2 + 0.6 * static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("flow estimation is shift-equivariant in the interior") {
    // a moving textured patch over a static textured surround, estimated
    // twice with the patch shifted by an integer offset; the interior flow
    // must move along with the content
    GridShape canvas{96, 96};
    GridShape patch{48, 48};
    auto [pa, pb] = translated_pair(patch, 1, 0, 17);
    auto embed = [&](const Frame& src, int ox) {
        std::vector<double> out(static_cast<std::size_t>(canvas.count()));
        for (int y = 0; y < canvas.height; ++y)
            for (int x = 0; x < canvas.width; ++x) out[canvas.index(x, y)] = surround_tex(x, y);
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x) {
                out[canvas.index(x + ox, y + 24)] = src.at(x, y);
            }
        return Frame(canvas, out);
    };
    const int shift = 8;
    FlowParams p;
    p.pyramid_levels = 1;  // multi-level runs couple to the domain boundary
    p.iterations_per_level = 800;
    p.convergence_eps = 1e-13;
    VectorField2 f1 = estimate_flow(embed(pa, 16), embed(pb, 16), p);
    VectorField2 f2 = estimate_flow(embed(pa, 16 + shift), embed(pb, 16 + shift), p);
    double worst = 0.0;
    for (int y = 32; y < 64; ++y)
        for (int x = 24; x < 56; ++x) {
            worst = std::max(worst, std::abs(f1.u(x, y) - f2.u(x + shift, y)));
            worst = std::max(worst, std::abs(f1.v(x, y) - f2.v(x + shift, y)));
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("odd frame sizes survive the pyramid path") {
    SceneSpec spec;
    spec.shape = {97, 53};
    spec.elements = {};
    std::vector<Frame> frames = render_frames(spec, 2, 41);
    FlowParams p;
    p.iterations_per_level = 20;
    VectorField2 flow = estimate_flow(frames[0], frames[1], p);
    CHECK(flow.all_finite());
    CHECK(flow.max_speed() <= 1e-6);
}

TEST_CASE("flow is deterministic across worker counts") {
    auto [a, b] = translated_pair({64, 64}, 1, 0, 19);
    FlowParams p;
    p.iterations_per_level = 40;
    set_worker_count(1);
    VectorField2 f1 = estimate_flow(a, b, p);
    set_worker_count(4);
    VectorField2 f2 = estimate_flow(a, b, p);
    set_worker_count(0);
    CHECK(f1.u() == f2.u());
    CHECK(f1.v() == f2.v());
}

TEST_CASE("accumulator counts and sums") {
    GridShape shape{4, 4};
    MeanFlowAccumulator acc(shape, 3);
    CHECK(acc.count() == 0);
    VectorField2 f = fixtures::uniform(shape, 1.5, -2.0);
    acc.accumulate(f);
    CHECK(acc.count() == 1);
    CHECK_THROWS_AS(acc.finalize_mean(), WindowIncomplete);
    acc.accumulate(f);
    acc.accumulate(f);
    VectorField2 mean = acc.finalize_mean();
    for (int i = 0; i < shape.count(); ++i) {
        CHECK(mean.u()[static_cast<std::size_t>(i)] == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(mean.v()[static_cast<std::size_t>(i)] == doctest::Approx(-2.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(acc.accumulate(f), WindowFull);
}

TEST_CASE("two-term average per the windowed-mean definition") {
    GridShape shape{4, 4};
    MeanFlowAccumulator acc(shape, 2);
    acc.accumulate(fixtures::uniform(shape, 1.0, 0.0));
    acc.accumulate(fixtures::uniform(shape, 3.0, 0.0));
    VectorField2 mean = acc.finalize_mean();
    CHECK(mean.u(1, 1) == 2.0);
    CHECK(mean.v(1, 1) == 0.0);
}

TEST_CASE("accumulator rejects mismatched shapes") {
    MeanFlowAccumulator acc(GridShape{8, 8}, 2);
    CHECK_THROWS_AS(acc.accumulate(VectorField2(GridShape{8, 9})), ShapeMismatch);
}

TEST_CASE("windowed mean matches the one-shot oracle and is order-invariant") {
    GridShape shape{16, 16};
    std::vector<VectorField2> flows;
    for (std::uint32_t i = 0; i < 10; ++i) flows.push_back(fixtures::random_field(shape, i + 1));

    MeanFlowAccumulator acc(shape, 10);
    for (const auto& f : flows) acc.accumulate(f);
    VectorField2 mean = acc.finalize_mean();
    VectorField2 ref = oracle::mean_of_fields(flows);
    for (std::size_t i = 0; i < mean.u().size(); ++i) {
        CHECK(std::abs(mean.u()[i] - ref.u()[i]) <= 1e-12);
        CHECK(std::abs(mean.v()[i] - ref.v()[i]) <= 1e-12);
    }

    std::vector<std::size_t> perm(flows.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 rng(3);
    std::shuffle(perm.begin(), perm.end(), rng);
    MeanFlowAccumulator acc2(shape, 10);
    for (std::size_t i : perm) acc2.accumulate(flows[i]);
    VectorField2 mean2 = acc2.finalize_mean();
    for (std::size_t i = 0; i < mean.u().size(); ++i) {
        CHECK(std::abs(mean.u()[i] - mean2.u()[i]) <= 1e-12);
        CHECK(std::abs(mean.v()[i] - mean2.v()[i]) <= 1e-12);
    }
}
