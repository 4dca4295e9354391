#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "flowsal/field.hpp"
#include "support/fixtures.hpp"

using namespace flowsal;

TEST_CASE("shape validation rejects degenerate grids") {
    CHECK_THROWS_AS(ScalarField(GridShape{1, 5}), ConfigError);
    CHECK_THROWS_AS(VectorField2(GridShape{4, 1}), ConfigError);
    CHECK_NOTHROW(ScalarField(GridShape{2, 2}));
}

TEST_CASE("bilinear sampling on a constant field is the constant") {
    VectorField2 f = fixtures::uniform({8, 8}, 3.0, -1.0);
    auto [u, v] = sample_bilinear(f, 7.3, 2.9, {BoundaryMode::clamp});
    CHECK(u == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("bilinear sampling is exact on linear fields") {
    GridShape shape{4, 4};
    VectorField2 f(shape);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) f.u(x, y) = static_cast<double>(x);
    auto [u, v] = sample_bilinear(f, 1.5, 2.0, {BoundaryMode::clamp});
    CHECK(u == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(v == 0.0);
}

TEST_CASE("zero boundary returns zero outside the domain") {
    VectorField2 f = fixtures::random_field({6, 6}, 42);
    auto [u, v] = sample_bilinear(f, -5.0, -5.0, {BoundaryMode::zero});
    CHECK(u == 0.0);
    CHECK(v == 0.0);
}

TEST_CASE("clamp boundary rides the edge value") {
    VectorField2 f = fixtures::uniform({4, 4}, 0.0, 0.0);
    f.u(0, 0) = 9.0;
    auto [u, v] = sample_bilinear(f, -10.0, -10.0, {BoundaryMode::clamp});
    CHECK(u == 9.0);
    CHECK(v == 0.0);
}

TEST_CASE("reflect boundary mirrors about edge nodes") {
    GridShape shape{5, 5};
    VectorField2 f(shape);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) f.u(x, y) = x + 10.0 * y;
    auto [um, vm] = sample_bilinear(f, -1.0, 2.0, {BoundaryMode::reflect});
    CHECK(um == f.u(1, 2));
    auto [ue, ve] = sample_bilinear(f, 5.0, 2.0, {BoundaryMode::reflect});
    CHECK(ue == f.u(3, 2));
    (void)vm;
    (void)ve;
}

TEST_CASE("node values reproduce exactly at integer coordinates") {
    VectorField2 f = fixtures::random_field({9, 7}, 7);
    for (auto mode : {BoundaryMode::clamp, BoundaryMode::zero, BoundaryMode::reflect}) {
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 9; ++x) {
                auto [u, v] = sample_bilinear(f, x, y, {mode});
                CHECK(u == f.u(x, y));
                CHECK(v == f.v(x, y));
            }
    }
}

TEST_CASE("bilinear is exact for affine fields at random query points") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    GridShape shape{16, 12};
    for (int trial = 0; trial < 20; ++trial) {
        const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
        const double d = coeff(rng), e = coeff(rng), g = coeff(rng);
        VectorField2 f(shape);
        for (int y = 0; y < shape.height; ++y)
            for (int x = 0; x < shape.width; ++x) {
                f.u(x, y) = a + b * x + c * y;
                f.v(x, y) = d + e * x + g * y;
            }
        std::uniform_real_distribution<double> qx(0.0, shape.width - 1.0);
        std::uniform_real_distribution<double> qy(0.0, shape.height - 1.0);
        for (int q = 0; q < 50; ++q) {
            const double x = qx(rng), y = qy(rng);
            auto [u, v] = sample_bilinear(f, x, y, {BoundaryMode::clamp});
            const double eu = a + b * x + c * y;
            const double ev = d + e * x + g * y;
            CHECK(std::abs(u - eu) <= 1e-12 * std::max(1.0, std::abs(eu)));
            CHECK(std::abs(v - ev) <= 1e-12 * std::max(1.0, std::abs(ev)));
        }
    }
}

TEST_CASE("gradient_central is exact on affine scalar fields") {
    GridShape shape{5, 5};
    ScalarField f(shape);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) f.at(x, y) = 2.0 * x + 3.0 * y;
    auto [dx, dy] = gradient_central(f);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            CHECK(dx.at(x, y) == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(dy.at(x, y) == doctest::Approx(3.0).epsilon(1e-15));
        }
}

TEST_CASE("gradient of a constant field vanishes") {
    ScalarField f(GridShape{6, 4}, 5.5);
    auto [dx, dy] = gradient_central(f);
    for (double v : dx.values()) CHECK(v == 0.0);
    for (double v : dy.values()) CHECK(v == 0.0);
}

TEST_CASE("central difference of x^2 gives 2x in the interior") {
    GridShape shape{7, 2};
    ScalarField f(shape);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 7; ++x) f.at(x, y) = static_cast<double>(x) * x;
    auto [dx, dy] = gradient_central(f);
    CHECK(dx.at(2, 0) == 4.0);  // ((x+1)^2 - (x-1)^2)/2 = 2x
    CHECK(dx.at(5, 1) == 10.0);
    (void)dy;
}

TEST_CASE("sampling and gradients are pure (bit-identical on repeat)") {
    VectorField2 f = fixtures::random_field({14, 10}, 3);
    auto [u1, v1] = sample_bilinear(f, 4.37, 8.12, {BoundaryMode::reflect});
    auto [u2, v2] = sample_bilinear(f, 4.37, 8.12, {BoundaryMode::reflect});
    CHECK(u1 == u2);
    CHECK(v1 == v2);
    ScalarField s = fixtures::random_scalar({14, 10}, 5);
    auto g1 = gradient_central(s);
    auto g2 = gradient_central(s);
    CHECK(g1.first.values() == g2.first.values());
    CHECK(g1.second.values() == g2.second.values());
}
