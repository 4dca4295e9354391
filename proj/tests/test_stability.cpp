#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "flowsal/stability.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace flowsal;

namespace {

FlowMap identity_map(GridShape shape) {
    FlowMap map;
    map.seed_shape = shape;
    map.seed_stride = 1;
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x) {
            map.x_seed.push_back(x);
            map.y_seed.push_back(y);
            map.x_final.push_back(x);
            map.y_final.push_back(y);
        }
    return map;
}

}  // namespace

TEST_CASE("identity flow map has the identity Jacobian") {
    JacobianField j = jacobian_of_flow_map(identity_map({8, 6}));
    for (std::size_t i = 0; i < j.j11.size(); ++i) {
        CHECK(j.j11[i] == 1.0);
        CHECK(j.j12[i] == 0.0);
        CHECK(j.j21[i] == 0.0);
        CHECK(j.j22[i] == 1.0);
    }
}

TEST_CASE("uniform translation has the identity Jacobian") {
    FlowMap map = identity_map({9, 9});
    for (std::size_t i = 0; i < map.x_final.size(); ++i) {
        map.x_final[i] += 4.75;
        map.y_final[i] -= 2.5;
    }
    JacobianField j = jacobian_of_flow_map(map);
    for (std::size_t i = 0; i < j.j11.size(); ++i) {
        CHECK(j.j11[i] == 1.0);
        CHECK(j.j22[i] == 1.0);
        CHECK(j.j12[i] == 0.0);
        CHECK(j.j21[i] == 0.0);
    }
}

TEST_CASE("saddle flow map recovers the analytic diagonal Jacobian") {
    GridShape shape{12, 12};
    FlowMap map;
    map.seed_shape = shape;
    map.seed_stride = 1;
    const double e = std::exp(1.0), ei = std::exp(-1.0);
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x) {
            map.x_seed.push_back(x);
            map.y_seed.push_back(y);
            map.x_final.push_back(x * e);
            map.y_final.push_back(y * ei);
        }
    JacobianField j = jacobian_of_flow_map(map);
    for (int y = 1; y < shape.height - 1; ++y)
        for (int x = 1; x < shape.width - 1; ++x) {
            const std::size_t i = shape.index(x, y);
            CHECK(j.j11[i] == doctest::Approx(e).epsilon(1e-6));
            CHECK(j.j22[i] == doctest::Approx(ei).epsilon(1e-6));
            CHECK(std::abs(j.j12[i]) < 1e-12);
            CHECK(std::abs(j.j21[i]) < 1e-12);
        }
}

TEST_CASE("Jacobian rejects sub-2x2 seed grids") {
    FlowMap map;
    map.seed_shape = GridShape{1, 4};
    map.seed_stride = 1;
    map.x_seed.assign(4, 0);
    map.y_seed.assign(4, 0);
    map.x_final.assign(4, 0);
    map.y_final.assign(4, 0);
    CHECK_THROWS_AS(jacobian_of_flow_map(map), GridTooSmall);
}

TEST_CASE("identity Jacobian has unit max eigenvalue") {
    JacobianField j;
    j.shape = {4, 4};
    j.j11.assign(16, 1.0);
    j.j12.assign(16, 0.0);
    j.j21.assign(16, 0.0);
    j.j22.assign(16, 1.0);
    ScalarField lambda = max_eigenvalue_ctc(j);
    for (double l : lambda.values()) CHECK(l == 1.0);
}

TEST_CASE("diagonal Jacobian diag(e, 1/e) gives lambda = e^2") {
    JacobianField j;
    j.shape = {2, 2};
    j.j11.assign(4, std::exp(1.0));
    j.j12.assign(4, 0.0);
    j.j21.assign(4, 0.0);
    j.j22.assign(4, std::exp(-1.0));
    ScalarField lambda = max_eigenvalue_ctc(j);
    const double e2 = std::exp(2.0);
    for (double l : lambda.values()) {
        CHECK(l == doctest::Approx(e2).epsilon(1e-12));
        CHECK(std::abs(l - static_cast<double>(oracle::max_eigenvalue_jacobi(
                               std::exp(1.0), 0, 0, std::exp(-1.0)))) < 1e-12);
    }
}

TEST_CASE("closed-form eigenvalue matches the extended-precision oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> entry(-10.0, 10.0);
    std::uniform_real_distribution<double> scale_exp(-6.0, 6.0);
    JacobianField j;
    j.shape = {100, 100};
    const std::size_t n = 10000;
    j.j11.resize(n);
    j.j12.resize(n);
    j.j21.resize(n);
    j.j22.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::pow(10.0, scale_exp(rng));
        j.j11[i] = entry(rng) * s;
        j.j12[i] = entry(rng) * s;
        j.j21[i] = entry(rng) * s;
        j.j22[i] = entry(rng) * s;
    }
    ScalarField lambda = max_eigenvalue_ctc(j);
    for (std::size_t i = 0; i < n; ++i) {
        const long double ref =
            oracle::max_eigenvalue_jacobi(j.j11[i], j.j12[i], j.j21[i], j.j22[i]);
        const long double got = lambda.values()[i];
        CHECK(std::abs(static_cast<double>(got - ref)) <=
              1e-10 * std::max(1.0, static_cast<double>(ref)));
        CHECK(lambda.values()[i] >= 0.0);
    }
}

TEST_CASE("stability exponent basics") {
    ScalarField lambda(GridShape{3, 3}, 1.0);
    StabilityField phi1 = stability_exponent(lambda, 2.5);
    for (double p : phi1.phi) CHECK(p == 0.0);

    ScalarField le2(GridShape{3, 3}, std::exp(2.0));
    StabilityField phi2 = stability_exponent(le2, 1.0);
    for (double p : phi2.phi) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
    StabilityField phi3 = stability_exponent(le2, 2.0);
    for (double p : phi3.phi) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));

    // lambda floor keeps degenerate compression finite
    ScalarField zero(GridShape{3, 3}, 0.0);
    StabilityField phi4 = stability_exponent(zero, 1.0);
    for (double p : phi4.phi) {
        CHECK(std::isfinite(p));
        CHECK(p < -10.0);
    }
    CHECK_THROWS_AS(stability_exponent(lambda, 0.0), ConfigError);
}

TEST_CASE("phi sign follows log lambda") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam(0.0, 4.0);
    GridShape shape{10, 10};
    ScalarField lambda(shape);
    for (double& v : lambda.values()) v = lam(rng);
    StabilityField phi = stability_exponent(lambda, 3.0);
    for (std::size_t i = 0; i < phi.phi.size(); ++i) {
        if (lambda.values()[i] > 1.0) CHECK(phi.phi[i] > 0.0);
        if (lambda.values()[i] < 1.0 && lambda.values()[i] > 1e-12) CHECK(phi.phi[i] < 0.0);
    }
}

TEST_CASE("uniform field is neutrally stable end to end") {
    VectorField2 f = fixtures::uniform({32, 32}, 1.0, -0.5);
    StabilityField phi = compute_stability(f, AdvectionConfig(10.0, 0.25));
    for (int y = 2; y < 30; ++y)
        for (int x = 2; x < 30; ++x) CHECK(std::abs(phi.phi_at(x, y)) <= 1e-6);
}

TEST_CASE("saddle field has unit exponent end to end") {
    GridShape shape{64, 64};
    const double c = 31.5;
    VectorField2 f = fixtures::saddle(shape, c, c);
    StabilityField phi = compute_stability(f, AdvectionConfig(1.0, 0.01));
    for (int y = 22; y <= 41; ++y)
        for (int x = 22; x <= 41; ++x) {
            CHECK(phi.phi_at(x, y) == doctest::Approx(1.0).epsilon(1e-3));
        }
}

TEST_CASE("shear field matches the closed-form Cauchy-Green eigenvalue") {
    GridShape shape{32, 32};
    VectorField2 f = fixtures::shear(shape, 0.5);
    auto closed_form_phi = [](double k, double tau) {
        // numeric oracle on the analytic shear deformation [[1, k tau], [0, 1]]
        const long double lam = oracle::max_eigenvalue_jacobi(1.0, k * tau, 0.0, 1.0);
        return static_cast<double>(std::log(lam) / (2.0L * tau));
    };

    // k tau = 1 (tau = 2): the value pinned by the acceptance suite
    StabilityField phi2 = compute_stability(f, AdvectionConfig(2.0, 0.01));
    CHECK(phi2.phi_at(5, 10) == doctest::Approx(0.2406059125).epsilon(1e-3));
    CHECK(phi2.phi_at(5, 10) == doctest::Approx(closed_form_phi(0.5, 2.0)).epsilon(1e-3));

    // tau = 1 cross-check against its own closed form
    StabilityField phi1 = compute_stability(f, AdvectionConfig(1.0, 0.01));
    CHECK(phi1.phi_at(5, 10) == doctest::Approx(closed_form_phi(0.5, 1.0)).epsilon(1e-3));
    CHECK(closed_form_phi(0.5, 1.0) == doctest::Approx(0.2474664).epsilon(1e-4));
}

TEST_CASE("coarse seeding divides differences by the seed spacing") {
    // linear flow map: finite differences are exact at any stride
    GridShape shape{64, 64};
    VectorField2 f = fixtures::saddle(shape, 31.5, 31.5);
    StabilityField phi = compute_stability(f, AdvectionConfig(1.0, 0.01, 2));
    CHECK(phi.shape == GridShape{32, 32});
    for (int y = 12; y <= 20; ++y)
        for (int x = 12; x <= 20; ++x) {
            CHECK(phi.phi_at(x, y) == doctest::Approx(1.0).epsilon(1e-3));
        }
}

TEST_CASE("phi is equivariant under a quarter-turn field rotation") {
    GridShape shape{24, 24};
    VectorField2 f = fixtures::random_field(shape, 31, 0.25);
    // smooth the random field a little so trajectories are tame
    for (int pass = 0; pass < 2; ++pass) {
        VectorField2 g = f;
        for (int y = 1; y < 23; ++y)
            for (int x = 1; x < 23; ++x) {
                g.u(x, y) = 0.25 * (f.u(x - 1, y) + f.u(x + 1, y) + f.u(x, y - 1) + f.u(x, y + 1));
                g.v(x, y) = 0.25 * (f.v(x - 1, y) + f.v(x + 1, y) + f.v(x, y - 1) + f.v(x, y + 1));
            }
        f = g;
    }
    // rotate 90 degrees counterclockwise in image coords: (x,y) -> (y, N-1-x),
    // velocity (u,v) -> (v, -u)
    const int n = 24;
    VectorField2 rot(shape);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            rot.u(y, n - 1 - x) = f.v(x, y);
            rot.v(y, n - 1 - x) = -f.u(x, y);
        }
    AdvectionConfig cfg(4.0, 0.25);
    StabilityField phi = compute_stability(f, cfg);
    StabilityField phi_rot = compute_stability(rot, cfg);
    for (int y = 3; y < n - 3; ++y)
        for (int x = 3; x < n - 3; ++x) {
            CHECK(phi.phi_at(x, y) ==
                  doctest::Approx(phi_rot.phi_at(y, n - 1 - x)).epsilon(1e-6));
        }
}

TEST_CASE("saddle exponent error decreases along a refinement ladder") {
    GridShape shape{64, 64};
    const double c = 31.5;
    VectorField2 f = fixtures::saddle(shape, c, c);
    auto interior_err = [&](double h) {
        StabilityField phi = compute_stability(f, AdvectionConfig(1.0, h));
        double worst = 0.0;
        for (int y = 26; y <= 37; ++y)
            for (int x = 26; x <= 37; ++x) worst = std::max(worst, std::abs(phi.phi_at(x, y) - 1.0));
        return worst;
    };
    const double e1 = interior_err(0.2);
    const double e2 = interior_err(0.1);
    const double e3 = interior_err(0.05);
    CHECK(e1 > e2);
    CHECK(e2 > e3);
}
