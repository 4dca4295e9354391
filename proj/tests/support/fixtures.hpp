// Analytic velocity fields and small helpers shared across test suites.

#pragma once

#include <cmath>
#include <random>

#include "flowsal/field.hpp"

namespace fixtures {

// u = rate * (x - cx), v = -rate * (y - cy); bilinear-exact on the grid
inline flowsal::VectorField2 saddle(flowsal::GridShape shape, double cx, double cy,
                                    double rate = 1.0) {
    flowsal::VectorField2 f(shape);
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x) {
            f.u(x, y) = rate * (x - cx);
            f.v(x, y) = -rate * (y - cy);
        }
    return f;
}

inline flowsal::VectorField2 uniform(flowsal::GridShape shape, double u, double v) {
    return flowsal::VectorField2(shape, u, v);
}

// rigid rotation, angular rate omega
inline flowsal::VectorField2 rotation(flowsal::GridShape shape, double cx, double cy,
                                      double omega) {
    flowsal::VectorField2 f(shape);
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x) {
            f.u(x, y) = -omega * (y - cy);
            f.v(x, y) = omega * (x - cx);
        }
    return f;
}

// u = k * (y - cy), v = 0
inline flowsal::VectorField2 shear(flowsal::GridShape shape, double k, double cy = 0.0) {
    flowsal::VectorField2 f(shape);
    for (int y = 0; y < shape.height; ++y)
        for (int x = 0; x < shape.width; ++x) {
            f.u(x, y) = k * (y - cy);
            f.v(x, y) = 0.0;
        }
    return f;
}

inline flowsal::VectorField2 random_field(flowsal::GridShape shape, std::uint32_t seed,
                                          double amplitude = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    flowsal::VectorField2 f(shape);
    for (double& u : f.u()) u = dist(rng);
    for (double& v : f.v()) v = dist(rng);
    return f;
}

inline flowsal::ScalarField random_scalar(flowsal::GridShape shape, std::uint32_t seed,
                                          double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    flowsal::ScalarField f(shape);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

// mean endpoint error against a constant ground-truth displacement,
// evaluated away from the borders
inline double mean_epe_interior(const flowsal::VectorField2& flow, double gt_u, double gt_v,
                                int margin) {
    const flowsal::GridShape& s = flow.shape();
    double sum = 0.0;
    long count = 0;
    for (int y = margin; y < s.height - margin; ++y)
        for (int x = margin; x < s.width - margin; ++x) {
            sum += std::hypot(flow.u(x, y) - gt_u, flow.v(x, y) - gt_v);
            ++count;
        }
    return sum / static_cast<double>(count);
}

}  // namespace fixtures
