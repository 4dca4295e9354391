/// @file advection.hpp
/// @brief Particle advection through a steady velocity field with classical RK4.
///
/// The field is the temporal mean over the analysis window, so it is frozen
/// for the whole integration horizon: dx/dt = u(x, y), dy/dt = v(x, y).

#pragma once

#include <vector>

#include "flowsal/field.hpp"

namespace flowsal {

class AdvectionConfig {
public:
    /// Adjusts step_h downward so the horizon is a whole number of steps.
    AdvectionConfig(double horizon_tau = 10.0, double step_h = 0.25, int seed_stride = 1,
                    BoundaryPolicy boundary = {});

    double horizon_tau() const { return horizon_tau_; }
    double step_h() const { return step_h_; }
    int step_count() const { return step_count_; }
    int seed_stride() const { return seed_stride_; }
    BoundaryPolicy boundary() const { return boundary_; }

private:
    double horizon_tau_;
    double step_h_;
    int step_count_;
    int seed_stride_;
    BoundaryPolicy boundary_;
};

/// Final positions of particles seeded on a regular subgrid.
struct FlowMap {
    GridShape seed_shape;       // ceil(frame dims / stride)
    int seed_stride = 1;        // pixels between adjacent seeds
    std::vector<double> x_seed, y_seed;
    std::vector<double> x_final, y_final;
};

/// Integrates a single particle from (x0, y0) over the configured horizon.
std::pair<double, double> advect_point(const VectorField2& field, double x0, double y0,
                                       const AdvectionConfig& cfg);

/// Seeds one particle per stride x stride pixel block (at pixel centers) and
/// advects each independently. Embarrassingly parallel across seeds; output
/// is bit-identical for any worker count.
FlowMap advect_grid(const VectorField2& field, const AdvectionConfig& cfg);

}  // namespace flowsal
