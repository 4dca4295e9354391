#include "flowsal/advection.hpp"

#include <cmath>
#include <string>

#include "flowsal/parallel.hpp"

namespace flowsal {

AdvectionConfig::AdvectionConfig(double horizon_tau, double step_h, int seed_stride,
                                 BoundaryPolicy boundary)
    : horizon_tau_(horizon_tau), seed_stride_(seed_stride), boundary_(boundary) {
    if (!(horizon_tau > 0.0) || !std::isfinite(horizon_tau)) {
        throw ConfigError("advection horizon must be positive and finite");
    }
    if (!(step_h > 0.0) || !std::isfinite(step_h)) {
        throw ConfigError("advection step must be positive and finite");
    }
    if (step_h > horizon_tau) {
        throw ConfigError("advection step exceeds horizon");
    }
    if (seed_stride < 1) {
        throw ConfigError("seed stride must be >= 1");
    }
    // Whole number of steps; never lengthen the step.
    step_count_ = static_cast<int>(std::ceil(horizon_tau / step_h - 1e-12));
    if (step_count_ < 1) step_count_ = 1;
    step_h_ = horizon_tau / step_count_;
}

std::pair<double, double> advect_point(const VectorField2& field, double x0, double y0,
                                       const AdvectionConfig& cfg) {
    const BoundaryPolicy policy = cfg.boundary();
    const double h = cfg.step_h();
    double x = x0;
    double y = y0;
    for (int s = 0; s < cfg.step_count(); ++s) {
        auto [k1x, k1y] = sample_bilinear(field, x, y, policy);
        auto [k2x, k2y] = sample_bilinear(field, x + 0.5 * h * k1x, y + 0.5 * h * k1y, policy);
        auto [k3x, k3y] = sample_bilinear(field, x + 0.5 * h * k2x, y + 0.5 * h * k2y, policy);
        auto [k4x, k4y] = sample_bilinear(field, x + h * k3x, y + h * k3y, policy);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    }
    return {x, y};
}

FlowMap advect_grid(const VectorField2& field, const AdvectionConfig& cfg) {
    const GridShape& shape = field.shape();
    const int stride = cfg.seed_stride();
    FlowMap map;
    map.seed_stride = stride;
    map.seed_shape = GridShape{(shape.width + stride - 1) / stride,
                               (shape.height + stride - 1) / stride};
    const std::size_t n = static_cast<std::size_t>(map.seed_shape.count());
    map.x_seed.resize(n);
    map.y_seed.resize(n);
    map.x_final.resize(n);
    map.y_final.resize(n);

    parallel_for_chunks(map.seed_shape.height, [&](int row_begin, int row_end) {
        for (int sy = row_begin; sy < row_end; ++sy) {
            for (int sx = 0; sx < map.seed_shape.width; ++sx) {
                std::size_t i = map.seed_shape.index(sx, sy);
                double x0 = static_cast<double>(sx * stride);
                double y0 = static_cast<double>(sy * stride);
                map.x_seed[i] = x0;
                map.y_seed[i] = y0;
                auto [xf, yf] = advect_point(field, x0, y0, cfg);
                map.x_final[i] = xf;
                map.y_final[i] = yf;
            }
        }
    });
    return map;
}

}  // namespace flowsal
